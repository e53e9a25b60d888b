"""I-projection of a reference table onto a fixed-marginals family.

The family for one value ``s`` is the set of distributions on Y x Z whose
row and column marginals equal ``P(Y|s)`` and ``P(Z|s)``.  The projection
is computed by (optionally damped) generalized iterative scaling.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import DegenerateIterate
from .probkit import ConditionalTable

_TOL = 1e-9


class ProjectionStatus(str, enum.Enum):
    CONVERGED = "Converged"
    CAP_REACHED = "IterationCapReached"


@dataclass(frozen=True)
class ProjectionTarget:
    row_marginal: np.ndarray
    col_marginal: np.ndarray

    def __post_init__(self):
        for name in ("row_marginal", "col_marginal"):
            v = np.array(getattr(self, name), dtype=float)
            if v.ndim != 1 or np.any(v < 0) or abs(v.sum() - 1.0) > _TOL:
                raise ValueError(f"{name} must be a probability vector")
            v.setflags(write=False)
            object.__setattr__(self, name, v)


@dataclass(frozen=True)
class DistanceStop:
    """Stop when successive normalized iterates are within ``epsilon1`` in L2."""

    epsilon1: float

    mode = _kernels.MODE_DISTANCE

    @property
    def tol(self) -> float:
        return self.epsilon1 ** 2


@dataclass(frozen=True)
class EtaGapStop:
    """Stop when ``expectation_gap(q) <= factor * min(q)``.

    With ``factor = epsilon / 12`` this is the inner rule that, together with
    a log-ratio outer test at ``epsilon / 3``, certifies epsilon-optimality.
    """

    factor: float

    mode = _kernels.MODE_ETA_GAP

    @property
    def tol(self) -> float:
        return self.factor


InnerStopSpec = DistanceStop | EtaGapStop


@dataclass(frozen=True)
class ProjectionResult:
    q: ConditionalTable
    iterations: int
    final_sq_step: float
    final_eta_gap: float
    status: ProjectionStatus


def _check_gamma(gamma):
    if not 0.0 < gamma <= 1.0:
        raise ValueError(f"gamma must lie in (0, 1], got {gamma}")


def gis_step(b, target: ProjectionTarget, gamma: float = 1.0) -> np.ndarray:
    """One scaling step; ``gamma = 1`` is plain GIS."""
    _check_gamma(gamma)
    b = np.asarray(b, dtype=float)
    ty, tz = target.row_marginal, target.col_marginal
    pinned = (ty > 0)[:, None] & (tz > 0)[None, :]
    out = _kernels.active.gis_step(np.where(pinned, b, 0.0), ty, tz, gamma)
    if out is None:
        raise DegenerateIterate("a row or column sum vanished while its target is positive")
    return out


def expectation_gap(b, target: ProjectionTarget) -> float:
    """L1 mismatch of marginals, first symbol of each axis excluded."""
    b = np.asarray(b, dtype=float)
    b = b / b.sum()
    rows = np.abs(b.sum(axis=1) - target.row_marginal)[1:].sum()
    cols = np.abs(b.sum(axis=0) - target.col_marginal)[1:].sum()
    return float(rows + cols)


def i_project(
    r,
    target: ProjectionTarget,
    gamma: float = 1.0,
    inner_stop: InnerStopSpec = DistanceStop(1e-8),
    max_iter: int = 100_000,
    s_index: int = -1,
) -> ProjectionResult:
    """argmin over the fixed-marginals family of D(q || r), by GIS from ``b0 = r``.

    ``r`` must be positive on the product of the target supports.  The
    returned table is normalized once, on exit.
    """
    _check_gamma(gamma)
    r = np.asarray(r, dtype=float)
    ty, tz = target.row_marginal, target.col_marginal
    if r.shape != (ty.size, tz.size):
        raise ValueError(f"r has shape {r.shape}, targets imply {(ty.size, tz.size)}")
    b, n, sq, gap, status = _kernels.active.project(
        r, ty, tz, gamma, inner_stop.mode, inner_stop.tol, int(max_iter)
    )
    if status == _kernels.STATUS_DEGENERATE:
        raise DegenerateIterate(f"iterate lost a supported row or column after {n} steps")
    q = b / b.sum()
    st = ProjectionStatus.CONVERGED if status == _kernels.STATUS_CONVERGED else ProjectionStatus.CAP_REACHED
    return ProjectionResult(ConditionalTable(s_index, q), int(n), float(sq), float(gap), st)

