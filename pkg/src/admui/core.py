"""Alternating divergence minimization for the union information.

Each outer iteration

1. projects the current reference ``R`` on Y x Z onto every per-``s``
   fixed-marginals family (GIS inner loop, compiled kernel), and
2. replaces ``R`` by the ``P_S``-mixture of the projections.

The objective ``I_Q(S; Y,Z)`` with ``Q = P_S Q_{YZ|S}`` is nonincreasing
and converges to its minimum over all joints sharing the (S,Y) and (S,Z)
marginals when ``R`` starts at a full-support point.
"""

from __future__ import annotations

import enum
import math
import time
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Iterator

import numpy as np

from . import _kernels
from .errors import (
    DegenerateIterate,
    InconsistentMarginals,
    VanishingIterateWarning,
)
from .probkit import ConditionalTable, InfoValue, JointDistribution, MarginalPair, mi_s_yz, validate_joint

_MARGINAL_TOL = 1e-9
_VANISHING = 1e-300


class StopMode(str, enum.Enum):
    HEURISTIC = "heuristic"
    RIGOROUS = "rigorous"


class SolveStatus(str, enum.Enum):
    EPS_OPTIMAL = "EpsOptimal"
    CAP_REACHED = "CapReached"


@dataclass(frozen=True)
class SolverConfig:
    epsilon: float = 1e-6
    epsilon1: float | None = None
    gamma: float = 1.0
    stop_mode: StopMode = StopMode.HEURISTIC
    check_cadence: int = 1
    max_outer_iter: int = 100_000
    max_inner_iter: int = 100_000
    parallel_step1: bool = False
    workers: int = 4

    def __post_init__(self):
        object.__setattr__(self, "stop_mode", StopMode(self.stop_mode))
        if self.epsilon1 is None:
            object.__setattr__(self, "epsilon1", 1e-2 * self.epsilon)
        if not (self.epsilon > 0 and self.epsilon1 > 0):
            raise ValueError("epsilon and epsilon1 must be positive")
        if not 0 < self.gamma <= 1:
            raise ValueError("gamma must lie in (0, 1]")
        if self.check_cadence < 1 or self.max_outer_iter < 1 or self.max_inner_iter < 1:
            raise ValueError("check_cadence and iteration caps must be >= 1")

    def with_(self, **changes) -> "SolverConfig":
        if "epsilon" in changes and "epsilon1" not in changes:
            changes["epsilon1"] = None
        return replace(self, **changes)


@dataclass
class SolverState:
    r: np.ndarray
    q: np.ndarray  # stacked Q_{YZ|s} for s in support, shape (len(support), Y, Z)
    support: np.ndarray
    outer_iter: int
    inner_iterations: int = 0
    inner_cap_hits: int = 0
    max_log_ratio: float = math.inf
    stopped: bool = False
    rigorous: bool = False

    @property
    def q_by_s(self) -> list:
        return [ConditionalTable(int(s), self.q[k]) for k, s in enumerate(self.support)]


@dataclass(frozen=True)
class SolveOutcome:
    q_star: JointDistribution
    union_information: InfoValue
    outer_iterations: int
    inner_iterations_total: int
    status: SolveStatus
    stop_mode_used: StopMode
    wall_time: float
    certified: bool = False
    inner_cap_hits: int = 0
    objective_trace: tuple | None = None
    warnings: tuple = field(default_factory=tuple)


def step2_mixture(q_by_s, p_s) -> np.ndarray:
    """R(y,z) = sum_s P_S(s) Q(y,z|s)."""
    q = _stack(q_by_s)
    return np.tensordot(np.asarray(p_s, dtype=float), q, axes=1)


def _stack(q_by_s) -> np.ndarray:
    if isinstance(q_by_s, np.ndarray):
        return q_by_s
    return np.stack([c.probs if isinstance(c, ConditionalTable) else np.asarray(c, float) for c in q_by_s])


def max_log_ratio(q_prev, q_next) -> float:
    """max log(q_next / q_prev) over cells; 0 -> 0 cells are skipped, 0 -> positive is +inf."""
    a, b = _stack(q_prev), _stack(q_next)
    if np.any((a == 0) & (b > 0)):
        return math.inf
    on = a > 0
    if not np.any(on):
        return 0.0
    with np.errstate(divide="ignore"):
        return float(np.max(np.log(b[on] / a[on])))


def stop_heuristic(q_prev, q_next, epsilon: float) -> bool:
    return max_log_ratio(q_prev, q_next) <= epsilon


def stop_rigorous_outer(q_prev, q_next, epsilon: float) -> bool:
    """Outer half of the certified rule: log-ratio test at epsilon / 3."""
    return max_log_ratio(q_prev, q_next) <= epsilon / 3.0


def min_positive(q) -> float:
    q = _stack(q)
    pos = q[q > 0]
    return float(pos.min()) if pos.size else 0.0


def rigorous_inner_threshold(q_tilde, epsilon: float) -> float:
    """Bound on the expectation gap: (min positive entry of q_tilde) * epsilon / 12."""
    return min_positive(q_tilde) * epsilon / 12.0


def _targets(marginals: MarginalPair):
    p_sy, p_sz = marginals.p_sy, marginals.p_sz
    ps_y, ps_z = p_sy.sum(axis=1), p_sz.sum(axis=1)
    gap = float(np.max(np.abs(ps_y - ps_z)))
    if gap > _MARGINAL_TOL:
        raise InconsistentMarginals(f"S-marginals differ by {gap:.3g}")
    support = np.flatnonzero(ps_y > 0)
    ty = p_sy[support] / ps_y[support, None]
    tz = p_sz[support] / ps_z[support, None]
    ps = ps_y[support] / ps_y[support].sum()
    return support, ps, ty, tz


def _step1(kernel, r, ty, tz, gamma, mode, tol, max_iter, pool, workers):
    if pool is None or len(ty) < 2:
        return kernel.project_many(r, ty, tz, gamma, mode, tol, max_iter)
    bounds = np.linspace(0, len(ty), min(workers, len(ty)) + 1).astype(int)
    blocks = [(lo, hi) for lo, hi in zip(bounds[:-1], bounds[1:]) if hi > lo]
    parts = list(pool.map(
        lambda lh: kernel.project_many(r, ty[lh[0]:lh[1]], tz[lh[0]:lh[1]], gamma, mode, tol, max_iter),
        blocks,
    ))
    return tuple(np.concatenate([p[i] for p in parts]) for i in range(5))


def run_outer_loop(marginals: MarginalPair, config: SolverConfig, r0=None) -> Iterator[SolverState]:
    """Yield the solver state after every outer iteration until the stop rule fires."""
    support, ps, ty, tz = _targets(marginals)
    ny, nz = ty.shape[1], tz.shape[1]
    if r0 is None:
        r = np.full((ny, nz), 1.0 / (ny * nz))
    else:
        r = np.array(r0, dtype=float)
        if r.shape != (ny, nz) or np.any(r <= 0):
            raise ValueError("initial reference must be a full-support table on Y x Z")
        r = r / r.sum()

    kernel = _kernels.active
    rigorous = config.stop_mode is StopMode.RIGOROUS
    q_prev = None
    caps_prev = 0
    pool = ThreadPoolExecutor(config.workers) if config.parallel_step1 else None
    try:
        for i in range(1, config.max_outer_iter + 1):
            if rigorous:
                mode, tol, outer_eps = _kernels.MODE_ETA_GAP, config.epsilon / 12.0, config.epsilon / 3.0
            else:
                mode, tol, outer_eps = _kernels.MODE_DISTANCE, config.epsilon1 ** 2, config.epsilon
            q, iters, status, _, _ = _step1(
                kernel, r, ty, tz, config.gamma, mode, tol, config.max_inner_iter, pool, config.workers
            )
            if np.any(status == _kernels.STATUS_DEGENERATE):
                raise DegenerateIterate(f"inner projection degenerated at outer iteration {i}")
            caps = int(np.count_nonzero(status == _kernels.STATUS_CAP))
            r = step2_mixture(q, ps)

            ratio = math.inf
            stop = False
            if q_prev is not None and i % config.check_cadence == 0:
                ratio = max_log_ratio(q_prev, q)
                stop = ratio <= outer_eps
            state = SolverState(
                r=r, q=q, support=support, outer_iter=i,
                inner_iterations=int(iters.sum()), inner_cap_hits=caps,
                max_log_ratio=ratio, stopped=stop,
                rigorous=rigorous and caps == 0 and caps_prev == 0,
            )
            yield state
            if stop:
                return
            if rigorous and min_positive(q) < _VANISHING:
                warnings.warn(
                    "iterate entry below 1e-300; rigorous stop unavailable, continuing with heuristic stop",
                    VanishingIterateWarning,
                    stacklevel=2,
                )
                rigorous = False
            q_prev, caps_prev = q, caps
    finally:
        if pool is not None:
            pool.shutdown()


def assemble_q_star(state: SolverState, marginals: MarginalPair) -> np.ndarray:
    n_s = marginals.p_sy.shape[0]
    ps = marginals.p_sy.sum(axis=1)
    ps = ps / ps.sum()
    out = np.zeros((n_s,) + state.q.shape[1:])
    out[state.support] = ps[state.support, None, None] * state.q
    return out


def admui(marginals: MarginalPair, config: SolverConfig | None = None, *,
          r0=None, trace: bool = False, alphabets=None) -> SolveOutcome:
    """Minimize I_Q(S; Y,Z) over joints Q sharing the given pairwise marginals."""
    config = config or SolverConfig()
    t0 = time.perf_counter()
    inner_total = 0
    cap_hits = 0
    objective = [] if trace else None
    state = None
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", VanishingIterateWarning)
        for state in run_outer_loop(marginals, config, r0=r0):
            inner_total += state.inner_iterations
            cap_hits += state.inner_cap_hits
            if trace:
                objective.append(mi_s_yz(assemble_q_star(state, marginals)))
    notes = tuple(str(w.message) for w in caught)
    for w in caught:
        warnings.warn_explicit(w.message, w.category, w.filename, w.lineno)

    q_star = assemble_q_star(state, marginals)
    mode_used = StopMode.RIGOROUS if (config.stop_mode is StopMode.RIGOROUS and not notes) else StopMode.HEURISTIC
    status = SolveStatus.EPS_OPTIMAL if state.stopped else SolveStatus.CAP_REACHED
    return SolveOutcome(
        q_star=validate_joint(q_star, alphabets),
        union_information=InfoValue(mi_s_yz(q_star)),
        outer_iterations=state.outer_iter,
        inner_iterations_total=inner_total,
        status=status,
        stop_mode_used=mode_used,
        wall_time=time.perf_counter() - t0,
        certified=bool(state.stopped and state.rigorous and mode_used is StopMode.RIGOROUS),
        inner_cap_hits=cap_hits,
        objective_trace=tuple(objective) if trace else None,
        warnings=notes,
    )
