"""Shared, unique and complementary information from one union-information solve."""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .core import SolveOutcome, SolverConfig, admui
from .probkit import (
    LN2,
    InfoValue,
    MarginalPair,
    _table,
    co_information,
    mi_s_yz,
    mi_table,
)

CLAMP_TOL = 1e-6
COMPONENTS = ("ui_y", "ui_z", "si", "ci")


@dataclass(frozen=True)
class DecompositionResult:
    ui_y: InfoValue
    ui_z: InfoValue
    si: InfoValue
    ci: InfoValue
    mi_total: InfoValue
    mi_sy: InfoValue
    mi_sz: InfoValue
    coi: float
    union_info: InfoValue
    raw: dict
    solver: SolveOutcome | None = None

    def identity_residuals(self) -> dict:
        """Residuals of the decomposition identities on the unclamped values."""
        r = self.raw
        # I(S;Y|Z) recovered from the directly evaluated co-information
        cmi_y_given_z = self.mi_sy - self.coi
        return {
            "sum": r["ui_y"] + r["ui_z"] + r["si"] + r["ci"] - self.mi_total,
            "sy": r["si"] + r["ui_y"] - self.mi_sy,
            "sz": r["si"] + r["ui_z"] - self.mi_sz,
            "coi": r["si"] - r["ci"] - self.coi,
            "cmi": r["ci"] + r["ui_y"] - cmi_y_given_z,
        }

    def values(self, unit: str = "bits") -> dict:
        scale = 1.0 / LN2 if unit == "bits" else 1.0
        keys = COMPONENTS + ("mi_total", "mi_sy", "mi_sz", "coi", "union_info")
        return {k: float(getattr(self, k)) * scale for k in keys}

    def shares(self) -> dict | None:
        """Each component as a fraction of I(S;Y,Z); None when the total vanishes.

        The denominator is the sum of the clamped components, which equals
        I(S;Y,Z) up to clamping, so the shares always sum to one.
        """
        if self.mi_total <= 1e-12:
            return None
        parts = {k: float(getattr(self, k)) for k in COMPONENTS}
        total = sum(parts.values())
        return {k: v / total for k, v in parts.items()}


def _clamp(name: str, value: float, tol: float) -> InfoValue:
    if value < -tol:
        warnings.warn(f"{name} = {value:.3g} nats is negative beyond solver tolerance", RuntimeWarning, stacklevel=3)
    return InfoValue(max(value, 0.0))


def _assemble(union, mi_total, mi_sy, mi_sz, coi, outcome, tol=CLAMP_TOL) -> DecompositionResult:
    # P itself is feasible, so I_P(S;Y,Z) bounds the minimum from above.
    union = min(union, mi_total)
    raw = {
        "ci": mi_total - union,
        "ui_y": union - mi_sz,
        "ui_z": union - mi_sy,
    }
    raw["si"] = mi_sy - raw["ui_y"]
    return DecompositionResult(
        **{k: _clamp(k, raw[k], tol) for k in COMPONENTS},
        mi_total=InfoValue(mi_total),
        mi_sy=InfoValue(mi_sy),
        mi_sz=InfoValue(mi_sz),
        coi=coi,
        union_info=InfoValue(union),
        raw=raw,
        solver=outcome,
    )


def decompose(p, config: SolverConfig | None = None) -> DecompositionResult:
    """Four-way split of I(S; Y,Z) for the joint ``p``.

    All components come from a single minimization of I_Q(S; Y,Z) over the
    joints sharing p's (S,Y) and (S,Z) marginals:

    * ``ci = I(S;Y,Z) - union``
    * ``ui_y = union - I(S;Z)``, ``ui_z = union - I(S;Y)``
    * ``si = I(S;Y) - ui_y``

    Negative components (solver tolerance) are clamped to zero; unclamped
    values stay in ``raw``.  A warning is raised only when a component is
    more negative than ``max(1e-6, epsilon)``.
    """
    config = config or SolverConfig()
    table = _table(p)
    marginals = MarginalPair.from_joint(table)
    alphabets = getattr(p, "alphabets", None)
    outcome = admui(marginals, config, alphabets=alphabets)
    return _assemble(
        float(outcome.union_information),
        mi_s_yz(table),
        mi_table(table.sum(axis=2)),
        mi_table(table.sum(axis=1)),
        co_information(table),
        outcome,
        max(CLAMP_TOL, config.epsilon),
    )


def unique_information(marginals: MarginalPair, direction: str = "y", config: SolverConfig | None = None) -> InfoValue:
    """UI(S;Y\\Z) (``direction="y"``) or UI(S;Z\\Y) from the pairwise marginals alone."""
    if direction not in ("y", "z"):
        raise ValueError("direction must be 'y' or 'z'")
    outcome = admui(marginals, config)
    other = marginals.p_sz if direction == "y" else marginals.p_sy
    return InfoValue(max(float(outcome.union_information) - mi_table(other), 0.0))


def decompose_table(p: np.ndarray, union: float, tol: float = CLAMP_TOL) -> DecompositionResult:
    """Assemble a decomposition for ``p`` from an externally computed union information."""
    table = np.asarray(p, dtype=float)
    return _assemble(
        union, mi_s_yz(table), mi_table(table.sum(axis=2)), mi_table(table.sum(axis=1)), co_information(table), None,
        tol,
    )
