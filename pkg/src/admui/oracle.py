"""Grid-search verification oracle for small alphabets.

The feasible set (joints sharing P's (S,Y) and (S,Z) marginals) is
``P + span(basis)`` intersected with the nonnegative orthant.  Each basis
direction lives on one ``s`` slice and moves mass around a 2x2 rectangle of
cells anchored at ``(y, z) = (0, 0)``, so it leaves both pairwise marginals
untouched.  The oracle evaluates I_Q(S; Y,Z) on a grid over that chart and
refines around the incumbent.  It shares no code with the iterative solver.
"""

from __future__ import annotations

import itertools
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linprog

from .core import SolverConfig, SolveStatus, admui
from .errors import CapReachedWarning, DimensionTooLarge
from .probkit import MarginalPair, _table

MAX_DIM = 4
_CHUNK = 20_000
_FEAS = 1e-15


@dataclass(frozen=True)
class DeltaPChart:
    base_point: np.ndarray
    basis: np.ndarray  # (dim, S, Y, Z)
    box_bounds: np.ndarray  # (dim, 2)

    @property
    def dim(self) -> int:
        return self.basis.shape[0]

    def point(self, t) -> np.ndarray:
        return self.base_point + np.tensordot(np.asarray(t, float), self.basis, axes=1)


def chart_delta_p(p) -> DeltaPChart:
    table = np.array(_table(p), dtype=float)
    ns, ny, nz = table.shape
    dirs = []
    owner = []
    for s in range(ns):
        for y in range(1, ny):
            for z in range(1, nz):
                d = np.zeros_like(table)
                d[s, 0, 0] = d[s, y, z] = 1.0
                d[s, 0, z] = d[s, y, 0] = -1.0
                dirs.append(d)
                owner.append(s)
    basis = np.array(dirs).reshape(len(dirs), ns, ny, nz)
    bounds = np.zeros((len(dirs), 2))
    owner = np.array(owner)
    # directions on different s slices touch disjoint cells: bound each slice separately
    for s in range(ns):
        idx = np.flatnonzero(owner == s)
        if idx.size == 0:
            continue
        a = basis[idx][:, s].reshape(idx.size, -1).T  # cells x k
        b = table[s].ravel()
        for j, k in enumerate(idx):
            c = np.zeros(idx.size)
            c[j] = 1.0
            lo = linprog(c, A_ub=-a, b_ub=b, bounds=[(None, None)] * idx.size, method="highs")
            hi = linprog(-c, A_ub=-a, b_ub=b, bounds=[(None, None)] * idx.size, method="highs")
            bounds[k] = (lo.x[j], hi.x[j])
    # snap LP round-off so degenerate directions collapse to a single point
    bounds[np.abs(bounds) < 1e-14] = 0.0
    return DeltaPChart(table, basis, bounds)


def _mi_batch(q: np.ndarray) -> np.ndarray:
    """I(S; Y,Z) for a batch of joints shaped (n, S, Y*Z)."""
    ps = q.sum(axis=2, keepdims=True)
    pyz = q.sum(axis=1, keepdims=True)
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.where(q > 0, q * np.log(q / ps / pyz), 0.0)
    return terms.sum(axis=(1, 2))


def grid_points(chart: DeltaPChart, box: np.ndarray, n: int):
    """Yield (t, Q) batches for the feasible points of an n-per-axis grid over ``box``."""
    axes = [np.linspace(lo, hi, n) if hi - lo > 0 else np.array([lo]) for lo, hi in box]
    flat_basis = chart.basis.reshape(chart.dim, -1)
    base = chart.base_point.ravel()
    combos = itertools.product(*axes)
    while True:
        t = np.array(list(itertools.islice(combos, _CHUNK)))
        if t.size == 0:
            return
        q = base[None, :] + t @ flat_basis
        ok = np.all(q >= -_FEAS, axis=1)
        if np.any(ok):
            yield t[ok], np.clip(q[ok], 0.0, None)


def _grid_min(chart, box, n):
    best_val, best_t = np.inf, None
    shape = chart.base_point.shape
    for t, q in grid_points(chart, box, n):
        vals = _mi_batch(q.reshape(len(q), shape[0], -1))
        k = int(np.argmin(vals))
        if vals[k] < best_val:
            best_val, best_t = float(vals[k]), t[k]
    return best_val, best_t


def brute_force_union_information(p, grid_points_per_dim: int = 21, refine_rounds: int = 3) -> float:
    """min over the chart of I_Q(S; Y,Z) by exhaustive grid plus local refinement."""
    if grid_points_per_dim < 11:
        raise ValueError("grid_points_per_dim must be at least 11")
    chart = chart_delta_p(p)
    if chart.dim > MAX_DIM:
        raise DimensionTooLarge(f"chart dimension {chart.dim} exceeds {MAX_DIM}")
    full = chart.box_bounds.copy()
    if chart.dim == 0:
        return float(_mi_batch(chart.base_point.reshape(1, chart.base_point.shape[0], -1))[0])
    best, t = _grid_min(chart, full, grid_points_per_dim)
    box = full.copy()
    for _ in range(refine_rounds):
        half = 0.1 * (box[:, 1] - box[:, 0])
        box = np.stack([np.maximum(t - half, full[:, 0]), np.minimum(t + half, full[:, 1])], axis=1)
        val, cand = _grid_min(chart, box, grid_points_per_dim)
        if val < best:
            best, t = val, cand
    return best


def surrogate_optimum(p, long_run_iters: int = 1_000_000) -> float:
    """High-accuracy solver run used as the reference optimum in tests."""
    cfg = SolverConfig(epsilon=1e-12, epsilon1=1e-14, max_outer_iter=long_run_iters)
    out = admui(MarginalPair.from_joint(_table(p)), cfg)
    if out.status is SolveStatus.CAP_REACHED:
        warnings.warn(f"surrogate hit the {long_run_iters}-iteration cap", CapReachedWarning, stacklevel=2)
    return float(out.union_information)
