"""Finite discrete distributions over (S, Y, Z) and their information functionals.

Every functional returns natural-log units.  Functions accept either a
:class:`JointDistribution` or a raw ``numpy`` array so the solver can call
them on intermediate tables without re-validating.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterator, Sequence

import numpy as np

from .errors import (
    DimensionMismatch,
    NegativeMass,
    NotNormalized,
    ZeroConditioningEvent,
)

LN2 = math.log(2.0)
AXES = "SYZ"

_NEG_CLAMP = 1e-12
_NORM_TOL = 1e-9
# Renormalizing an already-normalized table perturbs its last bits; skipping
# the division below this threshold keeps validate_joint idempotent.
_RENORM_FLOOR = 1e-13


class InfoValue(float):
    """A float in nats with a ``bits`` view."""

    @property
    def nats(self) -> float:
        return float(self)

    @property
    def bits(self) -> float:
        return float(self) / LN2

    def __repr__(self):
        return f"InfoValue({float(self)!r} nats)"


def to_bits(nats: float) -> float:
    return nats / LN2


@dataclass(frozen=True)
class Alphabet:
    labels: tuple

    def __post_init__(self):
        labels = tuple(str(l) for l in self.labels)
        if not labels:
            raise ValueError("alphabet must contain at least one symbol")
        if len(set(labels)) != len(labels):
            raise ValueError(f"alphabet labels are not distinct: {labels}")
        object.__setattr__(self, "labels", labels)

    @property
    def size(self) -> int:
        return len(self.labels)

    def index(self, label) -> int:
        return self.labels.index(str(label))

    @classmethod
    def range(cls, n: int) -> "Alphabet":
        return cls(tuple(str(i) for i in range(n)))

    def __len__(self):
        return len(self.labels)


@dataclass(frozen=True, eq=False)
class JointDistribution:
    """Dense pmf over S x Y x Z.  Construct through :func:`validate_joint`."""

    alphabets: tuple
    pmf: np.ndarray = field(repr=False)

    @property
    def shape(self) -> tuple:
        return self.pmf.shape

    def __eq__(self, other):
        if not isinstance(other, JointDistribution):
            return NotImplemented
        return self.alphabets == other.alphabets and np.array_equal(self.pmf, other.pmf)

    def __hash__(self):
        return hash((self.alphabets, self.pmf.tobytes()))


@dataclass(frozen=True, eq=False)
class MarginalPair:
    """The (S,Y) and (S,Z) marginals; all the optimization depends on."""

    p_sy: np.ndarray
    p_sz: np.ndarray

    def __post_init__(self):
        for name in ("p_sy", "p_sz"):
            t = np.array(getattr(self, name), dtype=float)
            if t.ndim != 2:
                raise DimensionMismatch(f"{name} must be two-dimensional")
            if np.any(t < 0):
                raise NegativeMass(f"{name} has negative entries")
            if abs(t.sum() - 1.0) > _NORM_TOL:
                raise NotNormalized(f"{name} sums to {t.sum()!r}")
            t.setflags(write=False)
            object.__setattr__(self, name, t)
        if self.p_sy.shape[0] != self.p_sz.shape[0]:
            raise DimensionMismatch("p_sy and p_sz disagree on |S|")

    @classmethod
    def from_joint(cls, joint) -> "MarginalPair":
        p = _table(joint)
        return cls(p.sum(axis=2), p.sum(axis=1))

    @property
    def p_s(self) -> np.ndarray:
        return self.p_sy.sum(axis=1)

    def s_marginal_gap(self) -> float:
        return float(np.max(np.abs(self.p_sy.sum(axis=1) - self.p_sz.sum(axis=1))))


@dataclass(frozen=True, eq=False)
class ConditionalTable:
    s_index: int
    probs: np.ndarray


def _table(dist) -> np.ndarray:
    if isinstance(dist, JointDistribution):
        return dist.pmf
    return np.asarray(dist, dtype=float)


def validate_joint(raw, alphabets=None) -> JointDistribution:
    """Check a raw (s, y, z) table and wrap it as a :class:`JointDistribution`.

    Entries in ``[-1e-12, 0)`` are clamped to zero and a total within 1e-9
    of one is renormalized.
    """
    table = np.array(raw, dtype=float)
    if table.ndim != 3:
        raise DimensionMismatch(f"expected a 3-axis table, got shape {table.shape}")
    if not np.all(np.isfinite(table)):
        raise ValueError("table contains non-finite entries")
    if alphabets is None:
        alphabets = tuple(Alphabet.range(n) for n in table.shape)
    else:
        alphabets = tuple(a if isinstance(a, Alphabet) else Alphabet(tuple(a)) for a in alphabets)
        if len(alphabets) != 3 or tuple(a.size for a in alphabets) != table.shape:
            raise DimensionMismatch(
                f"alphabet sizes {[a.size for a in alphabets]} do not match table shape {table.shape}"
            )
    if np.any(table < -_NEG_CLAMP):
        raise NegativeMass(f"entry {table.min()!r} is below -1e-12")
    table[table < 0] = 0.0
    total = table.sum()
    if abs(total - 1.0) > _NORM_TOL:
        raise NotNormalized(f"table sums to {total!r}")
    if abs(total - 1.0) > _RENORM_FLOOR:
        table /= total
    table.setflags(write=False)
    return JointDistribution(alphabets, table)


def _axes_of(keep) -> tuple:
    keep = "".join(sorted(set(keep.upper() if isinstance(keep, str) else "".join(keep).upper()),
                          key=AXES.index))
    if not keep or any(c not in AXES for c in keep):
        raise ValueError(f"keep must be a nonempty subset of 'SYZ', got {keep!r}")
    return tuple(AXES.index(c) for c in keep)


def marginal(joint, keep) -> np.ndarray:
    """Sum out every axis not named in ``keep`` (e.g. ``"SY"`` or ``{"S"}``)."""
    p = _table(joint)
    kept = _axes_of(keep)
    dropped = tuple(i for i in range(3) if i not in kept)
    return p.sum(axis=dropped) if dropped else p.copy()


def conditional(joint, s: int) -> ConditionalTable:
    """Q_{YZ|s} = P(s, y, z) / P_S(s)."""
    p = _table(joint)
    ps = p[s].sum()
    if ps <= 0:
        raise ZeroConditioningEvent(f"P_S({s}) = 0")
    return ConditionalTable(s, p[s] / ps)


def entropy(dist) -> InfoValue:
    p = np.asarray(_table(dist), dtype=float).ravel()
    nz = p[p > 0]
    return InfoValue(-np.sum(nz * np.log(nz)))


def kl_divergence(p, q) -> InfoValue:
    p = np.asarray(_table(p), dtype=float).ravel()
    q = np.asarray(_table(q), dtype=float).ravel()
    if p.shape != q.shape:
        raise DimensionMismatch("p and q differ in shape")
    on = p > 0
    if np.any(q[on] <= 0):
        return InfoValue(math.inf)
    return InfoValue(np.sum(p[on] * np.log(p[on] / q[on])))


def mi_table(pxy: np.ndarray) -> float:
    """I(X;Y) of a 2-D table, D(P_XY || P_X P_Y)."""
    pxy = np.asarray(pxy, dtype=float)
    px = pxy.sum(axis=1, keepdims=True)
    py = pxy.sum(axis=0, keepdims=True)
    on = pxy > 0
    # divide in two steps: px * py can underflow when both are tiny
    ratio = pxy / np.where(px > 0, px, 1.0) / np.where(py > 0, py, 1.0)
    return float(np.sum(pxy[on] * np.log(ratio[on])))


def _group(p: np.ndarray, spec: str) -> np.ndarray:
    """Reshape a 3-axis table into 2-D (first group, second group)."""
    a, b = spec
    ia, ib = _axes_of(a), _axes_of(b)
    if set(ia) & set(ib):
        raise ValueError("variable groups overlap")
    keep = ia + ib
    dropped = tuple(i for i in range(3) if i not in keep)
    m = p.sum(axis=dropped) if dropped else p
    # marginal() returns axes in S, Y, Z order; reorder to (group a, group b)
    order = sorted(keep)
    m = np.transpose(m, [order.index(i) for i in keep])
    na = int(np.prod([p.shape[i] for i in ia]))
    return m.reshape(na, -1)


def mutual_information(joint, first="S", second="Y") -> InfoValue:
    """I(first; second) for variable groups such as ``("S", "YZ")``."""
    return InfoValue(mi_table(_group(_table(joint), (first, second))))


def conditional_mutual_information(joint, first="S", second="Y", given="Z") -> InfoValue:
    """I(first; second | given), evaluated as sum_g P(g) I(first; second | g)."""
    p = _table(joint)
    ig = _axes_of(given)
    if len(ig) != 1:
        raise ValueError("conditioning on a single variable only")
    g = ig[0]
    total = 0.0
    for k in range(p.shape[g]):
        slab = np.take(p, [k], axis=g)
        w = slab.sum()
        if w <= 0:
            continue
        total += w * mi_table(_group(slab / w, (first, second)))
    return InfoValue(total)


def co_information(joint) -> float:
    """CoI(S;Y;Z) = I(S;Y) - I(S;Y|Z); may be negative."""
    return float(mutual_information(joint, "S", "Y") - conditional_mutual_information(joint, "S", "Y", "Z"))


def mi_s_yz(p: np.ndarray) -> float:
    """I(S; Y,Z) of a raw (s, y, z) array; the solver's objective."""
    return mi_table(p.reshape(p.shape[0], -1))


# --------------------------------------------------------------------------
# generators


def gen_copy(k: int) -> JointDistribution:
    """S = (Y, Z) with Y, Z independent and uniform on k symbols."""
    if k < 2:
        raise ValueError("k must be at least 2")
    p = np.zeros((k * k, k, k))
    for y in range(k):
        for z in range(k):
            p[y * k + z, y, z] = 1.0 / (k * k)
    s_labels = tuple(f"{y}_{z}" for y in range(k) for z in range(k))
    return validate_joint(p, (Alphabet(s_labels), Alphabet.range(k), Alphabet.range(k)))


_GATES = {
    "XOR": lambda y, z: y ^ z,
    "AND": lambda y, z: y & z,
}


def gen_binary_gate(gate: str) -> JointDistribution:
    """S = gate(Y, Z) for independent uniform bits Y, Z."""
    try:
        fn = _GATES[gate.upper()]
    except KeyError:
        raise ValueError(f"unknown gate {gate!r}; choose from {sorted(_GATES)}") from None
    p = np.zeros((2, 2, 2))
    for y in range(2):
        for z in range(2):
            p[fn(y, z), y, z] += 0.25
    return validate_joint(p)


def gen_simplex_uniform(sizes: Sequence[int], seed: int, count: int) -> Iterator[JointDistribution]:
    """Flat-Dirichlet joints built from normalized unit exponentials."""
    sizes = tuple(int(n) for n in sizes)
    if len(sizes) != 3 or min(sizes) < 2:
        raise ValueError("sizes must be three integers >= 2")
    rng = np.random.default_rng(seed)
    for _ in range(count):
        e = rng.standard_exponential(sizes)
        yield validate_joint(e / e.sum())


def product_joint(p, q) -> JointDistribution:
    """Joint of two independent copies, on the paired alphabets S^2, Y^2, Z^2."""
    a, b = _table(p), _table(q)
    t = np.einsum("ijk,lmn->iljmkn", a, b).reshape(
        a.shape[0] * b.shape[0], a.shape[1] * b.shape[1], a.shape[2] * b.shape[2]
    )
    return validate_joint(t / t.sum())
