"""Pure numpy generalized iterative scaling (reference backend).

One GIS step with damping parameter ``gamma`` maps ``b`` to::

    b'(y,z) = b(y,z) * (ty(y) / row(y)) ** (1/(2 gamma)) * (tz(z) / col(z)) ** (1/(2 gamma))

where ``row``/``col`` are the current row and column sums of ``b``.  Rows
with ``ty == 0`` and columns with ``tz == 0`` are pinned to zero before the
first step.

Stop rules (``mode``):

``MODE_DISTANCE``
    squared L2 distance between successive normalized iterates ``<= tol``.
``MODE_ETA_GAP``
    checked before each step: ``gap(q) <= tol * min(q)`` where ``q`` is the
    normalized iterate, ``min`` runs over its positive entries, and ``gap``
    is the L1 marginal mismatch skipping the first symbol of each axis.

Status codes: 0 converged, 1 iteration cap, 2 degenerate iterate.
"""

import numpy as np

MODE_DISTANCE = 0
MODE_ETA_GAP = 1

STATUS_CONVERGED = 0
STATUS_CAP = 1
STATUS_DEGENERATE = 2

BACKEND = "python"


def _factors(b, ty, tz, expo):
    rs = b.sum(axis=1)
    cs = b.sum(axis=0)
    if np.any((ty > 0) & (rs <= 0)) or np.any((tz > 0) & (cs <= 0)):
        return None
    with np.errstate(divide="ignore", invalid="ignore"):
        ry = np.where(ty > 0, ty / rs, 0.0)
        rz = np.where(tz > 0, tz / cs, 0.0)
    if expo == 0.5:
        return np.sqrt(ry), np.sqrt(rz)
    return ry ** expo, rz ** expo


def _gap(rs, cs, tot, ty, tz):
    return float(np.abs(rs[1:] / tot - ty[1:]).sum() + np.abs(cs[1:] / tot - tz[1:]).sum())


def gis_step(b, ty, tz, gamma=1.0):
    b = np.asarray(b, dtype=float)
    f = _factors(b, np.asarray(ty, float), np.asarray(tz, float), 0.5 / gamma)
    if f is None:
        return None
    fy, fz = f
    return b * fy[:, None] * fz[None, :]


def project(b0, ty, tz, gamma, mode, tol, max_iter):
    """Returns ``(b_unnormalized, n, sq_step, eta_gap, status)``."""
    ty = np.asarray(ty, dtype=float)
    tz = np.asarray(tz, dtype=float)
    b = np.array(b0, dtype=float, copy=True)
    b[~((ty > 0)[:, None] & (tz > 0)[None, :])] = 0.0
    expo = 0.5 / gamma
    n = 0
    sq = np.inf
    status = STATUS_CAP
    while True:
        tot = b.sum()
        if tot <= 0:
            status = STATUS_DEGENERATE
            break
        if mode == MODE_ETA_GAP:
            gap = _gap(b.sum(axis=1), b.sum(axis=0), tot, ty, tz)
            if gap <= tol * (b[b > 0].min() / tot):
                status = STATUS_CONVERGED
                break
        if n >= max_iter:
            status = STATUS_CAP
            break
        f = _factors(b, ty, tz, expo)
        if f is None:
            return b, n, 0.0, 0.0, STATUS_DEGENERATE
        new = b * f[0][:, None] * f[1][None, :]
        n += 1
        if mode == MODE_DISTANCE:
            sq = float(np.sum((new / new.sum() - b / tot) ** 2))
            b = new
            if sq <= tol:
                status = STATUS_CONVERGED
                break
        else:
            b = new
    tot = b.sum()
    gap = _gap(b.sum(axis=1), b.sum(axis=0), tot, ty, tz) if tot > 0 else 0.0
    return b, n, sq, gap, status


def project_many(r, ty_rows, tz_rows, gamma, mode, tol, max_iter):
    m = len(ty_rows)
    r = np.asarray(r, dtype=float)
    out = np.empty((m,) + r.shape)
    iters = np.zeros(m, dtype=np.int64)
    status = np.zeros(m, dtype=np.int32)
    sqs = np.zeros(m)
    gaps = np.zeros(m)
    for k in range(m):
        b, iters[k], sqs[k], gaps[k], status[k] = project(r, ty_rows[k], tz_rows[k], gamma, mode, tol, max_iter)
        tot = b.sum()
        out[k] = b / tot if tot > 0 else b
    return out, iters, status, sqs, gaps
