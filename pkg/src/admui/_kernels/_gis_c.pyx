# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled generalized-iterative-scaling kernels.

Same interface and semantics as ``_gis_py``; see that module for the
reference description of every routine.
"""

import numpy as np

from libc.math cimport sqrt, pow, fabs, INFINITY

cdef enum:
    MODE_DISTANCE = 0
    MODE_ETA_GAP = 1

cdef enum:
    STATUS_CONVERGED = 0
    STATUS_CAP = 1
    STATUS_DEGENERATE = 2

BACKEND = "cython"


cdef inline double _scale(double target, double mass, double expo) noexcept nogil:
    if expo == 0.5:
        return sqrt(target / mass)
    return pow(target / mass, expo)


cdef int _project(double[:, ::1] b, const double[::1] ty, const double[::1] tz,
                  double gamma, int mode, double tol, long max_iter,
                  double[::1] rs, double[::1] cs, double[::1] fy, double[::1] fz,
                  long *n_out, double *sq_out, double *gap_out) noexcept nogil:
    """Iterate b in place until the stop rule fires; b is left unnormalized."""
    cdef Py_ssize_t ny = b.shape[0], nz = b.shape[1]
    cdef Py_ssize_t y, z
    cdef double expo = 0.5 / gamma
    cdef double tot, tot_new, d, v, sq = INFINITY, gap, minpos
    cdef long n = 0
    cdef int status = STATUS_CAP

    for y in range(ny):
        for z in range(nz):
            if ty[y] <= 0.0 or tz[z] <= 0.0:
                b[y, z] = 0.0

    while True:
        for y in range(ny):
            rs[y] = 0.0
        for z in range(nz):
            cs[z] = 0.0
        tot = 0.0
        minpos = INFINITY
        for y in range(ny):
            for z in range(nz):
                v = b[y, z]
                rs[y] += v
                cs[z] += v
                if v > 0.0 and v < minpos:
                    minpos = v
        for y in range(ny):
            tot += rs[y]
        if tot <= 0.0:
            status = STATUS_DEGENERATE
            break

        if mode == MODE_ETA_GAP:
            gap = 0.0
            for y in range(1, ny):
                gap += fabs(rs[y] / tot - ty[y])
            for z in range(1, nz):
                gap += fabs(cs[z] / tot - tz[z])
            if gap <= tol * (minpos / tot):
                status = STATUS_CONVERGED
                break

        if n >= max_iter:
            status = STATUS_CAP
            break

        for y in range(ny):
            if ty[y] > 0.0:
                if rs[y] <= 0.0:
                    n_out[0] = n
                    return STATUS_DEGENERATE
                fy[y] = _scale(ty[y], rs[y], expo)
            else:
                fy[y] = 0.0
        for z in range(nz):
            if tz[z] > 0.0:
                if cs[z] <= 0.0:
                    n_out[0] = n
                    return STATUS_DEGENERATE
                fz[z] = _scale(tz[z], cs[z], expo)
            else:
                fz[z] = 0.0

        if mode == MODE_DISTANCE:
            tot_new = 0.0
            for y in range(ny):
                for z in range(nz):
                    tot_new += b[y, z] * fy[y] * fz[z]
            sq = 0.0
            for y in range(ny):
                for z in range(nz):
                    v = b[y, z] * fy[y] * fz[z]
                    d = v / tot_new - b[y, z] / tot
                    sq += d * d
                    b[y, z] = v
            n += 1
            if sq <= tol:
                status = STATUS_CONVERGED
                break
        else:
            for y in range(ny):
                for z in range(nz):
                    b[y, z] = b[y, z] * fy[y] * fz[z]
            n += 1

    # final expectation gap on the normalized iterate
    for y in range(ny):
        rs[y] = 0.0
    for z in range(nz):
        cs[z] = 0.0
    tot = 0.0
    for y in range(ny):
        for z in range(nz):
            rs[y] += b[y, z]
            cs[z] += b[y, z]
    for y in range(ny):
        tot += rs[y]
    gap = 0.0
    if tot > 0.0:
        for y in range(1, ny):
            gap += fabs(rs[y] / tot - ty[y])
        for z in range(1, nz):
            gap += fabs(cs[z] / tot - tz[z])
    n_out[0] = n
    sq_out[0] = sq
    gap_out[0] = gap
    return status


def gis_step(b, ty, tz, double gamma=1.0):
    cdef double[:, ::1] src = np.ascontiguousarray(b, dtype=np.float64)
    cdef const double[::1] vy = np.ascontiguousarray(ty, dtype=np.float64)
    cdef const double[::1] vz = np.ascontiguousarray(tz, dtype=np.float64)
    cdef Py_ssize_t ny = src.shape[0], nz = src.shape[1], y, z
    cdef double expo = 0.5 / gamma
    out = np.empty((ny, nz))
    cdef double[:, ::1] o = out
    rs = np.zeros(ny)
    cs = np.zeros(nz)
    cdef double[::1] r = rs, c = cs
    fyv = np.zeros(ny)
    fzv = np.zeros(nz)
    cdef double[::1] fy = fyv, fz = fzv
    for y in range(ny):
        for z in range(nz):
            r[y] += src[y, z]
            c[z] += src[y, z]
    for y in range(ny):
        if vy[y] > 0.0:
            if r[y] <= 0.0:
                return None
            fy[y] = _scale(vy[y], r[y], expo)
    for z in range(nz):
        if vz[z] > 0.0:
            if c[z] <= 0.0:
                return None
            fz[z] = _scale(vz[z], c[z], expo)
    for y in range(ny):
        for z in range(nz):
            o[y, z] = src[y, z] * fy[y] * fz[z]
    return out


def project(b0, ty, tz, double gamma, int mode, double tol, long max_iter):
    """Run one projection; returns (b_unnormalized, n, sq_step, eta_gap, status)."""
    b = np.array(b0, dtype=np.float64, order="C", copy=True)
    cdef double[:, ::1] bv = b
    cdef const double[::1] vy = np.ascontiguousarray(ty, dtype=np.float64)
    cdef const double[::1] vz = np.ascontiguousarray(tz, dtype=np.float64)
    cdef Py_ssize_t ny = bv.shape[0], nz = bv.shape[1]
    cdef double[::1] rs = np.empty(ny), cs = np.empty(nz), fy = np.empty(ny), fz = np.empty(nz)
    cdef long n = 0
    cdef double sq = 0.0, gap = 0.0
    cdef int status
    with nogil:
        status = _project(bv, vy, vz, gamma, mode, tol, max_iter, rs, cs, fy, fz, &n, &sq, &gap)
    return b, n, sq, gap, status


def project_many(r, ty_rows, tz_rows, double gamma, int mode, double tol, long max_iter):
    """Project r onto every (ty_rows[k], tz_rows[k]) family.

    Returns normalized tables (k, Y, Z) plus per-projection iteration counts,
    statuses, last squared steps and expectation gaps.
    """
    cdef const double[:, ::1] rv = np.ascontiguousarray(r, dtype=np.float64)
    cdef const double[:, ::1] TY = np.ascontiguousarray(ty_rows, dtype=np.float64)
    cdef const double[:, ::1] TZ = np.ascontiguousarray(tz_rows, dtype=np.float64)
    cdef Py_ssize_t m = TY.shape[0], ny = rv.shape[0], nz = rv.shape[1]
    cdef Py_ssize_t k, y, z
    out = np.empty((m, ny, nz))
    iters = np.zeros(m, dtype=np.int64)
    status = np.zeros(m, dtype=np.int32)
    sqs = np.zeros(m)
    gaps = np.zeros(m)
    cdef double[:, :, ::1] ov = out
    cdef long long[::1] itv = iters
    cdef int[::1] stv = status
    cdef double[::1] sqv = sqs, gpv = gaps
    cdef double[::1] rs = np.empty(ny), cs = np.empty(nz), fy = np.empty(ny), fz = np.empty(nz)
    cdef long n = 0
    cdef double sq = 0.0, gap = 0.0, tot
    with nogil:
        for k in range(m):
            for y in range(ny):
                for z in range(nz):
                    ov[k, y, z] = rv[y, z]
            stv[k] = _project(ov[k], TY[k], TZ[k], gamma, mode, tol, max_iter,
                              rs, cs, fy, fz, &n, &sq, &gap)
            itv[k] = n
            sqv[k] = sq
            gpv[k] = gap
            tot = 0.0
            for y in range(ny):
                for z in range(nz):
                    tot += ov[k, y, z]
            if tot > 0.0:
                for y in range(ny):
                    for z in range(nz):
                        ov[k, y, z] = ov[k, y, z] / tot
    return out, iters, status, sqs, gaps
