# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled Monte Carlo inner loops; see ``_kernels_py`` for the reference."""
import numpy as np
from libc.math cimport cbrt, sqrt, sin, cos, log1p, exp, fabs, isnan, INFINITY, M_PI, M_LN2

MIXED = 0
PURE = 1


cdef inline void _bloch(const double[:, ::1] u, Py_ssize_t j, int mode, double* r) noexcept nogil:
    cdef double y, c, s, phi
    if mode == 0:
        y = cbrt(1.0 - 2.0 * u[j, 0])
        c = 1.0 - 2.0 * u[j, 3]
        s = 2.0 * sqrt(u[j, 3] * (1.0 - u[j, 3]))
        phi = 2.0 * M_PI * u[j, 2]
    else:
        y = 1.0
        c = 1.0 - 2.0 * u[j, 0]
        s = 2.0 * sqrt(u[j, 0] * (1.0 - u[j, 0]))
        phi = 2.0 * M_PI * u[j, 1]
    r[0] = y * s * cos(phi)
    r[1] = y * s * sin(phi)
    r[2] = y * c


def _check(u, mode):
    if mode not in (0, 1):
        raise ValueError(f"unknown mode {mode}")
    u = np.ascontiguousarray(u, dtype=np.float64)
    if u.ndim != 2 or u.shape[1] < (6 if mode == 0 else 2):
        raise ValueError(f"bad uniform array shape {u.shape} for mode {mode}")
    return u


def bloch_from_uniforms(u, int mode):
    u = _check(u, mode)
    cdef const double[:, ::1] uv = u
    cdef Py_ssize_t n = uv.shape[0], j
    out = np.empty((n, 3))
    cdef double[:, ::1] ov = out
    cdef double r[3]
    with nogil:
        for j in range(n):
            _bloch(uv, j, mode, r)
            ov[j, 0] = r[0]
            ov[j, 1] = r[1]
            ov[j, 2] = r[2]
    return out


cdef inline double _logl(const double* r, const double* npl, const double* nmi) noexcept nogil:
    cdef double acc = 0.0
    cdef int i
    for i in range(3):
        if npl[i] > 0:
            acc += npl[i] * (log1p(r[i]) - M_LN2)
        if nmi[i] > 0:
            acc += nmi[i] * (log1p(-r[i]) - M_LN2)
    return acc


def loglik_moments(u, int mode, nplus, nminus):
    u = _check(u, mode)
    cdef const double[:, ::1] uv = u
    cdef Py_ssize_t n = uv.shape[0], j
    cdef double npl[3]
    cdef double nmi[3]
    cdef int i
    for i in range(3):
        npl[i] = float(nplus[i])
        nmi[i] = float(nminus[i])
    cdef double r[3]
    cdef double lmax = -INFINITY, v, w, scale, sw = 0.0, sw2 = 0.0, sx = 0.0, sy = 0.0, sz = 0.0
    cdef Py_ssize_t n_nan = 0
    # single pass; accumulators are rescaled whenever the running max grows
    with nogil:
        for j in range(n):
            _bloch(uv, j, mode, r)
            v = _logl(r, npl, nmi)
            if isnan(v) or v == INFINITY:
                n_nan += 1
                continue
            if v == -INFINITY:
                continue
            if v > lmax:
                scale = exp(lmax - v)
                sw *= scale
                sw2 *= scale * scale
                sx *= scale
                sy *= scale
                sz *= scale
                lmax = v
            w = exp(v - lmax)
            sw += w
            sw2 += w * w
            sx += w * r[0]
            sy += w * r[1]
            sz += w * r[2]
    return lmax, sw, sw2, sx, sy, sz, n_nan


def tophat_moments(u, int mode, means, active, double eps):
    u = _check(u, mode)
    cdef const double[:, ::1] uv = u
    cdef Py_ssize_t n = uv.shape[0], j, count = 0
    cdef double m[3]
    cdef int act[3]
    cdef int i
    for i in range(3):
        m[i] = float(means[i])
        act[i] = 1 if active[i] else 0
    cdef double y, c, sn, phi, rx, ry, rz
    cdef double sx = 0.0, sy = 0.0, sz = 0.0
    with nogil:
        for j in range(n):
            # z needs no trig, so test it before computing x and y
            if mode == 0:
                y = cbrt(1.0 - 2.0 * uv[j, 0])
                c = 1.0 - 2.0 * uv[j, 3]
            else:
                y = 1.0
                c = 1.0 - 2.0 * uv[j, 0]
            rz = y * c
            if act[2] and fabs(rz - m[2]) > eps:
                continue
            if mode == 0:
                sn = 2.0 * sqrt(uv[j, 3] * (1.0 - uv[j, 3]))
                phi = 2.0 * M_PI * uv[j, 2]
            else:
                sn = 2.0 * sqrt(uv[j, 0] * (1.0 - uv[j, 0]))
                phi = 2.0 * M_PI * uv[j, 1]
            rx = y * sn * cos(phi)
            if act[0] and fabs(rx - m[0]) > eps:
                continue
            ry = y * sn * sin(phi)
            if act[1] and fabs(ry - m[1]) > eps:
                continue
            count += 1
            sx += rx
            sy += ry
            sz += rz
    return count, sx, sy, sz
