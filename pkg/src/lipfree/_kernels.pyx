# cython: language_level=3
"""Compiled inner loops. Semantics match ``_kernels_py`` bit for bit on float64."""

import numpy as np
cimport numpy as cnp
from libc.math cimport fabs, INFINITY

cnp.import_array()


def lipschitz_number(const double[::1] f, const double[:, ::1] d):
    cdef Py_ssize_t n = f.shape[0], i, j
    cdef double best = 0.0, s
    for i in range(n):
        for j in range(i + 1, n):
            s = fabs(f[i] - f[j]) / d[i, j]
            if s > best:
                best = s
    return best


def lipschitz_argmax(const double[::1] f, const double[:, ::1] d):
    cdef Py_ssize_t n = f.shape[0], i, j, bi = -1, bj = -1
    cdef double best = 0.0, s
    for i in range(n):
        for j in range(i + 1, n):
            s = fabs(f[i] - f[j]) / d[i, j]
            if s > best:
                best = s
                bi = i
                bj = j
    return best, bi, bj


def lipschitz_many(const double[:, ::1] F, const double[:, ::1] d):
    """Row-wise Lipschitz numbers of a batch of functions."""
    cdef Py_ssize_t m = F.shape[0], n = F.shape[1], t, i, j
    cdef double best, s
    out = np.empty(m, dtype=np.float64)
    cdef double[::1] o = out
    for t in range(m):
        best = 0.0
        for i in range(n):
            for j in range(i + 1, n):
                s = fabs(F[t, i] - F[t, j]) / d[i, j]
                if s > best:
                    best = s
        o[t] = best
    return out


def first_triangle_violation(const double[:, ::1] d, double rtol, double atol):
    cdef Py_ssize_t n = d.shape[0], i, j, k
    cdef double slack
    for i in range(n):
        for j in range(n):
            for k in range(n):
                slack = rtol * d[i, k]
                if slack < atol:
                    slack = atol
                if d[i, k] > d[i, j] + d[j, k] + slack:
                    return (i, j, k)
    return None


def convexity_scan(const double[:, ::1] d, double resolution):
    cdef Py_ssize_t n = d.shape[0], p, q, r, bp = -1, bq = -1
    cdef double worst = -1.0, best, detour
    if n == 2:
        return INFINITY, 0, 1
    for p in range(n):
        for q in range(p + 1, n):
            if d[p, q] <= resolution:
                continue
            best = INFINITY
            for r in range(n):
                if r == p or r == q:
                    continue
                detour = d[p, r] + d[r, q] - d[p, q]
                if detour < best:
                    best = detour
            if best > worst:
                worst = best
                bp = p
                bq = q
    if bp < 0:
        return 0.0, -1, -1
    if worst < 0.0:
        worst = 0.0
    return worst, bp, bq
