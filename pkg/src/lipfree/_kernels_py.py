"""Pure numpy implementations of the hot kernels.

Used when the compiled extension is unavailable, when ``LIPFREE_PURE=1`` is
set, and always for object (Fraction) arrays in exact mode.
"""

from functools import lru_cache

import numpy as np


@lru_cache(maxsize=64)
def _upper_pairs(n):
    return np.triu_indices(n, 1)


def _slopes(f, d):
    iu, ju = _upper_pairs(len(f))
    return np.abs(f[iu] - f[ju]) / d[iu, ju]


def lipschitz_number(f, d):
    if len(f) < 2:
        return 0.0
    return _slopes(f, d).max()


def lipschitz_argmax(f, d):
    if len(f) < 2:
        return 0.0, -1, -1
    s = _slopes(f, d)
    k = int(np.argmax(s))
    if not s[k] > 0:
        return s[k], -1, -1
    iu, ju = _upper_pairs(len(f))
    return s[k], int(iu[k]), int(ju[k])


def lipschitz_many(F, d):
    n = F.shape[1]
    if n < 2:
        return np.zeros(F.shape[0])
    iu, ju = _upper_pairs(n)
    return (np.abs(F[:, iu] - F[:, ju]) / d[iu, ju]).max(axis=1)


def first_triangle_violation(d, rtol, atol):
    n = d.shape[0]
    exact = d.dtype == object
    for i in range(n):
        row = d[i]
        if exact and rtol == 0 and atol == 0:
            bound = row[:, None] + d
        else:
            slack = np.maximum(atol, rtol * row)
            bound = row[:, None] + d + slack[None, :]
        viol = row[None, :] > bound
        if viol.any():
            j, k = divmod(int(np.argmax(viol)), n)
            return (i, j, k)
    return None


def convexity_scan(d, resolution):
    n = d.shape[0]
    if n == 2:
        return float("inf"), 0, 1
    worst, bp, bq = -1.0, -1, -1
    idx = np.arange(n)
    for p in range(n):
        detour = (d[p][None, :] + d) - d[p][:, None]
        detour = detour.astype(object) if d.dtype == object else detour
        detour[:, p] = np.inf
        detour[idx, idx] = np.inf
        best = detour.min(axis=1)
        for q in range(p + 1, n):
            if d[p, q] <= resolution:
                continue
            if best[q] > worst:
                worst, bp, bq = best[q], p, q
    if bp < 0:
        return 0.0, -1, -1
    if worst < 0:
        worst = 0.0
    return worst, bp, bq
