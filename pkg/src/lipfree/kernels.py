"""Kernel dispatch: compiled extension when importable, numpy fallback otherwise.

Set ``LIPFREE_PURE=1`` before import to force the fallback. Object arrays
(exact Fraction arithmetic) always take the fallback path.
"""

import os

import numpy as np

from . import _kernels_py as _py

_ext = None
if os.environ.get("LIPFREE_PURE") != "1":
    try:
        from . import _kernels as _ext
    except ImportError:  # extension not built
        _ext = None

BACKEND = "cython" if _ext is not None else "python"


def _fast(*arrays):
    return _ext is not None and all(a.dtype == np.float64 for a in arrays)


def _c(a):
    return np.ascontiguousarray(a, dtype=np.float64)


def lipschitz_number(f, d):
    if _fast(f, d):
        return _ext.lipschitz_number(_c(f), _c(d))
    return _py.lipschitz_number(f, d)


def lipschitz_argmax(f, d):
    if _fast(f, d):
        return _ext.lipschitz_argmax(_c(f), _c(d))
    return _py.lipschitz_argmax(f, d)


def lipschitz_many(F, d):
    if _fast(F, d):
        return _ext.lipschitz_many(_c(F), _c(d))
    return _py.lipschitz_many(F, d)


def first_triangle_violation(d, rtol, atol):
    if _fast(d):
        return _ext.first_triangle_violation(_c(d), float(rtol), float(atol))
    return _py.first_triangle_violation(d, rtol, atol)


def convexity_scan(d, resolution):
    if _fast(d):
        return _ext.convexity_scan(_c(d), float(resolution))
    return _py.convexity_scan(d, resolution)
