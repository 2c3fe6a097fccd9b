"""Dense tableau simplex for ``max c.x  s.t.  A x <= b, x >= 0`` with ``b >= 0``.

The origin is feasible, so no phase one is needed. Pivoting follows Bland's
rule, which rules out cycling and makes the optimum (including the choice
among tied optimal vertices) a deterministic function of the input.

Works on float64 arrays with a pivot tolerance, or on object arrays of
Fractions with exact arithmetic.
"""

from dataclasses import dataclass
from fractions import Fraction

import numpy as np


class SimplexError(RuntimeError):
    pass


@dataclass
class SimplexResult:
    x: np.ndarray
    value: object
    iterations: int


def maximize(c, A, b, *, eps=1e-12, max_iter=None) -> SimplexResult:
    exact = A.dtype == object
    if exact:
        eps = 0
    m, n = A.shape
    if np.any(b < 0):
        raise SimplexError("right-hand side must be nonnegative")
    dtype = object if exact else np.float64
    T = np.zeros((m + 1, n + m + 1), dtype=dtype)
    T[:m, :n] = A
    T[:m, n : n + m] = np.eye(m, dtype=int) if exact else np.eye(m)
    T[:m, -1] = b
    T[m, :n] = -c
    if exact:
        # int / int would silently produce floats during pivoting
        T = np.vectorize(Fraction, otypes=[object])(T)
    basis = list(range(n, n + m))
    if max_iter is None:
        max_iter = 50 * (n + m) + 1000

    it = 0
    obj = T[m, :-1]
    while True:
        neg = np.flatnonzero(obj < -eps)
        if neg.size == 0:
            break
        entering = int(neg[0])
        it += 1
        if it > max_iter:
            raise SimplexError(f"no convergence after {max_iter} pivots")
        col = T[:m, entering]
        rows = np.flatnonzero(col > eps).tolist()
        if not rows:
            raise SimplexError("objective is unbounded")
        ratios = [T[i, -1] / col[i] for i in rows]
        best = min(ratios)
        slack = 0 if exact else eps * max(1.0, abs(best))
        ties = [i for i, r in zip(rows, ratios) if r <= best + slack]
        leave = min(ties, key=lambda i: basis[i])
        _pivot(T, leave, entering)
        basis[leave] = entering
        if not exact:
            rhs = T[:m, -1]
            rhs[(rhs < 0) & (rhs > -eps * 1e3)] = 0.0

    x = np.zeros(n, dtype=dtype)
    if exact:
        x[:] = Fraction(0)
    for i, j in enumerate(basis):
        if j < n:
            x[j] = T[i, -1]
    return SimplexResult(x=x, value=T[m, -1], iterations=it)


def _pivot(T, r, c):
    T[r] = T[r] / T[r, c]
    col = T[:, c].copy()
    col[r] = 0
    nz = np.flatnonzero(col != 0)
    if nz.size:
        T[nz] -= np.outer(col[nz], T[r])
