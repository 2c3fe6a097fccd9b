"""Real functions on finite metric spaces: Lipschitz numbers, norms, lattice ops."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from . import kernels
from .config import DEFAULT_TOLERANCE, EXACT, TolerancePolicy
from .metric_core import MetricSpace


class SpaceMismatchError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class LipFunction:
    """One finite value per point of ``space``.

    Membership in the vanishing-at-base subspace is a predicate
    (:meth:`vanishes_at_base`), not a separate type.
    """

    space: MetricSpace
    values: np.ndarray

    def __post_init__(self):
        v = self.values
        if v.ndim != 1 or v.shape[0] != self.space.n:
            raise SpaceMismatchError(f"{v.shape} values for a space of {self.space.n} points")
        if v.dtype != object and not np.all(np.isfinite(v)):
            raise ValueError("function values must be finite")
        v.flags.writeable = False

    @classmethod
    def of(cls, space: MetricSpace, values) -> "LipFunction":
        if space.exact:
            arr = np.empty(space.n, dtype=object)
            arr[:] = [x if isinstance(x, Fraction) else Fraction(x) for x in values]
        else:
            arr = np.array(values, dtype=np.float64)
        return cls(space, arr)

    @classmethod
    def constant(cls, space: MetricSpace, c=1) -> "LipFunction":
        return cls.of(space, [c] * space.n)

    def __getitem__(self, label):
        return self.values[self.space.index(label)]

    def _lift(self, other):
        if isinstance(other, LipFunction):
            _same_space(self, other)
            return other.values
        return other

    def __add__(self, other):
        return LipFunction(self.space, self.values + self._lift(other))

    __radd__ = __add__

    def __sub__(self, other):
        return LipFunction(self.space, self.values - self._lift(other))

    def __rsub__(self, other):
        return LipFunction(self.space, self._lift(other) - self.values)

    def __mul__(self, a):
        return LipFunction(self.space, self.values * a)

    __rmul__ = __mul__

    def __truediv__(self, a):
        return LipFunction(self.space, self.values / a)

    def __neg__(self):
        return LipFunction(self.space, -self.values)

    def vanishes_at_base(self, policy: TolerancePolicy = DEFAULT_TOLERANCE) -> bool:
        if not self.space.pointed:
            raise ValueError("space has no base point")
        return _policy(self, policy).is_zero(self.values[self.space.base_index])

    def __repr__(self):
        return f"LipFunction({list(self.values)!r})"


def _policy(f: LipFunction, policy: TolerancePolicy) -> TolerancePolicy:
    return EXACT if f.space.exact else policy


def same_space(X: MetricSpace, Y: MetricSpace) -> bool:
    if X is Y:
        return True
    return (
        X.point_ids == Y.point_ids
        and X.base_index == Y.base_index
        and X.dist.dtype == Y.dist.dtype
        and np.array_equal(X.dist, Y.dist)
    )


def _same_space(f: LipFunction, g: LipFunction):
    if not same_space(f.space, g.space):
        raise SpaceMismatchError("functions live on different spaces")


def lipschitz_number(f: LipFunction):
    """Largest slope ``|f(p) - f(q)| / d(p, q)``; 0 on a one-point space."""
    return kernels.lipschitz_number(f.values, f.space.dist)


def steepest_pair(f: LipFunction):
    """``(slope, i, j)`` for the first pair attaining the Lipschitz number."""
    return kernels.lipschitz_argmax(f.values, f.space.dist)


def sup_norm(f: LipFunction):
    if f.space.n == 0:
        return 0.0
    return np.abs(f.values).max()


def lip_norm(f: LipFunction):
    """``max(L(f), ||f||_inf)``, the norm of bounded Lipschitz functions."""
    return max(lipschitz_number(f), sup_norm(f))


def join(f: LipFunction, g: LipFunction) -> LipFunction:
    _same_space(f, g)
    return LipFunction(f.space, np.maximum(f.values, g.values))


def meet(f: LipFunction, g: LipFunction) -> LipFunction:
    _same_space(f, g)
    return LipFunction(f.space, np.minimum(f.values, g.values))


def _stack(fs: Sequence[LipFunction]) -> np.ndarray:
    fs = list(fs)
    if not fs:
        raise ValueError("empty family")
    for g in fs[1:]:
        _same_space(fs[0], g)
    return np.vstack([g.values for g in fs])


def family_join(fs: Iterable[LipFunction]) -> LipFunction:
    fs = list(fs)
    F = _stack(fs)
    return LipFunction(fs[0].space, F.max(axis=0))


def family_meet(fs: Iterable[LipFunction]) -> LipFunction:
    fs = list(fs)
    F = _stack(fs)
    return LipFunction(fs[0].space, F.min(axis=0))


def extend_by_zero(f: LipFunction, Y: MetricSpace) -> LipFunction:
    """Carry ``f`` on X to ``Y = augment_base(X)``, setting 0 at the new base.

    ``Y`` must list X's points first, in order, with the base last.
    """
    X = f.space
    if X.pointed:
        raise SpaceMismatchError("extend_by_zero expects a function on an unpointed space")
    if Y.base_index != X.n or Y.n != X.n + 1 or Y.point_ids[: X.n] != X.point_ids:
        raise SpaceMismatchError("Y is not the base-point augmentation of f's space")
    vals = np.empty(Y.n, dtype=f.values.dtype)
    vals[: X.n] = f.values
    vals[X.n] = Fraction(0) if Y.exact else 0.0
    return LipFunction(Y, vals)


def rebase(f: LipFunction, label) -> LipFunction:
    """Subtract the value at ``label`` so the result vanishes there."""
    i = f.space.index(label)
    return LipFunction(f.space, f.values - f.values[i])


def liminf_limit(fs: Sequence[LipFunction]) -> LipFunction:
    """Pointwise ``max_n min_{k >= n} f_k`` over a finite sequence."""
    fs = list(fs)
    F = tail_meets(fs)
    return LipFunction(fs[0].space, F.max(axis=0))


def tail_meets(fs: Sequence[LipFunction]) -> np.ndarray:
    """Row ``n`` holds ``min_{k >= n} f_k`` pointwise."""
    F = _stack(fs)
    return np.minimum.accumulate(F[::-1], axis=0)[::-1]


def h_function(X: MetricSpace, radius) -> LipFunction:
    """``p -> min(d(p, e), radius)``."""
    if not radius > 0:
        raise ValueError(f"radius must be positive, got {radius}")
    rho = X.base_distances()
    r = Fraction(radius) if X.exact else float(radius)
    if X.exact:
        vals = np.array([min(x, r) for x in rho], dtype=object)
    else:
        vals = np.minimum(rho, r)
    return LipFunction(X, vals)


def ideal_membership(f: LipFunction, K, policy: TolerancePolicy = DEFAULT_TOLERANCE) -> bool:
    """True iff ``f`` vanishes (up to ``policy.atol``) on the index set ``K``.

    ``K`` must contain the base point.
    """
    K = np.asarray(list(K), dtype=np.intp)
    X = f.space
    if not X.pointed:
        raise ValueError("ideal membership needs a pointed space")
    if X.base_index not in K:
        raise ValueError("the subset K must contain the base point")
    pol = _policy(f, policy)
    return all(pol.is_zero(v) for v in f.values[K])


def mcshane_extension(space: MetricSpace, known: dict, lipschitz=None) -> LipFunction:
    """Largest ``L``-Lipschitz extension ``min_q f(q) + L d(p, q)`` of values on a subset.

    ``known`` maps point indices to values. ``lipschitz`` defaults to the
    Lipschitz number of the prescribed values.
    """
    if not known:
        raise ValueError("no prescribed values")
    idx = np.array(sorted(known), dtype=np.intp)
    vals = np.array([known[i] for i in idx], dtype=space.dist.dtype)
    if lipschitz is None:
        lipschitz = kernels.lipschitz_number(vals, np.ascontiguousarray(space.dist[np.ix_(idx, idx)]))
    cand = vals[None, :] + lipschitz * space.dist[:, idx]
    out = cand.min(axis=1)
    out[idx] = vals
    return LipFunction(space, out)
