"""Finite (pointed) metric spaces and the constructions built on them.

A :class:`MetricSpace` is an immutable dense distance matrix plus point labels
and an optional base point. Every constructor in this module returns a space
that passes :func:`validate`.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple, Optional, Sequence

import numpy as np

from . import kernels
from .config import DEFAULT_TOLERANCE, EXACT, TolerancePolicy

DEFAULT_MAX_POINTS = 512


class MetricError(ValueError):
    """A distance matrix violates a metric axiom.

    ``axiom`` names the violated condition and ``witness`` holds the indices
    that exhibit it (a pair or a triple).
    """

    axiom = "metric"

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class NotSquareError(MetricError):
    axiom = "square"


class InvalidEntryError(MetricError):
    axiom = "finite-nonnegative"


class DiagonalError(MetricError):
    axiom = "zero-diagonal"


class AsymmetryError(MetricError):
    axiom = "symmetry"


class ZeroDistanceError(MetricError):
    axiom = "positivity"


class TriangleError(MetricError):
    axiom = "triangle"


@dataclass(frozen=True, eq=False)
class MetricSpace:
    point_ids: tuple
    dist: np.ndarray
    base_index: Optional[int] = None

    def __post_init__(self):
        self.dist.flags.writeable = False

    @property
    def n(self) -> int:
        return len(self.point_ids)

    def __len__(self):
        return len(self.point_ids)

    @property
    def pointed(self) -> bool:
        return self.base_index is not None

    @property
    def exact(self) -> bool:
        return self.dist.dtype == object

    @property
    def base(self):
        return None if self.base_index is None else self.point_ids[self.base_index]

    def index(self, label) -> int:
        try:
            return self.point_ids.index(label)
        except ValueError:
            raise KeyError(f"unknown point {label!r}") from None

    def diameter(self):
        if self.n < 2:
            return Fraction(0) if self.exact else 0.0
        return self.dist.max()

    def base_distances(self) -> np.ndarray:
        if self.base_index is None:
            raise ValueError("space has no base point")
        return self.dist[self.base_index]

    def restrict(self, indices: Sequence[int]) -> "MetricSpace":
        """Subspace on ``indices`` (in the given order). Keeps the base if included."""
        idx = np.asarray(indices, dtype=np.intp)
        base = None
        if self.base_index is not None:
            hits = np.flatnonzero(idx == self.base_index)
            base = int(hits[0]) if hits.size else None
        sub = np.array(self.dist[np.ix_(idx, idx)])
        return MetricSpace(tuple(self.point_ids[i] for i in idx), sub, base)

    def with_base(self, label) -> "MetricSpace":
        return MetricSpace(self.point_ids, np.array(self.dist), self.index(label))

    def __repr__(self):
        return f"MetricSpace(n={self.n}, base={self.base!r}, exact={self.exact})"


def _to_matrix(dist_matrix, exact: bool) -> np.ndarray:
    if exact:
        rows = [[x if isinstance(x, Fraction) else Fraction(x) for x in row] for row in dist_matrix]
        m = np.empty((len(rows), len(rows[0]) if rows else 0), dtype=object)
        for i, row in enumerate(rows):
            if len(row) != m.shape[1]:
                raise NotSquareError("ragged distance matrix")
            m[i, :] = row
        return m
    try:
        m = np.array(dist_matrix, dtype=np.float64)
    except ValueError as exc:
        raise NotSquareError(f"distance matrix is not a rectangular array: {exc}") from None
    return m


def validate(
    dist_matrix,
    point_ids: Optional[Sequence] = None,
    base=None,
    *,
    policy: TolerancePolicy = DEFAULT_TOLERANCE,
    exact: bool = False,
    max_points: int = DEFAULT_MAX_POINTS,
) -> MetricSpace:
    """Check the metric axioms and build a :class:`MetricSpace`.

    Symmetry, the zero diagonal and positivity are checked exactly. The
    triangle inequality is checked up to ``policy`` slack (exactly in exact
    mode). On failure a :class:`MetricError` subclass is raised naming the
    first violated axiom and its witnessing indices; the triangle witness
    ``(i, j, k)`` means ``d[i][k] > d[i][j] + d[j][k]``.
    """
    if exact:
        policy = EXACT
    d = _to_matrix(dist_matrix, exact)
    if d.ndim != 2 or d.shape[0] != d.shape[1]:
        raise NotSquareError(f"distance matrix must be square, got shape {d.shape}")
    n = d.shape[0]
    if n == 0:
        raise NotSquareError("distance matrix is empty")
    if n > max_points:
        raise ValueError(f"{n} points exceeds the configured cap of {max_points}")

    if not exact:
        bad = ~np.isfinite(d) | (d < 0)
    else:
        bad = d < 0
    if bad.any():
        i, j = map(int, np.argwhere(bad)[0])
        raise InvalidEntryError(f"entry ({i},{j}) = {d[i, j]} is not a finite nonnegative number", (i, j))

    diag = np.flatnonzero(np.diagonal(d) != 0)
    if diag.size:
        i = int(diag[0])
        raise DiagonalError(f"d[{i}][{i}] = {d[i, i]} is not zero", (i, i))

    asym = d != d.T
    if asym.any():
        i, j = map(int, np.argwhere(asym)[0])
        raise AsymmetryError(f"asymmetry at ({i},{j}): {d[i, j]} != {d[j, i]}", (i, j))

    zero = (d == 0) & ~np.eye(n, dtype=bool)
    if zero.any():
        i, j = map(int, np.argwhere(zero)[0])
        raise ZeroDistanceError(f"distinct points {i} and {j} are at distance 0", (i, j))

    hit = kernels.first_triangle_violation(d, policy.rtol, policy.atol)
    if hit is not None:
        i, j, k = hit
        raise TriangleError(
            f"triangle violation ({i},{j},{k}): {d[i, k]} > {d[i, j]} + {d[j, k]}", (i, j, k)
        )

    if point_ids is None:
        point_ids = tuple(str(i) for i in range(n))
    point_ids = tuple(point_ids)
    if len(point_ids) != n:
        raise ValueError(f"{len(point_ids)} labels for {n} points")
    if len(set(point_ids)) != n:
        raise ValueError("point labels must be distinct")
    base_index = None
    if base is not None:
        if base not in point_ids:
            raise ValueError(f"base point {base!r} is not a point of the space")
        base_index = point_ids.index(base)
    return MetricSpace(point_ids, d, base_index)


def revalidate(X: MetricSpace, policy: TolerancePolicy = DEFAULT_TOLERANCE) -> MetricSpace:
    """Run :func:`validate` on an existing space (used as an oracle in tests)."""
    return validate(
        X.dist, X.point_ids, X.base, policy=policy, exact=X.exact, max_points=max(X.n, 1)
    )


def _scalar(X: MetricSpace, x):
    return Fraction(x) if X.exact else float(x)


def _offdiag_apply(d, fn):
    out = fn(d)
    np.fill_diagonal(out, d.dtype.type(0) if d.dtype != object else Fraction(0))
    return out


def truncate(X: MetricSpace, cap) -> MetricSpace:
    """Replace every distance by ``min(distance, cap)``."""
    if not cap > 0:
        raise ValueError(f"cap must be positive, got {cap}")
    c = _scalar(X, cap)
    d = _offdiag_apply(X.dist, lambda m: np.minimum(m, c) if not X.exact else _obj_min(m, c))
    return MetricSpace(X.point_ids, d, X.base_index)


def _obj_min(m, c):
    out = m.copy()
    out[out > c] = c
    return out


def _fresh_label(labels, stem="e"):
    label = stem
    while label in labels:
        label += "'"
    return label


def augment_base(X: MetricSpace, label: str = "e") -> MetricSpace:
    """Attach a base point at distance 1 from every point; truncate the rest at 2.

    The new base is appended as the last point. Its label is ``label`` with
    primes added until it is unused.
    """
    if X.pointed:
        raise ValueError("augment_base expects an unpointed space")
    n = X.n
    trunc = truncate(X, 2).dist
    one = Fraction(1) if X.exact else 1.0
    d = np.empty((n + 1, n + 1), dtype=X.dist.dtype)
    d[:n, :n] = trunc
    d[n, :n] = one
    d[:n, n] = one
    d[n, n] = 0 * one
    labels = X.point_ids + (_fresh_label(X.point_ids, label),)
    return MetricSpace(labels, d, n)


def rescale(X: MetricSpace, r) -> MetricSpace:
    """Multiply every distance by ``r > 0``; the base point is kept."""
    if not r > 0:
        raise ValueError(f"scale factor must be positive, got {r}")
    return MetricSpace(X.point_ids, X.dist * _scalar(X, r), X.base_index)


def closed_ball(X: MetricSpace, radius, policy: TolerancePolicy = DEFAULT_TOLERANCE):
    """Closed ball about the base point.

    Returns ``(subspace, index_map)`` where ``index_map[i]`` is the index in
    ``X`` of the subspace's ``i``-th point.
    """
    if not X.pointed:
        raise ValueError("closed_ball needs a pointed space")
    if radius < 0:
        raise ValueError("radius must be nonnegative")
    if X.exact:
        policy = EXACT
    rho = X.base_distances()
    r = _scalar(X, radius)
    inside = np.array([x <= r + policy.slack(r) for x in rho], dtype=bool)
    index_map = np.flatnonzero(inside)
    return X.restrict(index_map), index_map


def interval_grid(length, spacing, *, exact: bool = False, policy: TolerancePolicy = DEFAULT_TOLERANCE) -> MetricSpace:
    """Equally spaced points ``0, s, 2s, ..., length`` on the line, based at 0."""
    if not (length > 0 and spacing > 0):
        raise ValueError("length and spacing must be positive")
    if exact:
        length, spacing = Fraction(length), Fraction(spacing)
        ratio = length / spacing
        if ratio.denominator != 1:
            raise ValueError(f"length {length} is not a multiple of spacing {spacing}")
        k = int(ratio)
        xs = np.array([i * spacing for i in range(k + 1)], dtype=object)
        labels = tuple(str(x) for x in xs)
    else:
        ratio = float(length) / float(spacing)
        k = round(ratio)
        if k < 1 or abs(ratio - k) > policy.rtol * max(1.0, ratio):
            raise ValueError(f"length {length} is not a multiple of spacing {spacing}")
        xs = np.arange(k + 1, dtype=np.float64) * float(spacing)
        labels = tuple(repr(float(x)) for x in xs)
    d = np.abs(xs[:, None] - xs[None, :])
    return MetricSpace(labels, d, 0)


def grid_coordinates(X: MetricSpace) -> np.ndarray:
    """Coordinates of a line grid built by :func:`interval_grid` (distance to base)."""
    return np.array(X.base_distances())


class ConvexityDefect(NamedTuple):
    defect: float
    pair: Optional[tuple]
    witness_possible: bool


def convexity_defect(X: MetricSpace, resolution=0.0) -> ConvexityDefect:
    """Worst failure of exact metric betweenness over pairs of points.

    For every pair ``(p, q)`` with ``d(p, q) > resolution`` take the smallest
    detour ``d(p, r) + d(r, q) - d(p, q)`` over third points ``r``; the defect
    is the largest of these. With ``resolution=0`` every pair counts, so any
    finite space has a positive defect at its closest pair. Passing the grid
    spacing as ``resolution`` exempts nearest neighbours, which is the sense in
    which a line grid is convex (defect 0).

    Two-point spaces return ``inf`` with ``witness_possible=False``.
    """
    if X.n < 2:
        raise ValueError("convexity defect needs at least two points")
    res = _scalar(X, resolution)
    value, p, q = kernels.convexity_scan(X.dist, res)
    if X.n == 2:
        return ConvexityDefect(float("inf"), (0, 1), False)
    pair = None if p < 0 else (int(p), int(q))
    return ConvexityDefect(value, pair, True)
