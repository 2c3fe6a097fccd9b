"""Seeded random spaces, functions and molecules for the verification suites."""

from __future__ import annotations

from fractions import Fraction

import numpy as np

from . import kernels
from .free_space import Molecule
from .lip_functions import LipFunction
from .metric_core import MetricSpace


def rng_for(seed, *stream) -> np.random.Generator:
    """Independent generator per (seed, stream labels) so suites never share state."""
    words = [int(seed) & 0xFFFFFFFF]
    for s in stream:
        if isinstance(s, str):
            words.extend(s.encode())
        else:
            words.append(int(s) & 0xFFFFFFFF)
    return np.random.default_rng(np.random.SeedSequence(words))


def shortest_path_closure(w: np.ndarray) -> np.ndarray:
    d = np.array(w, dtype=np.float64)
    for k in range(d.shape[0]):
        d = np.minimum(d, d[:, k, None] + d[None, k, :])
    return d


def random_space(rng: np.random.Generator, n: int, *, pointed: bool = True, kind: str = "graph") -> MetricSpace:
    """Random finite metric space on ``n`` points.

    ``graph``: shortest paths over a complete graph with weights in [0.1, 3].
    ``euclidean``: points uniform in the unit square of a random dimension 1-3.
    ``ultra``: a random ultrametric built from nested merges.
    """
    if kind == "graph":
        w = rng.uniform(0.1, 3.0, size=(n, n))
        w = np.triu(w, 1)
        w = w + w.T
        d = shortest_path_closure(w)
    elif kind == "euclidean":
        dim = int(rng.integers(1, 4))
        x = rng.uniform(0.0, 1.0, size=(n, dim))
        d = np.sqrt(((x[:, None, :] - x[None, :, :]) ** 2).sum(axis=-1))
        d = np.maximum(d, d.T)
        off = ~np.eye(n, dtype=bool)
        if n > 1 and (d[off] == 0).any():
            d[off & (d == 0)] = 1e-3
            d = shortest_path_closure(d)
    elif kind == "ultra":
        d = np.zeros((n, n))
        clusters = [[i] for i in range(n)]
        height = 0.0
        while len(clusters) > 1:
            height += rng.uniform(0.1, 1.0)
            a, b = sorted(rng.choice(len(clusters), size=2, replace=False))
            for i in clusters[a]:
                for j in clusters[b]:
                    d[i, j] = d[j, i] = height
            clusters[a] = clusters[a] + clusters.pop(b)
    else:
        raise ValueError(f"unknown space kind {kind!r}")
    np.fill_diagonal(d, 0.0)
    labels = tuple(f"p{i}" for i in range(n))
    return MetricSpace(labels, d, 0 if pointed else None)


def random_values(rng, X: MetricSpace, scale=1.0) -> np.ndarray:
    return rng.uniform(-scale, scale, size=X.n)


def to_exact(X: MetricSpace, denominator: int = 64) -> MetricSpace:
    """Round a float space to rationals with the given denominator, then re-close."""
    q = np.round(np.asarray(X.dist, dtype=np.float64) * denominator)
    np.fill_diagonal(q, 0)
    off = ~np.eye(X.n, dtype=bool)
    q[off & (q < 1)] = 1
    q = shortest_path_closure(q).astype(np.int64)
    d = np.empty(q.shape, dtype=object)
    for i in range(X.n):
        for j in range(X.n):
            d[i, j] = Fraction(int(q[i, j]), denominator)
    return MetricSpace(X.point_ids, d, X.base_index)


def scale_into_unit_ball(X: MetricSpace, v: np.ndarray, norm: str = "lip0") -> np.ndarray:
    """Divide by ``max(1, norm)`` where norm is L (``lip0``) or max(L, sup) (``lip``)."""
    L = kernels.lipschitz_number(v, X.dist)
    if norm == "lip":
        L = max(L, np.abs(v).max())
    return v / L if L > 1 else v


def random_lip0_unit(rng, X: MetricSpace) -> LipFunction:
    v = random_values(rng, X, scale=float(X.diameter()) or 1.0)
    v = v - v[X.base_index]
    return LipFunction(X, scale_into_unit_ball(X, v))


def random_molecule(rng, X: MetricSpace, support: int | None = None) -> Molecule:
    c = np.zeros(X.n)
    k = X.n if support is None else min(support, X.n)
    idx = rng.choice(X.n, size=k, replace=False)
    c[idx] = rng.normal(size=k)
    c[X.base_index] = 0.0
    return Molecule(X, c)
