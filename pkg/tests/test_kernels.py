"""The compiled kernels and the numpy fallback must agree bit for bit on float64."""

import subprocess
import sys
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from lipfree import _kernels_py as py
from lipfree import generators as gen
from lipfree import kernels

from conftest import brute_lipschitz, spaces

ext = pytest.importorskip("lipfree._kernels", reason="compiled extension not built")


def _space_and_values(X, seed):
    rng = gen.rng_for(seed, "kern")
    return np.ascontiguousarray(X.dist, dtype=float), rng.uniform(-3, 3, X.n)


@given(spaces(min_points=1, max_points=12), st.integers(0, 10**6))
def test_lipschitz_identical(X, seed):
    d, f = _space_and_values(X, seed)
    assert ext.lipschitz_number(f, d) == py.lipschitz_number(f, d)
    assert ext.lipschitz_argmax(f, d) == py.lipschitz_argmax(f, d)


@given(spaces(min_points=1, max_points=10), st.integers(0, 10**6), st.integers(1, 6))
def test_batch_identical(X, seed, k):
    d = np.ascontiguousarray(X.dist, dtype=float)
    F = gen.rng_for(seed, "batch").uniform(-2, 2, (k, X.n))
    a, b = ext.lipschitz_many(F, d), py.lipschitz_many(F, d)
    assert np.array_equal(np.asarray(a), np.asarray(b))
    assert list(b) == [py.lipschitz_number(row, d) for row in F]


@given(spaces(min_points=2, max_points=8), st.integers(0, 10**6))
def test_triangle_identical(X, seed):
    d = np.array(X.dist, dtype=float)
    rng = gen.rng_for(seed, "tri")
    i, j = rng.integers(0, X.n, 2)
    if i != j:
        d[i, j] = d[j, i] = d[i, j] * rng.uniform(0.2, 3)
    for rtol, atol in [(1e-9, 1e-12), (0.0, 0.0), (1e-3, 1e-6)]:
        assert ext.first_triangle_violation(d, rtol, atol) == py.first_triangle_violation(d, rtol, atol)


@given(spaces(min_points=2, max_points=9), st.sampled_from([0.0, 0.3, 1.0, 5.0]))
def test_convexity_identical(X, resolution):
    d = np.ascontiguousarray(X.dist, dtype=float)
    assert ext.convexity_scan(d, resolution) == py.convexity_scan(d, resolution)


def test_fraction_inputs_use_fallback():
    d = np.array([[Fraction(0), Fraction(1, 3)], [Fraction(1, 3), Fraction(0)]], dtype=object)
    f = np.array([Fraction(0), Fraction(1, 7)], dtype=object)
    v = kernels.lipschitz_number(f, d)
    assert v == Fraction(3, 7) and isinstance(v, Fraction)


def test_against_double_loop():
    X = gen.random_space(gen.rng_for(3, "dl"), 15)
    d, f = _space_and_values(X, 3)
    assert kernels.lipschitz_number(f, d) == pytest.approx(brute_lipschitz(f, d), rel=1e-15)


def test_backend_flag():
    assert kernels.BACKEND == "cython"
    out = subprocess.run(
        [sys.executable, "-c", "import lipfree.kernels as k; print(k.BACKEND)"],
        env={"LIPFREE_PURE": "1", "PATH": ""},
        capture_output=True,
        text=True,
        check=True,
    )
    assert out.stdout.strip() == "python"


def test_benchmark_smoke(capsys):
    import runpy
    from pathlib import Path

    mod = runpy.run_path(str(Path(__file__).parents[1] / "benchmarks" / "bench_kernels.py"))
    mod["main"](["--sizes", "8", "--repeat", "1"])
    assert "lipschitz_number" in capsys.readouterr().out
