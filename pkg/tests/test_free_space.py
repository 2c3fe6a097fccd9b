from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.optimize import linprog

from lipfree import free_space as fs
from lipfree import generators as gen
from lipfree.config import EXACT
from lipfree.free_space import (
    DualCertificate,
    Molecule,
    TransportPlan,
    ae_norm,
    ae_norm_dual,
    ae_norm_primal,
    canonicalize,
    certify,
    check_certificates,
    minimal_positive_decomposition,
    pairing,
)
from lipfree.lip_functions import LipFunction, SpaceMismatchError, lipschitz_number
from lipfree.metric_core import interval_grid, validate

from conftest import spaces


def linprog_norm(m: Molecule) -> float:
    """Dual LP solved by HiGHS: max <m, f> s.t. f(e) = 0, |f(p) - f(q)| <= d(p, q)."""
    X = m.space
    n = X.n
    rows, rhs = [], []
    for p in range(n):
        for q in range(n):
            if p != q:
                r = np.zeros(n)
                r[p], r[q] = 1, -1
                rows.append(r)
                rhs.append(float(X.dist[p, q]))
    bounds = [(None, None)] * n
    bounds[X.base_index] = (0, 0)
    res = linprog(-np.asarray(m.coeffs, float), A_ub=np.array(rows) if rows else None,
                  b_ub=np.array(rhs) if rhs else None, bounds=bounds, method="highs")
    assert res.status == 0
    return -res.fun


@st.composite
def molecules(draw, max_points=9):
    X = draw(spaces(min_points=2, max_points=max_points))
    seed = draw(st.integers(0, 2**31 - 1))
    rng = gen.rng_for(seed, "mol")
    support = draw(st.integers(1, X.n))
    return gen.random_molecule(rng, X, support)


def line(points, base=0):
    xs = np.array(points, dtype=float)
    return validate(np.abs(xs[:, None] - xs[None, :]), base=str(base))


class TestBasics:
    def test_canonicalize(self):
        X = validate([[0, 1], [1, 0]], ["e", "p"], "e")
        m = Molecule.of(X, [5, 1])
        c = canonicalize(m)
        assert list(c.coeffs) == [0, 1]
        assert canonicalize(c) is c

    def test_molecule_needs_base(self):
        with pytest.raises(ValueError):
            Molecule.of(validate([[0, 1], [1, 0]]), [1, -1])

    def test_delta_pairing(self):
        G = interval_grid(3, 1)
        f = LipFunction.of(G, [0, 4, -2, 7])
        assert pairing(Molecule.delta(G, G.point_ids[2]), f) == -2

    def test_pairing_mismatch(self):
        with pytest.raises(SpaceMismatchError):
            pairing(Molecule.zero(interval_grid(2, 1)), LipFunction.constant(interval_grid(3, 1)))

    @given(molecules(), st.data())
    def test_canonicalize_keeps_lip0_pairing(self, m, data):
        X = m.space
        f = gen.random_lip0_unit(gen.rng_for(data.draw(st.integers(0, 10**6)), "f"), X)
        dirty = Molecule(X, m.coeffs + np.eye(X.n)[X.base_index] * 3.0)
        assert pairing(dirty, f) == pytest.approx(pairing(canonicalize(dirty), f), abs=1e-12)

    @given(molecules(), molecules(), st.floats(-3, 3))
    def test_bilinear(self, m, m2, a):
        X = m.space
        f = gen.random_lip0_unit(gen.rng_for(1, "bil"), X)
        g = LipFunction.constant(X, 0.5)
        assert pairing(m * a, f) == pytest.approx(a * pairing(m, f), abs=1e-12)
        assert pairing(m, f + g) == pytest.approx(pairing(m, f) + pairing(m, g), abs=1e-12)


class TestNormExamples:
    def test_zero(self):
        G = interval_grid(3, 1)
        z = Molecule.zero(G)
        assert ae_norm_primal(z)[0] == 0
        assert ae_norm_dual(z)[0] == 0

    def test_single_edge_plan(self):
        X = line([0, 1, 3])
        m = Molecule.from_dict(X, {"1": 1, "2": -1})
        cost, plan = ae_norm_primal(m)
        assert cost == 2
        assert plan.flow[1, 2] == 1 and plan.flow.sum() == 1

    def test_single_point_ships_to_base(self):
        X = line([0, 1, 3])
        cost, plan = ae_norm_primal(Molecule.delta(X, "2"))
        assert cost == 3 and plan.flow[2, 0] == 1

    @pytest.mark.parametrize("n", range(4))
    def test_augmented_interval_edges(self, n):
        Y = fs.example_space(3, exact=True)
        p, q = f"2^-{2 * n}", f"2^-{2 * n + 1}"
        m = Molecule.delta(Y, p) - Molecule.delta(Y, q)
        assert ae_norm(m) == Fraction(1, 2 ** (2 * n + 1))
        assert ae_norm_dual(m)[0] == Fraction(1, 2 ** (2 * n + 1))

    @pytest.mark.parametrize("N, expected", [(0, Fraction(1, 2)), (1, Fraction(5, 8)), (2, Fraction(21, 32))])
    def test_example_values(self, N, expected):
        Y, m = fs.example_molecule(N, exact=True)
        assert ae_norm_primal(m)[0] == expected
        assert ae_norm_dual(m)[0] == expected
        assert fs.example_norm_formula(N, exact=True) == expected

    @pytest.mark.parametrize("N", range(9))
    def test_example_against_linprog(self, N):
        Y, m = fs.example_molecule(N)
        assert linprog_norm(m) == pytest.approx(fs.example_norm_formula(N), abs=1e-9)

    @pytest.mark.parametrize("N", range(9))
    def test_example_line_oracle(self, N):
        # Inside [0, 1] the carrier is a line; with zero net mass the norm is
        # the L1 distance between the cumulative distributions.
        Y, m = fs.example_molecule(N)
        xs = np.array([float(Fraction(1, 2**k)) for k in range(2 * N + 2)])
        c = np.asarray(m.coeffs[: len(xs)], float)
        order = np.argsort(xs)
        xs, c = xs[order], c[order]
        cdf = np.cumsum(c)[:-1]
        assert float(np.sum(np.abs(cdf) * np.diff(xs))) == pytest.approx(fs.example_norm_formula(N), abs=1e-12)

    def test_example_range(self):
        with pytest.raises(ValueError):
            fs.example_molecule(fs.EXAMPLE_MAX_N + 1)
        with pytest.raises(ValueError):
            fs.example_molecule(-1)

    def test_example_test_function(self):
        for N in range(5):
            Y, m = fs.example_molecule(N, exact=True)
            f = fs.example_test_function(N, Y, exact=True)
            assert all(0 <= v <= 1 for v in f.values)
            assert pairing(m, f) == N + 1
            plus, _ = minimal_positive_decomposition(m)
            ones = LipFunction.of(Y, [1] * (Y.n - 1) + [0])
            assert pairing(plus, ones) == N + 1
            assert pairing(m, ones) == 0


class TestDuality:
    @given(molecules())
    def test_primal_dual_linprog_agree(self, m):
        p, _ = ae_norm_primal(m)
        d, cert = ae_norm_dual(m)
        ref = linprog_norm(m)
        tol = 1e-7 * max(1.0, ref)
        assert abs(p - ref) <= tol and abs(d - ref) <= tol
        assert lipschitz_number(cert.witness) <= 1 + 1e-9
        assert cert.witness.vanishes_at_base()

    @given(molecules())
    def test_certificates_pass(self, m):
        *_, report = certify(m)
        assert report.ok, report.failures

    @given(molecules(), st.integers(0, 10**6))
    def test_weak_duality_any_feasible_pair(self, m, seed):
        _, plan = ae_norm_primal(m)
        f = gen.random_lip0_unit(gen.rng_for(seed, "wd"), m.space)
        assert pairing(m, f) <= plan.cost + 1e-9

    @given(molecules(), st.floats(-4, 4))
    def test_homogeneity(self, m, a):
        assert ae_norm(m * a) == pytest.approx(abs(a) * ae_norm(m), rel=1e-9, abs=1e-12)

    @given(st.data())
    def test_triangle(self, data):
        m = data.draw(molecules())
        seed = data.draw(st.integers(0, 10**6))
        m2 = gen.random_molecule(gen.rng_for(seed, "m2"), m.space)
        assert ae_norm(m + m2) <= ae_norm(m) + ae_norm(m2) + 1e-9

    @given(molecules(), st.integers(0, 10**6), st.floats(0.01, 100))
    def test_pairing_bounded_by_norm(self, m, seed, scale):
        f = gen.random_lip0_unit(gen.rng_for(seed, "pb"), m.space) * scale
        L = max(lipschitz_number(f), 1e-300)
        assert abs(pairing(m, f)) <= ae_norm(m) * L * (1 + 1e-9) + 1e-12

    @given(spaces(min_points=2, max_points=8))
    def test_isometric_embedding(self, X):
        e = X.base_index
        for p in range(X.n):
            dp = Molecule(X, np.eye(X.n)[p])
            assert ae_norm_primal(dp)[0] == pytest.approx(X.dist[p, e], abs=1e-9)
            assert ae_norm_dual(dp)[0] == pytest.approx(X.dist[p, e], abs=1e-9)
            for q in range(X.n):
                if q != p:
                    m = Molecule(X, np.eye(X.n)[p] - np.eye(X.n)[q])
                    assert ae_norm_primal(m)[0] == pytest.approx(X.dist[p, q], abs=1e-9)
                    assert ae_norm_dual(m)[0] == pytest.approx(X.dist[p, q], abs=1e-9)

    def test_exact_random(self):
        rng = gen.rng_for(9, "exact-duality")
        for _ in range(10):
            X = gen.to_exact(gen.random_space(rng, int(rng.integers(3, 7))))
            c = [Fraction(int(k), 4) for k in rng.integers(-8, 9, X.n)]
            m = Molecule.of(X, c)
            p, d, plan, cert, report = certify(m, EXACT)
            assert p == d and isinstance(p, Fraction)
            assert report.ok


class TestDecomposition:
    def test_examples(self):
        G = interval_grid(2, 1)
        m = Molecule.of(G, [0, 1, -1])
        plus, minus = minimal_positive_decomposition(m)
        assert list(plus.coeffs) == [0, 1, 0] and list(minus.coeffs) == [0, 0, 1]
        _, minus = minimal_positive_decomposition(Molecule.of(G, [0, 2, 3]))
        assert not minus.coeffs.any()

    @given(molecules(), st.integers(0, 10**6))
    def test_dominated_by_alternatives(self, m, seed):
        s = gen.rng_for(seed, "s").uniform(0, 2, m.space.n)
        s[m.space.base_index] = 0
        plus, minus = minimal_positive_decomposition(m)
        assert np.allclose(plus.coeffs - minus.coeffs, canonicalize(m).coeffs)
        assert np.all(plus.coeffs <= plus.coeffs + s) and np.all(minus.coeffs <= minus.coeffs + s)
        # any nonnegative (a, b) with a - b = m has a >= m+ coefficientwise
        a = plus.coeffs + s
        b = a - canonicalize(m).coeffs
        assert np.all(b >= -1e-12)
        assert np.all(a >= plus.coeffs) and np.all(b >= minus.coeffs - 1e-12)


class TestCertificateFailures:
    def setup_method(self):
        Y, self.m = fs.example_molecule(2)
        self.p, self.d, self.plan, self.cert, self.report = certify(self.m)

    def test_clean(self):
        assert self.report.ok

    def test_negative_flow(self):
        flow = np.array(self.plan.flow)
        i, j = np.argwhere(flow > 0)[0]
        flow[i, j] -= 2
        flow[j, i] += 2
        r = check_certificates(self.m, self.p, TransportPlan(flow, self.plan.cost), self.cert)
        assert "plan_feasible" in r.failures

    def test_wrong_cost(self):
        bad = TransportPlan(self.plan.flow, self.plan.cost + 0.5)
        r = check_certificates(self.m, self.p, bad, self.cert)
        assert "plan_cost" in r.failures

    def test_witness_scaled(self):
        w = self.cert.witness * 2
        r = check_certificates(self.m, self.p, self.plan, DualCertificate(w, pairing(self.m, w)))
        assert "witness_feasible" in r.failures
        assert not r.ok

    def test_witness_value_lies(self):
        r = check_certificates(self.m, self.p, self.plan, DualCertificate(self.cert.witness, self.d + 1))
        assert "witness_pairing" in r.failures

    def test_gap(self):
        r = check_certificates(self.m, self.p + 1e-3, self.plan, self.cert)
        assert "gap_ok" in r.failures
