"""Molecules in the Arens-Eells (Lipschitz-free) space of a finite pointed space.

The norm of a molecule is computed two ways that never share code:

* :func:`ae_norm_dual` maximizes the pairing over Lipschitz functions of
  constant at most 1 vanishing at the base (a dense simplex LP);
* :func:`ae_norm_primal` solves the transportation problem that moves the
  positive part onto the negative part, with the base point absorbing any
  mass imbalance.

:func:`check_certificates` cross-examines the two outputs.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import numpy as np

from . import _simplex, _transport, kernels
from .config import DEFAULT_TOLERANCE, DUALITY_RTOL, EXACT, TolerancePolicy
from .lip_functions import LipFunction, SpaceMismatchError, extend_by_zero, mcshane_extension, same_space
from .metric_core import MetricSpace, augment_base

EXAMPLE_MAX_N = 25


@dataclass(frozen=True, eq=False)
class Molecule:
    space: MetricSpace
    coeffs: np.ndarray

    def __post_init__(self):
        if not self.space.pointed:
            raise ValueError("molecules live on pointed spaces")
        c = self.coeffs
        if c.ndim != 1 or c.shape[0] != self.space.n:
            raise SpaceMismatchError(f"{c.shape} coefficients for a space of {self.space.n} points")
        if c.dtype != object and not np.all(np.isfinite(c)):
            raise ValueError("coefficients must be finite")
        c.flags.writeable = False

    @classmethod
    def of(cls, space: MetricSpace, coeffs) -> "Molecule":
        if space.exact:
            arr = np.empty(space.n, dtype=object)
            arr[:] = [x if isinstance(x, Fraction) else Fraction(x) for x in coeffs]
        else:
            arr = np.array(coeffs, dtype=np.float64)
        return cls(space, arr)

    @classmethod
    def zero(cls, space: MetricSpace) -> "Molecule":
        return cls.of(space, [0] * space.n)

    @classmethod
    def delta(cls, space: MetricSpace, label) -> "Molecule":
        c = [0] * space.n
        c[space.index(label)] = 1
        return cls.of(space, c)

    @classmethod
    def from_dict(cls, space: MetricSpace, coeffs: dict) -> "Molecule":
        c = [0] * space.n
        for label, a in coeffs.items():
            c[space.index(label)] = a
        return cls.of(space, c)

    def _other(self, other):
        if not same_space(self.space, other.space):
            raise SpaceMismatchError("molecules live on different spaces")
        return other.coeffs

    def __add__(self, other):
        return Molecule(self.space, self.coeffs + self._other(other))

    def __sub__(self, other):
        return Molecule(self.space, self.coeffs - self._other(other))

    def __mul__(self, a):
        return Molecule(self.space, self.coeffs * a)

    __rmul__ = __mul__

    def __neg__(self):
        return Molecule(self.space, -self.coeffs)

    @property
    def is_canonical(self) -> bool:
        return self.coeffs[self.space.base_index] == 0

    def __repr__(self):
        return f"Molecule({list(self.coeffs)!r})"


@dataclass(frozen=True)
class TransportPlan:
    """Flows between points of the space; ``flow[p, q]`` ships mass from p to q."""

    flow: np.ndarray
    cost: object
    iterations: int = 0


@dataclass(frozen=True)
class DualCertificate:
    witness: LipFunction
    value: object
    iterations: int = 0


def canonicalize(m: Molecule) -> Molecule:
    """Zero the base coefficient; the base evaluation is the zero functional."""
    if m.is_canonical:
        return m
    c = m.coeffs.copy()
    c[m.space.base_index] = 0 * c[m.space.base_index]
    return Molecule(m.space, c)


def pairing(m: Molecule, f: LipFunction):
    """``sum_p m(p) f(p)``."""
    if not same_space(m.space, f.space):
        raise SpaceMismatchError("molecule and function live on different spaces")
    if m.space.exact:
        return sum((a * b for a, b in zip(m.coeffs, f.values)), Fraction(0))
    return float(np.dot(m.coeffs, f.values))


def _eps(space: MetricSpace, policy: TolerancePolicy):
    if space.exact:
        return 0
    return policy.atol * max(1.0, float(space.diameter()))


def ae_norm_dual(m: Molecule, policy: TolerancePolicy = DEFAULT_TOLERANCE):
    """Norm as ``max <m, f>`` over ``f(e) = 0`` and ``|f(p) - f(q)| <= d(p, q)``.

    Variables are shifted to ``g = f + d(., e) >= 0`` so the origin is a
    feasible vertex; the bounds ``f <= d(., e)`` become rows. Returns
    ``(value, DualCertificate)``.
    """
    X = m.space
    e = X.base_index
    others = [i for i in range(X.n) if i != e]
    k = len(others)
    zero = Fraction(0) if X.exact else 0.0
    if k == 0:
        w = LipFunction.of(X, [0] * X.n)
        return zero, DualCertificate(w, zero)
    d = X.dist
    rho = d[e, others]
    pairs = [(a, b) for a in range(k) for b in range(k) if a != b]
    dtype = object if X.exact else np.float64
    A = np.zeros((len(pairs) + k, k), dtype=dtype)
    b = np.zeros(len(pairs) + k, dtype=dtype)
    for r, (a, c) in enumerate(pairs):
        A[r, a] = 1
        A[r, c] = -1
        b[r] = d[others[a], others[c]] + rho[a] - rho[c]
    for a in range(k):
        A[len(pairs) + a, a] = 1
        b[len(pairs) + a] = 2 * rho[a]
    if not X.exact:
        # tolerance-accepted triangle round-off can leave tiny negatives
        b = np.maximum(b, 0.0)
    coeff = m.coeffs[others]
    res = _simplex.maximize(coeff, A, b, eps=_eps(X, policy))
    f_vals = np.zeros(X.n, dtype=dtype)
    if X.exact:
        f_vals[:] = Fraction(0)
    f_vals[others] = res.x - rho
    witness = LipFunction(X, f_vals)
    value = pairing(m, witness)
    if not X.exact:
        value = max(value, 0.0)
    return value, DualCertificate(witness, value, res.iterations)


def ae_norm_primal(m: Molecule, policy: TolerancePolicy = DEFAULT_TOLERANCE):
    """Norm as the cheapest transport of the positive part onto the negative part.

    Any excess on either side is sent to / drawn from the base point. Returns
    ``(cost, TransportPlan)``.
    """
    m = canonicalize(m)
    X = m.space
    e = X.base_index
    c = m.coeffs
    zero = Fraction(0) if X.exact else 0.0
    src = [i for i in range(X.n) if c[i] > 0]
    snk = [i for i in range(X.n) if c[i] < 0]
    supply = [c[i] for i in src]
    demand = [-c[i] for i in snk]
    excess = sum(supply, zero) - sum(demand, zero)
    if excess > 0:
        snk.append(e)
        demand.append(excess)
    elif excess < 0:
        src.append(e)
        supply.append(-excess)
    dtype = object if X.exact else np.float64
    flow = np.zeros((X.n, X.n), dtype=dtype)
    if X.exact:
        flow[:] = Fraction(0)
    if not src or not snk:
        return zero, TransportPlan(flow, zero)
    cost = np.array(X.dist[np.ix_(src, snk)])
    sub, total, _, it = _transport.solve(supply, demand, cost, eps=_eps(X, policy))
    flow[np.ix_(src, snk)] = sub
    return total, TransportPlan(flow, total, it)


def ae_norm(m: Molecule, policy: TolerancePolicy = DEFAULT_TOLERANCE):
    """Transport cost of ``m`` (the primal value)."""
    return ae_norm_primal(m, policy)[0]


def minimal_positive_decomposition(m: Molecule):
    """``(m_plus, m_minus)``: coefficientwise positive and negative parts."""
    m = canonicalize(m)
    c = m.coeffs
    zero = 0 * c[0]
    pos = np.array([a if a > 0 else zero for a in c], dtype=c.dtype)
    neg = np.array([-a if a < 0 else zero for a in c], dtype=c.dtype)
    return Molecule(m.space, pos), Molecule(m.space, neg)


@dataclass
class CertificateReport:
    plan_feasible: bool
    plan_cost: bool
    witness_feasible: bool
    witness_pairing: bool
    gap_ok: bool
    weak_duality: bool
    primal: object = None
    dual: object = None
    gap: object = None
    failures: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures


def check_certificates(
    m: Molecule,
    value,
    plan: TransportPlan,
    cert: DualCertificate,
    policy: TolerancePolicy = DEFAULT_TOLERANCE,
    gap_rtol: float = DUALITY_RTOL,
) -> CertificateReport:
    """Independently re-verify a primal plan and a dual witness for ``m``.

    Checks: plan nonnegative with the right marginals off the base; plan cost
    recomputed; witness vanishes at base with Lipschitz number at most 1;
    witness value recomputed as the pairing; primal, dual and the claimed
    ``value`` agree within ``gap_rtol * max(1, value)``. Weak duality
    ``<m, f> <= cost`` is checked separately since it must hold for any
    feasible pair.
    """
    m = canonicalize(m)
    X = m.space
    pol = EXACT if X.exact else policy
    e = X.base_index
    flow = plan.flow
    scale = max(1.0, float(np.abs(m.coeffs).sum())) if not X.exact else 1

    net = flow.sum(axis=1) - flow.sum(axis=0)
    marg_ok = all(
        i == e or (net[i] == m.coeffs[i] if X.exact else abs(net[i] - m.coeffs[i]) <= pol.slack(scale))
        for i in range(X.n)
    )
    nonneg = bool(np.all(flow >= 0))
    plan_feasible = marg_ok and nonneg

    recomputed = (flow * X.dist).sum()
    plan_cost = _agree(pol, recomputed, plan.cost)

    w = cert.witness
    L = kernels.lipschitz_number(w.values, X.dist) if same_space(w.space, X) else None
    witness_feasible = L is not None and pol.leq(L, 1) and pol.is_zero(w.values[e])
    pair_val = pairing(m, w) if L is not None else None
    witness_pairing = pair_val is not None and _agree(pol, pair_val, cert.value)

    primal, dual = plan.cost, cert.value
    if X.exact:
        gap = abs(primal - dual)
        gap_ok = gap == 0 and primal == value
    else:
        gap = abs(float(primal) - float(dual))
        tol = gap_rtol * max(1.0, abs(float(value)))
        gap_ok = gap <= tol and abs(float(value) - float(primal)) <= tol and abs(float(value) - float(dual)) <= tol

    weak = pair_val is not None and pol.leq(pair_val, recomputed)

    report = CertificateReport(
        plan_feasible, plan_cost, witness_feasible, witness_pairing, gap_ok, weak, primal, dual, gap
    )
    for name in ("plan_feasible", "plan_cost", "witness_feasible", "witness_pairing", "gap_ok", "weak_duality"):
        if not getattr(report, name):
            report.failures.append(name)
    return report


def _agree(pol: TolerancePolicy, a, b) -> bool:
    return a == b if pol.exact else pol.close(float(a), float(b))


def certify(m: Molecule, policy: TolerancePolicy = DEFAULT_TOLERANCE):
    """Run both solvers and check them against each other."""
    primal, plan = ae_norm_primal(m, policy)
    dual, cert = ae_norm_dual(m, policy)
    report = check_certificates(m, primal, plan, cert, policy)
    return primal, dual, plan, cert, report


# -- the alternating molecule on [0, 1] with a base point ---------------------


def example_space(N: int, exact: bool = False) -> MetricSpace:
    """``{0} U {2^-k : k = 0..2N+1}`` on the line plus a base at distance 1 from all."""
    _check_N(N)
    xs = [Fraction(1, 2**k) for k in range(2 * N + 2)] + [Fraction(0)]
    labels = tuple(f"2^-{k}" for k in range(2 * N + 2)) + ("0",)
    if exact:
        arr = np.empty(len(xs), dtype=object)
        arr[:] = xs
    else:
        arr = np.array([float(x) for x in xs])
    d = np.abs(arr[:, None] - arr[None, :])
    return augment_base(MetricSpace(labels, d, None))


def example_molecule(N: int, exact: bool = False):
    """``(space, m_N)`` with ``m_N = sum_{k<=N} (delta(2^-2k) - delta(2^-(2k+1)))``."""
    Y = example_space(N, exact)
    c = [0] * Y.n
    for k in range(N + 1):
        c[2 * k] = 1
        c[2 * k + 1] = -1
    return Y, Molecule.of(Y, c)


def example_test_function(N: int, Y: Optional[MetricSpace] = None, exact: bool = False) -> LipFunction:
    """A function in the unit interval taking 1 at ``1, 2^-2, ..., 2^-2N``.

    It is 0 at the odd powers ``2^-1, ..., 2^-(2N+1)`` and at 0, clipped to
    ``[0, 1]``, and extended by zero to the base point of ``Y``.
    """
    if Y is None:
        Y = example_space(N, exact)
    X = Y.restrict(range(Y.n - 1))
    X = MetricSpace(X.point_ids, np.array(X.dist), None)
    known = {}
    for k in range(2 * N + 2):
        known[k] = 1 if k % 2 == 0 else 0
    known[X.index("0")] = 0
    if X.exact:
        known = {i: Fraction(v) for i, v in known.items()}
    f = mcshane_extension(X, known)
    one = Fraction(1) if X.exact else 1.0
    vals = np.array([min(max(v, 0 * one), one) for v in f.values], dtype=f.values.dtype)
    return extend_by_zero(LipFunction(X, vals), Y)


def example_norm_formula(N: int, exact: bool = False):
    """``(2/3) (1 - 4^-(N+1))``, the telescoped sum of ``2^-(2k+1)``."""
    v = Fraction(2, 3) * (1 - Fraction(1, 4 ** (N + 1)))
    return v if exact else float(v)


def _check_N(N):
    if not isinstance(N, (int, np.integer)) or N < 0 or N > EXAMPLE_MAX_N:
        raise ValueError(f"N must be an integer in [0, {EXAMPLE_MAX_N}], got {N!r}")
