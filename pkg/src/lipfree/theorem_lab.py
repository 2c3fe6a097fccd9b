"""Seeded verification suites for the finitely checkable identities.

Every suite returns a :class:`CheckResult`. A failing trial stores a
self-contained counterexample payload; :func:`replay` re-evaluates that
payload in isolation, so a recorded failure can always be reproduced.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional

import numpy as np

from . import free_space as fs
from . import generators as gen
from . import kernels
from .config import DUALITY_RTOL, EXACT, Config, TolerancePolicy
from .jsonio import encode_number, space_from_json, space_to_json
from .lip_functions import (
    LipFunction,
    extend_by_zero,
    h_function,
    ideal_membership,
    join,
    lip_norm,
    lipschitz_number,
    liminf_limit,
    meet,
    sup_norm,
    tail_meets,
)
from .metric_core import MetricSpace, augment_base, closed_ball, interval_grid, rescale, truncate

IDENTITY_TOL = 1e-12  # identities that hold up to a few roundings
EMBEDDING_TOL = 1e-9
EXAMPLE_TOL = 1e-9


@dataclass
class CheckResult:
    check_name: str
    passed: bool = True
    trials: int = 0
    counterexample: Optional[dict] = None
    max_residual: float = 0.0
    details: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        out = {
            "check": self.check_name,
            "passed": bool(self.passed),
            "trials": int(self.trials),
            "max_residual": float(self.max_residual),
            "counterexample": self.counterexample,
        }
        if self.details:
            out["details"] = self.details
        return out


class _Tally:
    def __init__(self, name):
        self.result = CheckResult(name)

    def record(self, ok: bool, residual=0.0, payload: Callable[[], dict] = None):
        r = self.result
        r.trials += 1
        residual = float(residual)
        if residual > r.max_residual:
            r.max_residual = residual
        if not ok and r.counterexample is None:
            r.counterexample = payload() if payload else {}
            r.counterexample.setdefault("trial", r.trials - 1)
            r.passed = False

    def done(self, **details) -> CheckResult:
        self.result.details.update(details)
        return self.result


def _vals(v):
    return [encode_number(x) for x in v]


def _space_payload(X: MetricSpace) -> dict:
    return space_to_json(X)


def _load_payload_space(p: dict, exact: bool) -> MetricSpace:
    return space_from_json(p, exact=exact, max_points=max(len(p["points"]), 1))


def _fn(X: MetricSpace, values) -> LipFunction:
    return LipFunction.of(X, values)


def _as(X: MetricSpace, x):
    return Fraction(x) if X.exact else float(x)


# -- random function factories -------------------------------------------------


def _uniform(rng, X: MetricSpace, lo, hi, size=None):
    size = X.n if size is None else size
    if X.exact:
        den = 1024
        k = rng.integers(int(round(lo * den)), int(round(hi * den)) + 1, size=size)
        out = np.empty(size, dtype=object)
        out[:] = [Fraction(int(a), den) for a in k]
        return out
    return rng.uniform(lo, hi, size=size)


def _into_ball(X: MetricSpace, v, norm="lip0"):
    L = kernels.lipschitz_number(v, X.dist)
    if norm == "lip":
        L = max(L, np.abs(v).max())
    return v / L if L > 1 else v


def _exactify(X: MetricSpace, exact: bool) -> MetricSpace:
    return gen.to_exact(X) if exact and not X.exact else X


def _random_spaces(cfg: Config, label, count, sizes=(3, 12), pointed=True, kinds=("graph", "euclidean", "ultra")):
    for s in range(count):
        rng = gen.rng_for(cfg.seed, label, "space", s)
        n = int(rng.integers(sizes[0], sizes[1] + 1))
        X = gen.random_space(rng, n, pointed=pointed, kind=kinds[s % len(kinds)])
        yield _exactify(X, cfg.exact)


# -- Lip(X) as Lip0 of the amalgam --------------------------------------------


def _amalgam_residuals(X: MetricSpace, f: LipFunction):
    Y = augment_base(X)
    Xt = truncate(X, 2)
    ft = LipFunction(Xt, f.values)
    norm_t = lip_norm(ft)
    LY = lipschitz_number(extend_by_zero(f, Y))
    return abs(norm_t - LY), abs(lip_norm(f) - norm_t)


def _assert_amalgam(p, tol):
    X = _load_payload_space(p["space"], p.get("exact", False))
    r1, r2 = _amalgam_residuals(X, _fn(X, p["f"]))
    return r1 <= tol and r2 <= tol


def check_amalgam_isometry(X: Optional[MetricSpace] = None, trials: Optional[int] = None, cfg: Config = Config(), tol=IDENTITY_TOL) -> CheckResult:
    """Sup-Lipschitz norm on X (truncated at 2) equals the Lipschitz number of the zero extension.

    With ``X=None`` every trial draws a fresh unpointed space of 1-10 points,
    stretched so that some distances exceed 2.
    """
    trials = cfg.trials if trials is None else trials
    tol = 0 if cfg.exact else tol
    t = _Tally("amalgam_isometry")
    for k in range(trials):
        rng = gen.rng_for(cfg.seed, "amalgam", k)
        if X is None:
            n = int(rng.integers(1, 11))
            Z = gen.random_space(rng, n, pointed=False, kind=("graph", "euclidean", "ultra")[k % 3])
            Z = MetricSpace(Z.point_ids, Z.dist * rng.uniform(0.3, 4.0), None)
            Z = _exactify(Z, cfg.exact)
        else:
            Z = X
        if k % 10 == 0:
            v = np.array([_as(Z, rng.uniform(-3, 3))] * Z.n, dtype=Z.dist.dtype)
        else:
            a = float(rng.uniform(0.05, 4.0))
            v = _uniform(rng, Z, -a, a)
        f = _fn(Z, v)
        r1, r2 = _amalgam_residuals(Z, f)
        t.record(
            r1 <= tol and r2 <= tol,
            max(r1, r2),
            lambda: {"assertion": "amalgam", "exact": Z.exact, "space": _space_payload(Z), "f": _vals(f.values), "residuals": [float(r1), float(r2)]},
        )
    return t.done(tolerance=float(tol))


# -- positive part of the Lip unit ball ----------------------------------------


def _assert_ball_translation(p, tol):
    X = _load_payload_space(p["space"], p.get("exact", False))
    f = _fn(X, p["f"])
    one = _as(X, 1)
    if p["direction"] == 1:
        return lip_norm(f - one) <= one + tol
    in_both = lip_norm(f) <= one and lip_norm(f - one) <= one
    return (not in_both) or f.values.min() >= -tol


def check_ball_translation(X: Optional[MetricSpace] = None, trials: Optional[int] = None, cfg: Config = Config(), tol=IDENTITY_TOL) -> CheckResult:
    """Positive unit-ball functions shifted down by 1 stay in the unit ball, and conversely.

    Direction 1: ``f >= 0, ||f||_L <= 1  =>  ||f - 1||_L <= 1``.
    Direction 2: ``||f||_L <= 1`` and ``||f - 1||_L <= 1``  =>  ``f >= 0``.
    """
    trials = cfg.trials if trials is None else trials
    tol = 0 if cfg.exact else tol
    t = _Tally("ball_translation")
    vacuous = 0
    for k in range(trials):
        rng = gen.rng_for(cfg.seed, "ball", k)
        if X is None:
            Z = gen.random_space(rng, int(rng.integers(1, 11)), pointed=False, kind=("graph", "euclidean", "ultra")[k % 3])
            Z = _exactify(Z, cfg.exact)
        else:
            Z = X
        one = _as(Z, 1)
        kind = k % 5
        if k % 10 == 0:
            v = np.array([one if k % 20 == 0 else 0 * one] * Z.n, dtype=Z.dist.dtype)
        elif kind == 1:
            # tent of height 1 around a random point
            c = int(rng.integers(Z.n))
            v = np.array([max(0 * one, one - x) for x in Z.dist[c]], dtype=Z.dist.dtype)
        else:
            v = _into_ball(Z, _uniform(rng, Z, 0, float(rng.uniform(0.1, 2.0))), "lip")
        f = _fn(Z, v)
        g_norm = lip_norm(f - one)
        t.record(
            g_norm <= one + tol,
            max(0.0, float(g_norm - one)),
            lambda: {"assertion": "ball_translation", "direction": 1, "exact": Z.exact, "space": _space_payload(Z), "f": _vals(f.values)},
        )
        # direction 2: random shift of a small unit-ball function
        w = _into_ball(Z, _uniform(rng, Z, -0.5, 0.5), "lip") * _as(Z, rng.uniform(0, 1))
        g = _fn(Z, w + _as(Z, rng.uniform(-0.2, 1.0)))
        in_both = lip_norm(g) <= one and lip_norm(g - one) <= one
        vacuous += not in_both
        ok = (not in_both) or g.values.min() >= -tol
        t.record(
            ok,
            0.0 if not in_both else max(0.0, float(-g.values.min())),
            lambda: {"assertion": "ball_translation", "direction": 2, "exact": Z.exact, "space": _space_payload(Z), "f": _vals(g.values)},
        )
    return t.done(tolerance=float(tol), direction2_vacuous=vacuous)


# -- liminf of a pointwise convergent sequence ---------------------------------


def _assert_liminf(p, tol):
    X = _load_payload_space(p["space"], p.get("exact", False))
    seq = [_fn(X, v) for v in p["sequence"]]
    target = np.array([_as(X, x) for x in p["target"]], dtype=X.dist.dtype)
    got = liminf_limit(seq).values
    return bool(np.all(np.abs(got - target) <= _as(X, p["bound"]) + tol))


def check_liminf_identity(X: Optional[MetricSpace] = None, trials: Optional[int] = None, cfg: Config = Config(), terms: int = 50) -> CheckResult:
    """``max_n min_{k>=n} f_k`` recovers the pointwise limit of a bounded sequence.

    Each trial builds ``f_k = f + a_k p_k`` with ``a_k = A/k`` and ``|p_k| <= 1``,
    then checks: with a constant tail appended the combination equals ``f``
    exactly; without it the error is at most ``a_K``; every tail meet lies in
    ``[f - a_n, f + a_K]``; constant and increasing sequences return their
    last element.
    """
    trials = cfg.trials if trials is None else trials
    pol = EXACT if cfg.exact else cfg.tol
    t = _Tally("liminf_identity")
    for k in range(trials):
        rng = gen.rng_for(cfg.seed, "liminf", k)
        if X is None:
            Z = gen.random_space(rng, int(rng.integers(1, 9)), pointed=True, kind=("graph", "euclidean", "ultra")[k % 3])
            Z = _exactify(Z, cfg.exact)
        else:
            Z = X
        f = _fn(Z, _uniform(rng, Z, -2, 2))
        A = _as(Z, rng.uniform(0.1, 1.0))
        amps = [A / k_ for k_ in range(1, terms + 1)]
        seq = [f + _uniform(rng, Z, -1, 1) * a for a in amps]
        slack = pol.slack(2.0 + float(A))

        # constant tail: exact recovery
        got = liminf_limit(seq + [f, f])
        res_tail = float(np.abs(got.values - f.values).max())
        t.record(
            res_tail == 0,
            res_tail,
            lambda: {"assertion": "liminf", "exact": Z.exact, "space": _space_payload(Z), "sequence": [_vals(g.values) for g in seq + [f, f]], "target": _vals(f.values), "bound": 0},
        )

        # shrinking amplitude: error at most the last amplitude
        got = liminf_limit(seq)
        res = float(np.abs(got.values - f.values).max())
        ok = res <= float(amps[-1]) + slack
        t.record(
            ok,
            max(0.0, res - float(amps[-1])),
            lambda: {"assertion": "liminf", "exact": Z.exact, "space": _space_payload(Z), "sequence": [_vals(g.values) for g in seq], "target": _vals(f.values), "bound": encode_number(amps[-1])},
        )

        # tail meets bracket the limit
        tails = tail_meets(seq)
        low = np.all([np.all(tails[i] >= f.values - amps[i] - slack) for i in range(terms)])
        high = np.all(tails <= f.values + amps[-1] + slack)
        t.record(bool(low and high), 0.0, lambda: {"assertion": "liminf_tails", "exact": Z.exact, "space": _space_payload(Z), "sequence": [_vals(g.values) for g in seq], "target": _vals(f.values)})

        # monotone increasing and constant sequences
        steps = [abs(x) for x in _uniform(rng, Z, 0, 1)]
        inc = [f + np.array(steps, dtype=Z.dist.dtype) * _as(Z, i) for i in range(5)]
        ok_inc = bool(np.all(liminf_limit(inc).values == inc[-1].values))
        ok_const = bool(np.all(liminf_limit([f, f, f]).values == f.values))
        t.record(ok_inc and ok_const, 0.0, lambda: {"assertion": "liminf_monotone", "exact": Z.exact, "space": _space_payload(Z), "sequence": [_vals(g.values) for g in inc]})
    return t.done()


# -- lattice bound --------------------------------------------------------------


def check_lattice_bound(X: Optional[MetricSpace] = None, trials: Optional[int] = None, cfg: Config = Config()) -> CheckResult:
    """``L(f v g)`` and ``L(f ^ g)`` never exceed ``max(L(f), L(g))``."""
    trials = cfg.trials if trials is None else trials
    pol = EXACT if cfg.exact else cfg.tol
    t = _Tally("lattice_bound")
    for k in range(trials):
        rng = gen.rng_for(cfg.seed, "lattice", k)
        if X is None:
            Z = gen.random_space(rng, int(rng.integers(2, 11)), kind=("graph", "euclidean", "ultra")[k % 3])
            Z = _exactify(Z, cfg.exact)
        else:
            Z = X
        f = _fn(Z, _uniform(rng, Z, -3, 3))
        g = _fn(Z, _uniform(rng, Z, -3, 3))
        bound = max(lipschitz_number(f), lipschitz_number(g))
        Lj, Lm = lipschitz_number(join(f, g)), lipschitz_number(meet(f, g))
        worst = max(Lj, Lm)
        t.record(
            pol.leq(worst, bound),
            max(0.0, float(worst - bound)),
            lambda: {"assertion": "lattice", "exact": Z.exact, "space": _space_payload(Z), "f": _vals(f.values), "g": _vals(g.values)},
        )
    return t.done()


def _assert_lattice(p, tol):
    X = _load_payload_space(p["space"], p.get("exact", False))
    f, g = _fn(X, p["f"]), _fn(X, p["g"])
    bound = max(lipschitz_number(f), lipschitz_number(g))
    return max(lipschitz_number(join(f, g)), lipschitz_number(meet(f, g))) <= bound + tol


# -- rescaling -----------------------------------------------------------------


def _assert_rescale(p, tol):
    X = _load_payload_space(p["space"], p.get("exact", False))
    f = _fn(X, p["f"])
    r = _as(X, Fraction(p["r"]))
    L = lipschitz_number(f)
    Lr = lipschitz_number(LipFunction(rescale(X, r), f.values))
    return abs(Lr - L / r) <= tol * max(1.0, float(abs(L / r)))


def check_rescale(X: Optional[MetricSpace] = None, r=None, trials: Optional[int] = None, cfg: Config = Config(), tol=IDENTITY_TOL) -> CheckResult:
    """Lipschitz numbers scale by ``1/r`` under ``d -> r d``; after ``r = 1/diam`` sup <= L on Lip0."""
    trials = cfg.trials if trials is None else trials
    pol = EXACT if cfg.exact else cfg.tol
    tol = 0 if cfg.exact else tol
    t = _Tally("rescale")
    sup_checks = 0
    for k in range(trials):
        rng = gen.rng_for(cfg.seed, "rescale", k)
        if X is None:
            Z = gen.random_space(rng, int(rng.integers(2, 13)), kind=("graph", "euclidean", "ultra")[k % 3])
            Z = _exactify(Z, cfg.exact)
        else:
            Z = X
        if r is not None:
            rr = _as(Z, r)
        elif k % 2 == 0:
            rr = _as(Z, 0.25)
        else:
            rr = _as(Z, Fraction(int(rng.integers(1, 400)), 40)) if Z.exact else float(rng.uniform(0.05, 10))
        f = _fn(Z, _uniform(rng, Z, -3, 3))
        L = lipschitz_number(f)
        Lr = lipschitz_number(LipFunction(rescale(Z, rr), f.values))
        rel = abs(Lr - L / rr) / max(1.0, float(abs(L / rr)))
        t.record(
            rel <= tol,
            rel,
            lambda: {"assertion": "rescale", "exact": Z.exact, "space": _space_payload(Z), "f": _vals(f.values), "r": str(Fraction(rr))},
        )

        # shrink so every point is within 1 of the base: then sup <= L on Lip0
        inv = Fraction(1) / Fraction(Z.diameter()) if Z.exact else 1.0 / float(Z.diameter())
        Zs = rescale(Z, inv)
        if all(pol.leq(x, _as(Z, 1)) for x in Zs.base_distances()):
            sup_checks += 1
            f0 = _fn(Zs, f.values - f.values[Zs.base_index])
            s, L0 = sup_norm(f0), lipschitz_number(f0)
            t.record(
                pol.leq(s, L0),
                max(0.0, float(s - L0)),
                lambda: {"assertion": "sup_below_lip", "exact": Z.exact, "space": _space_payload(Zs), "f": _vals(f0.values)},
            )
    return t.done(tolerance=float(tol), sup_checks=sup_checks)


def _assert_sup_below_lip(p, tol):
    X = _load_payload_space(p["space"], p.get("exact", False))
    f = _fn(X, p["f"])
    return sup_norm(f) <= lipschitz_number(f) + tol


# -- the three-ball description of the ideal of a ball --------------------------


def _ideal_verdict(f: LipFunction, h: LipFunction, ball_idx, pol: TolerancePolicy):
    member = ideal_membership(f, ball_idx, pol)
    Lp = lipschitz_number(f + h)
    Lm = lipschitz_number(f - h)
    one = _as(f.space, 1)
    in_balls = pol.leq(Lp, one) and pol.leq(Lm, one)
    return member, in_balls, max(Lp, Lm)


def _ideal_candidates(rng, X: MetricSpace, ball_idx, n, count, adversarial: bool):
    """Yield unit-ball Lip0 functions: random, ideal members, spiked members, h-ramps."""
    one = _as(X, 1)
    zero = 0 * one
    rho = X.base_distances()
    inside = np.zeros(X.n, dtype=bool)
    inside[ball_idx] = True
    e = X.base_index
    r = _as(X, n)
    ramp = np.array([max(zero, x - r) for x in rho], dtype=X.dist.dtype)
    hv = np.array([min(x, r) for x in rho], dtype=X.dist.dtype)
    ball_nonbase = [i for i in ball_idx if i != e]

    def member():
        v = _uniform(rng, X, -2, 2)
        v[inside] = zero
        return _into_ball(X, v)

    for c in range(count):
        if adversarial:
            kind = c % 4
            if kind == 0:
                v = member()
                p = ball_nonbase[int(rng.integers(len(ball_nonbase)))]
                eps = _as(X, Fraction(1, 10 ** int(rng.integers(1, 7))))
                v = v.copy()
                v[p] = eps if rng.integers(2) else -eps
                v = _into_ball(X, v)
            elif kind == 1:
                v = ramp * _as(X, Fraction(int(rng.integers(-4, 5)), 4))
            elif kind == 2:
                s = _as(X, Fraction(int(rng.integers(1, 9)), 8)) * (1 if rng.integers(2) else -1)
                v = _into_ball(X, hv * s)
            else:
                v = member() if rng.integers(2) else np.full(X.n, zero, dtype=X.dist.dtype)
        else:
            kind = c % 3
            if kind == 0:
                v = _uniform(rng, X, -float(n), float(n))
                v[e] = zero
                v = _into_ball(X, v)
            elif kind == 1:
                v = member()
            else:
                v = member()
                p = ball_nonbase[int(rng.integers(len(ball_nonbase)))]
                v = v.copy()
                v[p] = _uniform(rng, X, -1, 1, size=1)[0] or _as(X, Fraction(1, 1000))
                v = _into_ball(X, v)
        v = v.copy()
        v[e] = zero
        yield _fn(X, v)


def _assert_ideal(p, tol):
    X = _load_payload_space(p["space"], p.get("exact", False))
    pol = EXACT if X.exact else TolerancePolicy()
    f = _fn(X, p["f"])
    n = _as(X, Fraction(p["n"]))
    _, idx = closed_ball(X, n, pol)
    member, in_balls, _ = _ideal_verdict(f, h_function(X, n), idx, pol)
    if p.get("direction") == "if":
        return member or not in_balls
    return member == in_balls


def grid_radius_ok(X: MetricSpace, n, pol: TolerancePolicy) -> bool:
    rho = X.base_distances()
    r = _as(X, n)
    return any(pol.close(x, r) for x in rho) and r > 0 and pol.leq(r, max(rho)) and not pol.close(r, max(rho))


def check_ideal_ball_identity(
    grid: MetricSpace,
    n,
    trials: Optional[int] = None,
    cfg: Config = Config(),
    adversarial: int = 100,
    tag: str = "",
) -> CheckResult:
    """On a line grid: f in the unit ball vanishes on the ball of radius n iff ``L(f + h) <= 1`` and ``L(f - h) <= 1``.

    ``n`` must be a grid point strictly inside the grid.
    """
    trials = cfg.trials if trials is None else trials
    pol = EXACT if grid.exact else cfg.tol
    if not grid.pointed:
        raise ValueError("grid must be pointed")
    if not grid_radius_ok(grid, n, pol):
        raise ValueError(f"radius {n} is not an interior grid point")
    t = _Tally("ideal_ball_identity")
    h = h_function(grid, n)
    _, ball_idx = closed_ball(grid, n, pol)
    rng = gen.rng_for(cfg.seed, "ideal", tag, str(Fraction(n).limit_denominator(10**6)), grid.n)
    members = 0
    for adv, count in ((False, trials), (True, adversarial)):
        for f in _ideal_candidates(rng, grid, ball_idx, n, count, adv):
            member, in_balls, worst = _ideal_verdict(f, h, ball_idx, pol)
            members += member
            t.record(
                member == in_balls,
                max(0.0, float(worst) - 1.0) if member else 0.0,
                lambda: {"assertion": "ideal", "exact": grid.exact, "space": _space_payload(grid), "n": str(Fraction(n)), "f": _vals(f.values), "member": bool(member), "within_balls": bool(in_balls)},
            )
    return t.done(members=members, n=encode_number(_as(grid, n)), points=grid.n)


def check_ideal_if_direction(X: MetricSpace, n, trials: int, cfg: Config = Config(), tag: str = "") -> CheckResult:
    """Convexity-free half: ``L(f +- h) <= 1`` forces f to vanish on the ball (any pointed space).

    The converse needs convexity; how often it fails here is reported in
    ``details['converse_failures']`` for information only.
    """
    pol = EXACT if X.exact else cfg.tol
    t = _Tally("ideal_if_direction")
    h = h_function(X, n)
    _, ball_idx = closed_ball(X, n, pol)
    rng = gen.rng_for(cfg.seed, "ideal-if", tag)
    converse = 0
    if len(ball_idx) < 2:
        return t.done(skipped="ball contains only the base point", converse_failures=0)
    for adv, count in ((False, trials), (True, max(1, trials // 100))):
        for f in _ideal_candidates(rng, X, ball_idx, n, count, adv):
            member, in_balls, _ = _ideal_verdict(f, h, ball_idx, pol)
            converse += member and not in_balls
            t.record(
                member or not in_balls,
                0.0,
                lambda: {"assertion": "ideal", "direction": "if", "exact": X.exact, "space": _space_payload(X), "n": str(Fraction(n)), "f": _vals(f.values)},
            )
    return t.done(converse_failures=int(converse))


def ideal_grid_configs(lengths=(3, 4, 8), spacings=(1, 0.5)):
    """Every (length, spacing, n) with n an interior grid point."""
    for length in lengths:
        for s in spacings:
            k = int(round(length / s))
            for i in range(1, k):
                yield length, s, Fraction(s).limit_denominator(1000) * i


def run_ideal_suite(cfg: Config = Config(), trials: Optional[int] = None, adversarial: int = 100, nonconvex: int = 50) -> CheckResult:
    """All grid configurations plus the convexity-free half on random spaces."""
    trials = cfg.trials if trials is None else trials
    agg = CheckResult("ideal_ball_identity")
    per = []
    for length, s, n in ideal_grid_configs():
        G = interval_grid(length, s, exact=cfg.exact)
        nn = n if cfg.exact else float(n)
        r = check_ideal_ball_identity(G, nn, trials, cfg, adversarial, tag=f"{length}/{s}")
        _merge(agg, r)
        per.append({"length": length, "spacing": s, "n": float(n), "passed": r.passed, "members": r.details["members"]})
    conv = 0
    for k, X in enumerate(_random_spaces(cfg, "ideal-nonconvex", nonconvex, sizes=(4, 10))):
        rho = sorted(float(x) for x in X.base_distances())
        n = rho[len(rho) // 2]
        n = Fraction(n).limit_denominator(10**6) if X.exact else n
        r = check_ideal_if_direction(X, _as(X, n), max(1, trials // 100), cfg, tag=str(k))
        conv += r.details["converse_failures"]
        _merge(agg, r)
    agg.details.update(configurations=per, nonconvex_spaces=nonconvex, nonconvex_converse_failures=conv)
    return agg


def _merge(agg: CheckResult, r: CheckResult):
    agg.trials += r.trials
    agg.max_residual = max(agg.max_residual, r.max_residual)
    if not r.passed and agg.counterexample is None:
        agg.counterexample = r.counterexample
        agg.passed = False


# -- mediant inequality ----------------------------------------------------------


def check_elementary_inequality(trials: Optional[int] = None, cfg: Config = Config(), batch: int = 100_000) -> CheckResult:
    """``(b + d)/(a + c) <= max(b/a, d/c)`` for ``a, c > 0``, ``b, d >= 0``; equality when ratios agree."""
    trials = 1_000_000 if trials is None else trials
    t = CheckResult("elementary_inequality")
    rtol = 0 if cfg.exact else cfg.tol.rtol
    done = 0
    chunk = 0
    while done < trials:
        m = min(batch, trials - done)
        rng = gen.rng_for(cfg.seed, "mediant", chunk)
        if cfg.exact:
            q = lambda lo, hi: [Fraction(int(x), 97) for x in rng.integers(lo, hi, size=m)]
            a, c = np.array(q(1, 10_000), dtype=object), np.array(q(1, 10_000), dtype=object)
            b, d = np.array(q(0, 10_000), dtype=object), np.array(q(0, 10_000), dtype=object)
        else:
            a, c = np.exp(rng.uniform(-8, 8, (2, m)))
            b, d = np.exp(rng.uniform(-8, 8, (2, m)))
            b[rng.random(m) < 0.05] = 0.0
            d[rng.random(m) < 0.05] = 0.0
        # every tenth tuple has equal ratios
        eq = np.arange(m) % 10 == 0
        d = np.where(eq, b / a * c, d)
        lhs = (b + d) / (a + c)
        rhs = np.maximum(b / a, d / c)
        excess = lhs - rhs
        slack = rtol * rhs
        bad = excess > slack
        eq_bad = eq & (np.abs(excess) > slack + (0 if cfg.exact else 4e-16 * rhs))
        viol = bad | eq_bad
        if cfg.exact:
            res = 0.0
        else:
            res = float(np.max(np.maximum(excess, 0) / np.maximum(rhs, 1e-300)))
        t.max_residual = max(t.max_residual, res)
        if viol.any() and t.counterexample is None:
            i = int(np.argmax(viol))
            t.passed = False
            t.counterexample = {"assertion": "mediant", "trial": done + i, "a": encode_number(a[i]), "b": encode_number(b[i]), "c": encode_number(c[i]), "d": encode_number(d[i])}
        done += m
        chunk += 1
    t.trials = trials
    return t


def _assert_mediant(p, tol):
    a, b, c, d = (Fraction(p[k]) for k in "abcd")
    return (b + d) / (a + c) <= max(b / a, d / c)


# -- the alternating molecule ----------------------------------------------------


def run_example_2_5(N_max: int = 8, cfg: Config = Config(), tol=EXAMPLE_TOL) -> CheckResult:
    """Norms of the truncated alternating molecules stay below 2/3 while positive mass grows.

    For each N: both solvers give ``(2/3)(1 - 4^-(N+1))``; the positive part
    pairs with the indicator of the interval to exactly ``N + 1``; the test
    function ``f_N`` lies in ``[0, 1]`` and pairs with ``m_N`` to ``N + 1``.
    The ratio of positive mass to norm must increase strictly in N.
    """
    if not 0 <= N_max <= fs.EXAMPLE_MAX_N:
        raise ValueError(f"N_max must lie in [0, {fs.EXAMPLE_MAX_N}]")
    exact = cfg.exact
    t = _Tally("example_2_5")
    table = []
    prev_ratio = None
    for N in range(N_max + 1):
        Y, m = fs.example_molecule(N, exact)
        primal, dual, plan, cert, report = fs.certify(m)
        target = fs.example_norm_formula(N, exact)
        mplus, _ = fs.minimal_positive_decomposition(m)
        ind = LipFunction.of(Y, [0 if i == Y.base_index else 1 for i in range(Y.n)])
        mass = fs.pairing(mplus, ind)
        fN = fs.example_test_function(N, Y, exact)
        pf = fs.pairing(m, fN)
        f_range = bool(np.all(fN.values >= 0) and np.all(fN.values <= 1))
        f_lip = lipschitz_number(LipFunction(Y.restrict(range(Y.n - 1)), fN.values[:-1]))
        err = max(abs(float(primal) - float(target)), abs(float(dual) - float(target)))
        ratio = float(mass) / float(primal)
        checks = {
            "norm_formula": (err == 0) if exact else err <= tol,
            "positive_mass": mass == N + 1,
            "test_function_pairing": pf == N + 1,
            "test_function_range": f_range,
            "norm_below_two_thirds": (primal <= Fraction(2, 3)) if exact else float(primal) <= 2 / 3 + tol,
            "certificates": report.ok,
            "ratio_increasing": prev_ratio is None or ratio > prev_ratio,
        }
        row = {
            "N": N,
            "ae_norm_primal": encode_number(primal),
            "ae_norm_dual": encode_number(dual),
            "formula": encode_number(target),
            "positive_mass": encode_number(mass),
            "pairing_f_N": encode_number(pf),
            "lip_f_N": encode_number(f_lip),
            "ratio": ratio,
        }
        table.append(row)
        failed = [k for k, v in checks.items() if not v]
        t.record(not failed, err, lambda: {"assertion": "example_2_5", "N": N, "exact": exact, "failed": failed, "row": row})
        prev_ratio = ratio
    return t.done(table=table, tolerance=float(tol))


def _assert_example(p, tol):
    r = run_example_2_5(p["N"], Config(exact=p.get("exact", False)))
    return r.passed


# -- duality and the isometric embedding ----------------------------------------


def check_duality(cfg: Config = Config(), n_spaces: int = 200, molecules: int = 5, sizes=(3, 12), gap_rtol: float = DUALITY_RTOL) -> CheckResult:
    """Primal transport and dual Lipschitz LP agree on random molecules; all certificates verify."""
    t = _Tally("duality")
    pol = EXACT if cfg.exact else cfg.tol
    worst_gap = 0.0
    for s, X in enumerate(_random_spaces(cfg, "duality", n_spaces, sizes)):
        rng = gen.rng_for(cfg.seed, "duality", "molecules", s)
        for j in range(molecules):
            if j == 0 and s == 0:
                m = fs.Molecule.zero(X)
            else:
                m = gen.random_molecule(rng, X, support=int(rng.integers(1, X.n + 1)))
                if X.exact:
                    m = fs.Molecule.of(X, [Fraction(x).limit_denominator(1000) for x in m.coeffs])
            primal, dual, plan, cert, report = fs.certify(m, pol)
            gap = float(abs(primal - dual))
            rel = gap / max(1.0, float(primal))
            worst_gap = max(worst_gap, rel)
            ok = report.ok and ((gap == 0) if X.exact else rel <= gap_rtol)
            t.record(ok, rel, lambda: {"assertion": "duality", "exact": X.exact, "space": _space_payload(X), "coeffs": _vals(m.coeffs), "failures": report.failures, "primal": float(primal), "dual": float(dual)})
    return t.done(max_relative_gap=worst_gap, gap_rtol=gap_rtol)


def _assert_duality(p, tol):
    X = _load_payload_space(p["space"], p.get("exact", False))
    m = fs.Molecule.of(X, p["coeffs"])
    primal, dual, _, _, report = fs.certify(m)
    return report.ok


def check_isometric_embedding(cfg: Config = Config(), n_spaces: int = 50, sizes=(2, 12), tol=EMBEDDING_TOL, spaces=None) -> CheckResult:
    """Norms of ``delta_p - delta_q`` and ``delta_p`` equal ``d(p, q)`` and ``d(p, e)`` under both solvers."""
    t = _Tally("isometric_embedding")
    tol = 0 if cfg.exact else tol
    if spaces is None:
        spaces = list(_random_spaces(cfg, "embedding", n_spaces, sizes))
        spaces.append(fs.example_space(2, cfg.exact))
    for X in spaces:
        e = X.base_index
        for p in range(X.n):
            for q in range(p, X.n):
                if p == q and p == e:
                    continue
                c = [0] * X.n
                c[p] += 1
                if q != p:
                    c[q] -= 1
                    expect = X.dist[p, q]
                else:
                    expect = X.dist[p, e]
                m = fs.Molecule.of(X, c)
                primal = fs.ae_norm_primal(m)[0]
                dual = fs.ae_norm_dual(m)[0]
                res = max(abs(float(primal) - float(expect)), abs(float(dual) - float(expect)))
                ok = (primal == expect and dual == expect) if X.exact else res <= tol
                t.record(ok, res, lambda: {"assertion": "embedding", "exact": X.exact, "space": _space_payload(X), "coeffs": _vals(m.coeffs), "expected": encode_number(expect)})
    return t.done(tolerance=float(tol), spaces=len(spaces))


def _assert_embedding(p, tol):
    X = _load_payload_space(p["space"], p.get("exact", False))
    m = fs.Molecule.of(X, p["coeffs"])
    exp = _as(X, Fraction(p["expected"]))
    a, b = fs.ae_norm_primal(m)[0], fs.ae_norm_dual(m)[0]
    return max(abs(a - exp), abs(b - exp)) <= (tol or 0)


# -- dispatch --------------------------------------------------------------------

_REPLAY = {
    "amalgam": _assert_amalgam,
    "ball_translation": _assert_ball_translation,
    "liminf": _assert_liminf,
    "lattice": _assert_lattice,
    "rescale": _assert_rescale,
    "sup_below_lip": _assert_sup_below_lip,
    "ideal": _assert_ideal,
    "mediant": _assert_mediant,
    "example_2_5": _assert_example,
    "duality": _assert_duality,
    "embedding": _assert_embedding,
}


def replay(payload: dict, tol=IDENTITY_TOL) -> bool:
    """Re-run the assertion a counterexample came from; True means it now holds."""
    fn = _REPLAY.get(payload.get("assertion"))
    if fn is None:
        raise KeyError(f"no replayable assertion {payload.get('assertion')!r}")
    if payload.get("exact"):
        tol = 0
    return bool(fn(payload, tol))


SUITES = {
    "amalgam": lambda cfg: check_amalgam_isometry(cfg=cfg),
    "ball-translation": lambda cfg: check_ball_translation(cfg=cfg),
    "liminf": lambda cfg: check_liminf_identity(trials=max(1, cfg.trials // 10), cfg=cfg),
    "lattice": lambda cfg: check_lattice_bound(cfg=cfg),
    "rescale": lambda cfg: check_rescale(cfg=cfg),
    "ideal-ball": lambda cfg: run_ideal_suite(cfg),
    "elementary": lambda cfg: check_elementary_inequality(trials=100 * cfg.trials, cfg=cfg),
    "example25": lambda cfg: run_example_2_5(8, cfg),
    "duality": lambda cfg: check_duality(cfg, n_spaces=max(1, min(200, cfg.trials // 5))),
    "embedding": lambda cfg: check_isometric_embedding(cfg, n_spaces=max(1, min(50, cfg.trials))),
}


def run_suite(name: str, cfg: Config = Config()) -> CheckResult:
    try:
        fn = SUITES[name]
    except KeyError:
        raise KeyError(f"unknown suite {name!r}; choose from {sorted(SUITES)}") from None
    return fn(cfg)
