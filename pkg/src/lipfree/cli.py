"""``lipfree`` command line.

Exit codes: 0 success / all checks pass, 1 a check failed, 2 bad input.
"""

from __future__ import annotations

import argparse
import sys
from fractions import Fraction
from pathlib import Path

from . import free_space as fs
from . import generators as gen
from . import jsonio
from . import theorem_lab as lab
from .config import Config, TolerancePolicy
from .lip_functions import SpaceMismatchError, lip_norm, lipschitz_number, sup_norm
from .metric_core import MetricError, interval_grid

SPACE_SUITES = {"amalgam", "ball-translation", "liminf", "lattice", "rescale"}


class InputError(Exception):
    pass


def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--trials", type=int, default=None)
    common.add_argument("--tol", type=float, default=None, help="relative tolerance (default 1e-9)")
    common.add_argument("--atol", type=float, default=None, help="absolute tolerance (default 1e-12)")
    common.add_argument("--format", choices=("text", "json"), default="text")
    common.add_argument("--exact", action="store_true", help="exact rational arithmetic")

    p = argparse.ArgumentParser(prog="lipfree", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("validate", parents=[common], help="check the metric axioms of a space file")
    s.add_argument("--space", required=True)

    s = sub.add_parser("lipnorm", parents=[common], help="Lipschitz number, sup norm and Lip norm of a function")
    s.add_argument("--space")
    s.add_argument("--function", required=True)

    s = sub.add_parser("aenorm", parents=[common], help="Arens-Eells norm of a molecule")
    s.add_argument("--space")
    s.add_argument("--molecule", required=True)
    s.add_argument("--certify", action="store_true", help="emit witness, plan and certificate checks")

    s = sub.add_parser("pair", parents=[common], help="pair a molecule with a function")
    s.add_argument("--space")
    s.add_argument("--function", required=True)
    s.add_argument("--molecule", required=True)

    s = sub.add_parser("verify", parents=[common], help="run verification suites")
    s.add_argument("suite", choices=sorted(lab.SUITES) + ["all"])
    s.add_argument("--space", help="fixed space for suites that accept one")
    s.add_argument("--n-max", type=int, default=8)

    s = sub.add_parser("example25", parents=[common], help="norm / positive-mass table of the alternating molecule")
    s.add_argument("--n-max", type=int, default=8)

    s = sub.add_parser("gen", parents=[common], help="write a space file")
    s.add_argument("kind", choices=("random", "grid", "augmented-interval"))
    s.add_argument("--points", type=int, default=8)
    s.add_argument("--space-kind", choices=("graph", "euclidean", "ultra"), default="graph")
    s.add_argument("--unpointed", action="store_true")
    s.add_argument("--length", type=float, default=None)
    s.add_argument("--spacing", type=float, default=None)
    s.add_argument("--n", type=int, default=None)
    s.add_argument("--out", "-o")
    return p


def _config(args) -> Config:
    tol = TolerancePolicy(
        rtol=1e-9 if args.tol is None else args.tol,
        atol=1e-12 if args.atol is None else args.atol,
    )
    if tol.rtol <= 0 or tol.atol <= 0:
        raise InputError("tolerances must be positive")
    trials = 10_000 if args.trials is None else args.trials
    if trials < 1:
        raise InputError("--trials must be >= 1")
    return Config(seed=args.seed, trials=trials, tol=tol, exact=args.exact)


def _load_space(path, cfg: Config):
    try:
        return jsonio.space_from_json(path, exact=cfg.exact, policy=cfg.tol, max_points=cfg.max_points)
    except FileNotFoundError:
        raise InputError(f"space file not found: {path}") from None
    except MetricError as exc:
        raise InputError(f"invalid metric space in {path}: [{exc.axiom}] {exc}") from None


def _space_for(args, cfg, *files):
    if args.space:
        return _load_space(args.space, cfg)
    for f in files:
        ref = jsonio.space_ref(f)
        if ref and Path(ref).exists():
            return _load_space(ref, cfg)
    raise InputError("no --space given and no readable 'space' reference in the input files")


def _emit(args, obj, text: str):
    if args.format == "json":
        sys.stdout.write(jsonio.dumps(obj))
    else:
        sys.stdout.write(text.rstrip("\n") + "\n")


def _fmt(x) -> str:
    if isinstance(x, Fraction):
        return str(x)
    return repr(float(x))


def cmd_validate(args, cfg):
    try:
        X = jsonio.space_from_json(args.space, exact=cfg.exact, policy=cfg.tol, max_points=cfg.max_points)
    except MetricError as exc:
        w = list(exc.witness) if exc.witness is not None else None
        _emit(args, {"valid": False, "axiom": exc.axiom, "witness": w, "message": str(exc)}, f"invalid [{exc.axiom}] {exc}")
        return 1
    _emit(
        args,
        {"valid": True, "points": X.n, "base": X.base, "diameter": jsonio.encode_number(X.diameter())},
        f"valid metric space: {X.n} points, base {X.base!r}, diameter {_fmt(X.diameter())}",
    )
    return 0


def cmd_lipnorm(args, cfg):
    X = _space_for(args, cfg, args.function)
    f = jsonio.function_from_json(args.function, X)
    L, s, n = lipschitz_number(f), sup_norm(f), lip_norm(f)
    out = {"lipschitz_number": jsonio.encode_number(L), "sup_norm": jsonio.encode_number(s), "lip_norm": jsonio.encode_number(n)}
    text = f"L(f)       = {_fmt(L)}\n||f||_inf  = {_fmt(s)}\n||f||_L    = {_fmt(n)}"
    if X.pointed:
        out["vanishes_at_base"] = bool(f.vanishes_at_base(cfg.policy))
        text += f"\nf(base)=0  = {out['vanishes_at_base']}"
    _emit(args, out, text)
    return 0


def cmd_aenorm(args, cfg):
    X = _space_for(args, cfg, args.molecule)
    if not X.pointed:
        raise InputError("molecules need a pointed space (set 'base')")
    m = jsonio.molecule_from_json(args.molecule, X)
    primal, dual, plan, cert, report = fs.certify(m, cfg.policy)
    out = jsonio.certificate_to_json(m, primal, dual, plan, cert, report if args.certify else None)
    if not args.certify:
        out = {k: out[k] for k in ("primal", "dual", "gap")}
    lines = [f"ae_norm (transport) = {_fmt(primal)}", f"ae_norm (dual LP)   = {_fmt(dual)}", f"gap                 = {_fmt(abs(primal - dual))}"]
    if args.certify:
        lines.append("witness: " + ", ".join(f"{p}={_fmt(v)}" for p, v in zip(X.point_ids, cert.witness.values)))
        lines.append("plan: " + (", ".join(f"{a}->{b}:{v}" for a, b, v in out["plan"]) or "(empty)"))
        lines.append("certificates: " + ("ok" if report.ok else "FAILED " + ",".join(report.failures)))
    _emit(args, out, "\n".join(lines))
    return 0 if (report.ok or not args.certify) else 1


def cmd_pair(args, cfg):
    X = _space_for(args, cfg, args.molecule, args.function)
    if not X.pointed:
        raise InputError("molecules need a pointed space (set 'base')")
    f = jsonio.function_from_json(args.function, X)
    m = jsonio.molecule_from_json(args.molecule, X)
    v = fs.pairing(m, f)
    _emit(args, {"pairing": jsonio.encode_number(v)}, f"<m, f> = {_fmt(v)}")
    return 0


def _run_verify(name, args, cfg, X=None):
    if name == "example25":
        return lab.run_example_2_5(args.n_max, cfg)
    if X is not None and name in SPACE_SUITES:
        fn = {
            "amalgam": lab.check_amalgam_isometry,
            "ball-translation": lab.check_ball_translation,
            "liminf": lab.check_liminf_identity,
            "lattice": lab.check_lattice_bound,
            "rescale": lab.check_rescale,
        }[name]
        if name in ("amalgam", "ball-translation") and X.pointed:
            X = type(X)(X.point_ids, X.dist.copy(), None)
        if name in ("liminf", "lattice", "rescale") and not X.pointed:
            raise InputError(f"suite {name} needs a pointed space")
        return fn(X, cfg=cfg)
    return lab.run_suite(name, cfg)


def _text_report(r: lab.CheckResult) -> str:
    status = "PASS" if r.passed else "FAIL"
    line = f"{status} {r.check_name}: trials={r.trials} max_residual={r.max_residual!r}"
    if r.counterexample is not None:
        line += f"\n  counterexample: {jsonio.dumps(r.counterexample).strip()}"
    return line


def _table_text(r: lab.CheckResult) -> str:
    rows = r.details.get("table", [])
    head = f"{'N':>3} {'ae_norm':>22} {'(2/3)(1-4^-(N+1))':>22} {'<m+,1>':>7} {'<m,f_N>':>8} {'ratio':>10}"
    lines = [head]
    for row in rows:
        lines.append(
            f"{row['N']:>3} {str(row['ae_norm_primal']):>22} {str(row['formula']):>22} "
            f"{str(row['positive_mass']):>7} {str(row['pairing_f_N']):>8} {row['ratio']:>10.6f}"
        )
    return "\n".join(lines)


def cmd_verify(args, cfg):
    X = _load_space(args.space, cfg) if args.space else None
    names = sorted(lab.SUITES) if args.suite == "all" else [args.suite]
    results = [_run_verify(n, args, cfg, X) for n in names]
    ok = all(r.passed for r in results)
    if args.format == "json":
        payload = results[0].to_json() if len(results) == 1 else {"passed": ok, "reports": [r.to_json() for r in results]}
        sys.stdout.write(jsonio.dumps(payload))
    else:
        parts = []
        for r in results:
            parts.append(_text_report(r))
            if r.check_name == "example_2_5":
                parts.append(_table_text(r))
        sys.stdout.write("\n".join(parts) + "\n")
    return 0 if ok else 1


def cmd_example25(args, cfg):
    r = lab.run_example_2_5(args.n_max, cfg)
    _emit(args, r.to_json(), _text_report(r) + "\n" + _table_text(r))
    return 0 if r.passed else 1


def cmd_gen(args, cfg):
    if args.kind == "random":
        if args.points < 1 or args.points > cfg.max_points:
            raise InputError(f"--points must lie in [1, {cfg.max_points}]")
        rng = gen.rng_for(args.seed, "gen", args.space_kind)
        X = gen.random_space(rng, args.points, pointed=not args.unpointed, kind=args.space_kind)
        if cfg.exact:
            X = gen.to_exact(X)
    elif args.kind == "grid":
        if args.length is None or args.spacing is None:
            raise InputError("grid needs --length and --spacing")
        try:
            X = interval_grid(args.length, args.spacing, exact=cfg.exact)
        except ValueError as exc:
            raise InputError(str(exc)) from None
    else:
        if args.n is None:
            raise InputError("augmented-interval needs --n")
        try:
            X = fs.example_space(args.n, cfg.exact)
        except ValueError as exc:
            raise InputError(str(exc)) from None
    text = jsonio.dumps(jsonio.space_to_json(X))
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return 0


COMMANDS = {
    "validate": cmd_validate,
    "lipnorm": cmd_lipnorm,
    "aenorm": cmd_aenorm,
    "pair": cmd_pair,
    "verify": cmd_verify,
    "example25": cmd_example25,
    "gen": cmd_gen,
}


def main(argv=None) -> int:
    parser = _parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 2
    try:
        cfg = _config(args)
        return COMMANDS[args.command](args, cfg)
    except InputError as exc:
        print(f"lipfree: error: {exc}", file=sys.stderr)
    except (jsonio.LabelMismatchError, SpaceMismatchError) as exc:
        print(f"lipfree: space mismatch: {exc}", file=sys.stderr)
    except jsonio.FormatError as exc:
        print(f"lipfree: malformed input: {exc}", file=sys.stderr)
    except FileNotFoundError as exc:
        print(f"lipfree: file not found: {exc.filename}", file=sys.stderr)
    except (KeyError, ValueError) as exc:
        print(f"lipfree: invalid input: {exc}", file=sys.stderr)
    return 2


if __name__ == "__main__":
    sys.exit(main())
