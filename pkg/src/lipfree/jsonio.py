"""JSON formats for spaces, functions, molecules, certificates and reports.

Space:     {"points": [...], "base": label | null, "dist": [[...], ...]}
Function:  {"space": "<id-or-path>", "values": {label: number, ...}}
Molecule:  {"space": "<id-or-path>", "coeffs": {label: number, ...}}

Numbers may be JSON numbers or, for exact mode, strings such as "1/3".
"""

from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path

import numpy as np

from .config import DEFAULT_TOLERANCE, TolerancePolicy
from .free_space import DualCertificate, Molecule, TransportPlan
from .lip_functions import LipFunction
from .metric_core import DEFAULT_MAX_POINTS, MetricSpace, validate


class FormatError(ValueError):
    """Malformed or inconsistent input file."""


class LabelMismatchError(FormatError):
    """A function or molecule names points its space does not have, or misses some."""


def _num(x, exact: bool):
    if isinstance(x, bool) or not isinstance(x, (int, float, str)):
        raise FormatError(f"not a number: {x!r}")
    if exact:
        try:
            return Fraction(x)
        except (ValueError, ZeroDivisionError):
            raise FormatError(f"not a rational number: {x!r}") from None
    if isinstance(x, str):
        try:
            return float(Fraction(x))
        except (ValueError, ZeroDivisionError):
            raise FormatError(f"not a number: {x!r}") from None
    return float(x)


def encode_number(x):
    if isinstance(x, Fraction):
        return str(x) if x.denominator != 1 else int(x)
    if isinstance(x, (np.integer,)):
        return int(x)
    return float(x)


def _read(source):
    if isinstance(source, dict):
        return source, None
    path = Path(source)
    try:
        with open(path) as fh:
            return json.load(fh), path
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: malformed JSON ({exc})") from None


def space_from_json(
    data,
    *,
    exact: bool = False,
    policy: TolerancePolicy = DEFAULT_TOLERANCE,
    max_points: int = DEFAULT_MAX_POINTS,
) -> MetricSpace:
    data, _ = _read(data)
    if not isinstance(data, dict) or "points" not in data or "dist" not in data:
        raise FormatError("space file needs 'points' and 'dist'")
    points = data["points"]
    dist = data["dist"]
    if not isinstance(points, list) or not isinstance(dist, list):
        raise FormatError("'points' and 'dist' must be lists")
    if len(dist) != len(points) or any(not isinstance(r, list) or len(r) != len(points) for r in dist):
        raise FormatError(f"'dist' must be a full {len(points)}x{len(points)} matrix")
    rows = [[_num(x, exact) for x in row] for row in dist]
    return validate(rows, [str(p) for p in points], data.get("base"), policy=policy, exact=exact, max_points=max_points)


def space_to_json(X: MetricSpace) -> dict:
    return {
        "points": list(X.point_ids),
        "base": X.base,
        "dist": [[encode_number(x) for x in row] for row in X.dist],
    }


def _labelled(data, key, X: MetricSpace, *, require_all: bool):
    if not isinstance(data, dict) or not isinstance(data.get(key), dict):
        raise FormatError(f"file needs a '{key}' object")
    table = data[key]
    unknown = [k for k in table if k not in X.point_ids]
    if unknown:
        raise LabelMismatchError(f"points not in the space: {unknown}")
    if require_all:
        missing = [p for p in X.point_ids if p not in table]
        if missing:
            raise LabelMismatchError(f"missing values for points: {missing}")
    return [_num(table.get(p, 0), X.exact) for p in X.point_ids]


def function_from_json(data, X: MetricSpace) -> LipFunction:
    data, _ = _read(data)
    return LipFunction.of(X, _labelled(data, "values", X, require_all=True))


def function_to_json(f: LipFunction, space_ref: str = "") -> dict:
    return {
        "space": space_ref,
        "values": {p: encode_number(v) for p, v in zip(f.space.point_ids, f.values)},
    }


def molecule_from_json(data, X: MetricSpace) -> Molecule:
    data, _ = _read(data)
    return Molecule.of(X, _labelled(data, "coeffs", X, require_all=False))


def molecule_to_json(m: Molecule, space_ref: str = "") -> dict:
    return {
        "space": space_ref,
        "coeffs": {p: encode_number(a) for p, a in zip(m.space.point_ids, m.coeffs) if a != 0},
    }


def space_ref(data) -> str | None:
    """The ``space`` field of a function or molecule file, if any."""
    data, path = _read(data)
    ref = data.get("space") if isinstance(data, dict) else None
    if ref and path is not None and not Path(ref).is_absolute():
        candidate = path.parent / ref
        if candidate.exists():
            return str(candidate)
    return ref or None


def certificate_to_json(m: Molecule, primal, dual, plan: TransportPlan, cert: DualCertificate, report=None) -> dict:
    X = m.space
    triples = [
        [X.point_ids[i], X.point_ids[j], encode_number(plan.flow[i, j])]
        for i in range(X.n)
        for j in range(X.n)
        if plan.flow[i, j] != 0
    ]
    out = {
        "primal": encode_number(primal),
        "dual": encode_number(dual),
        "gap": encode_number(abs(primal - dual)),
        "witness": {p: encode_number(v) for p, v in zip(X.point_ids, cert.witness.values)},
        "plan": triples,
    }
    if report is not None:
        out["checks"] = {
            "plan_feasible": bool(report.plan_feasible),
            "plan_cost": bool(report.plan_cost),
            "witness_feasible": bool(report.witness_feasible),
            "witness_pairing": bool(report.witness_pairing),
            "gap": bool(report.gap_ok),
            "weak_duality": bool(report.weak_duality),
        }
    return out


def dumps(obj) -> str:
    """Canonical JSON text: sorted keys, fixed separators, trailing newline."""
    return json.dumps(obj, sort_keys=True, indent=2, default=_default) + "\n"


def _default(o):
    if isinstance(o, Fraction):
        return encode_number(o)
    if isinstance(o, np.ndarray):
        return [_default(x) if not isinstance(x, (int, float, str)) else x for x in o.tolist()]
    if isinstance(o, (np.floating,)):
        return float(o)
    if isinstance(o, (np.integer,)):
        return int(o)
    if isinstance(o, (np.bool_,)):
        return bool(o)
    raise TypeError(f"not JSON serializable: {type(o).__name__}")
