"""JSON problem files and machine-readable reports.

Rationals travel as strings (``"1/2"``, ``"-3"``); JSON floats are rejected
so no precision can be lost on the way in.
"""
from __future__ import annotations

import json
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Optional

from .foliation import BoundaryOutOfRange, FoliatedPair, ToricFoliation
from .polyhedral import Fan, Wall, validate_fan
from .toric import ToricDivisor, transport


class ProblemError(ValueError):
    """Malformed or invalid input, with a JSON path to the offending value."""

    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path


_RATIONAL = re.compile(r"^\s*[+-]?\d+(\s*/\s*\d+)?\s*$")


def _reject_float(text: str):
    raise ProblemError("$", f"floating-point literal {text} is not allowed; write rationals as \"p/q\"")


def loads(text: str) -> Any:
    try:
        return json.loads(text, parse_float=_reject_float, parse_constant=_reject_float)
    except json.JSONDecodeError as exc:
        raise ProblemError(f"line {exc.lineno} column {exc.colno}", exc.msg) from None


def parse_rational(value: Any, path: str) -> Fraction:
    if isinstance(value, bool):
        raise ProblemError(path, "expected a rational, got a boolean")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str) and _RATIONAL.match(value):
        try:
            return Fraction(value.replace(" ", ""))
        except ZeroDivisionError:
            raise ProblemError(path, "zero denominator") from None
    raise ProblemError(path, f"expected a rational string like \"1/2\", got {value!r}")


def _int(value: Any, path: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ProblemError(path, f"expected an integer, got {value!r}")
    return value


def _vectors(value: Any, path: str, rank: int) -> list[tuple[int, ...]]:
    if not isinstance(value, list):
        raise ProblemError(path, "expected a list of integer vectors")
    out = []
    for i, v in enumerate(value):
        if not isinstance(v, list) or len(v) != rank:
            raise ProblemError(f"{path}[{i}]", f"expected a vector of length {rank}")
        out.append(tuple(_int(x, f"{path}[{i}][{j}]") for j, x in enumerate(v)))
    return out


def _divisor(value: Any, path: str, n: int) -> ToricDivisor:
    if not isinstance(value, dict):
        raise ProblemError(path, "expected a map from ray index to rational string")
    coeffs = [Fraction(0)] * n
    for key, c in value.items():
        if not re.fullmatch(r"\d+", str(key)) or int(key) >= n:
            raise ProblemError(f"{path}.{key}", f"not a ray index below {n}")
        coeffs[int(key)] = parse_rational(c, f"{path}.{key}")
    return ToricDivisor(tuple(coeffs))


@dataclass(frozen=True)
class Problem:
    fan: Fan
    pair: FoliatedPair
    ample: Optional[ToricDivisor] = None


KNOWN_KEYS = {"lattice_rank", "rays", "max_cones", "relative", "support", "foliation_W",
              "boundary", "moduli", "ample", "name", "comment"}


def parse_problem(data: Any) -> Problem:
    if not isinstance(data, dict):
        raise ProblemError("$", "expected a JSON object")
    for key in data:
        if key not in KNOWN_KEYS:
            raise ProblemError(f"$.{key}", "unknown field")
    for key in ("lattice_rank", "rays", "max_cones"):
        if key not in data:
            raise ProblemError(f"$.{key}", "missing field")
    rank = _int(data["lattice_rank"], "$.lattice_rank")
    if rank < 0:
        raise ProblemError("$.lattice_rank", "must be non-negative")
    rays = _vectors(data["rays"], "$.rays", rank)
    if not isinstance(data["max_cones"], list):
        raise ProblemError("$.max_cones", "expected a list of ray-index lists")
    cones = []
    for i, c in enumerate(data["max_cones"]):
        if not isinstance(c, list):
            raise ProblemError(f"$.max_cones[{i}]", "expected a list of ray indices")
        cones.append(tuple(_int(x, f"$.max_cones[{i}][{j}]") for j, x in enumerate(c)))
    relative = data.get("relative", False)
    if not isinstance(relative, bool):
        raise ProblemError("$.relative", "expected true or false")
    support = _vectors(data["support"], "$.support", rank) if "support" in data else None
    try:
        fan = Fan(rank, tuple(rays), tuple(cones), relative, tuple(support) if support else None)
    except ValueError as exc:
        raise ProblemError("$.rays/$.max_cones", str(exc)) from None
    report = validate_fan(fan)
    if not report.ok:
        v = report.violations[0]
        raise ProblemError("$.max_cones", f"invalid fan ({v.kind}): {v.detail}")
    w = data.get("foliation_W", [])
    if w == "full":
        fol = ToricFoliation.full(rank)
    else:
        fol = ToricFoliation(rank, tuple(_vectors(w, "$.foliation_W", rank)))
    n = fan.n_rays
    boundary = _divisor(data.get("boundary", {}), "$.boundary", n)
    moduli = _divisor(data["moduli"], "$.moduli", n) if "moduli" in data else None
    ample = _divisor(data["ample"], "$.ample", n) if "ample" in data else None
    try:
        pair = FoliatedPair.on(fan, fol, boundary, moduli)
    except BoundaryOutOfRange as exc:
        raise ProblemError("$.boundary", str(exc)) from None
    except ValueError as exc:
        raise ProblemError("$.moduli", str(exc)) from None
    return Problem(fan, pair, ample)


def load_problem(path: str) -> Problem:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ProblemError(path, exc.strerror or str(exc)) from None
    return parse_problem(loads(text))


# -- emitting ------------------------------------------------------------------------


def rational(x) -> str:
    return str(Fraction(x))


def divisor_json(d: ToricDivisor) -> dict[str, str]:
    return {str(i): rational(c) for i, c in enumerate(d.coeffs) if c}


def fan_json(f: Fan) -> dict:
    """Canonical form: rays sorted, cones re-indexed and sorted."""
    c = f.canonical()
    out = {
        "lattice_rank": c.lattice_rank,
        "rays": [list(r) for r in c.rays],
        "max_cones": [list(x) for x in c.cones],
        "relative": c.relative,
    }
    if c.relative:
        out["support"] = [list(g) for g in c.support]
    return out


def problem_json(f: Fan, pair: FoliatedPair, ample: ToricDivisor | None = None) -> dict:
    c = f.canonical()
    out = fan_json(f)
    out["foliation_W"] = [list(v) for v in pair.foliation.basis]
    out["boundary"] = divisor_json(transport(pair.boundary, f, c))
    if pair.moduli is not None:
        out["moduli"] = divisor_json(transport(pair.moduli, f, c))
    if ample is not None:
        out["ample"] = divisor_json(transport(ample, f, c))
    return out


def wall_json(w: Wall, index: int | None = None) -> dict:
    out = {"cone": list(w.cone), "relation": list(w.relation),
           "off_wall": [w.u_left, w.u_right]}
    if index is not None:
        out["index"] = index
    return out


def dumps(obj: Any) -> str:
    return json.dumps(obj, sort_keys=True, indent=2)


def flatten(obj: Any, prefix: str = "") -> list[tuple[str, Any]]:
    """Leaves of a JSON-like value as ``(dotted.path, value)`` pairs."""
    if isinstance(obj, dict):
        out = []
        for k in sorted(obj):
            out.extend(flatten(obj[k], f"{prefix}.{k}" if prefix else str(k)))
        return out
    if isinstance(obj, list) and obj and any(isinstance(x, (dict, list)) for x in obj):
        out = []
        for i, x in enumerate(obj):
            out.extend(flatten(x, f"{prefix}[{i}]"))
        return out
    return [(prefix, obj)]


def render_leaf(value: Any) -> str:
    if isinstance(value, list):
        return "(" + ",".join(render_leaf(x) for x in value) + ")"
    if isinstance(value, bool):
        return "true" if value else "false"
    if value is None:
        return "none"
    return str(value)

