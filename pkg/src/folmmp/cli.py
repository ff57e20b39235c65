"""Command-line front end: ``folmmp <command> --input problem.json``.

Exit codes: 0 success, 1 input error, 2 a theorem-level assertion failed
(the report is still printed), 3 internal error.
"""
from __future__ import annotations

import argparse
import os
import re
import sys
import traceback
from fractions import Fraction
from typing import Callable, Optional

from . import io
from .foliation import (FlcStatus, classical_discrepancy, classify_flc, foliated_canonical,
                        foliated_discrepancy, is_dicritical)
from .mmp import (MinimalModel, TerminationViolation, classify_contraction, negative_extremal_walls,
                  parse_strategy, run_mmp)
from .models import CertifiedStepNotTrivial, cone_bound_audit, enumerate_models, flop_connect, geography
from .polyhedral import NotInSupport, walls
from .toric import NotQCartier, ToricDivisor, canonical_divisor, intersection_number

EXIT_OK, EXIT_INPUT, EXIT_VIOLATION, EXIT_INTERNAL = 0, 1, 2, 3


class InputError(ValueError):
    pass


class ViolationReport(Exception):
    """Carries a report that must still be printed before exiting with code 2."""

    def __init__(self, report: dict, headline: str):
        super().__init__(headline)
        self.report = report
        self.headline = headline


# -- divisor expressions --------------------------------------------------------------

_TERM = re.compile(r"\s*([+-])?\s*(?:(\d+(?:/\d+)?)\s*\*?\s*)?(KF|KX|LOG|B|M|A|D\d+)\s*")


def parse_divisor(expr: str, problem: io.Problem) -> ToricDivisor:
    """Linear combinations like ``KF + 1/2*D3 - B`` over the problem's named divisors."""
    f, pair = problem.fan, problem.pair
    n = f.n_rays
    named = {
        "KF": foliated_canonical(f, pair.foliation),
        "KX": canonical_divisor(f),
        "B": pair.boundary,
        "M": pair.moduli if pair.moduli is not None else ToricDivisor.zero(n),
        "LOG": pair.log_class(f),
    }
    if problem.ample is not None:
        named["A"] = problem.ample
    out = ToricDivisor.zero(n)
    pos = 0
    text = expr.strip()
    if not text:
        raise InputError("empty divisor expression")
    while pos < len(text):
        m = _TERM.match(text, pos)
        if not m or m.end() == pos or (pos > 0 and not m.group(1)):
            raise InputError(f"cannot parse divisor expression at {text[pos:]!r}")
        sign = -1 if m.group(1) == "-" else 1
        coeff = Fraction(m.group(2)) if m.group(2) else Fraction(1)
        name = m.group(3)
        if name.startswith("D"):
            i = int(name[1:])
            if i >= n:
                raise InputError(f"no ray {i}; the fan has {n} rays")
            d = ToricDivisor.ray(n, i)
        elif name in named:
            d = named[name]
        else:
            raise InputError(f"divisor {name} is not defined by the input")
        out = out + d * (sign * coeff)
        pos = m.end()
    return out


def parse_vector(text: str, rank: int) -> tuple[int, ...]:
    try:
        v = tuple(int(x) for x in text.split(","))
    except ValueError:
        raise InputError(f"expected comma-separated integers, got {text!r}") from None
    if len(v) != rank:
        raise InputError(f"expected {rank} coordinates, got {len(v)}")
    return v


# -- reports ------------------------------------------------------------------------


def _q(x) -> str:
    return io.rational(x)


def _steps_json(trace) -> list[dict]:
    out = []
    for s in trace.steps:
        out.append({
            "kind": s.kind.value,
            "wall": list(s.wall.cone) if s.wall is not None else None,
            "value_before": _q(s.value_before) if s.value_before is not None else None,
            "value_after": _q(s.value_after) if s.value_after is not None else None,
            "fan_after": io.fan_json(s.fan_after) if s.fan_after is not None else None,
        })
    return out


def cmd_check(problem: io.Problem, args) -> tuple[dict, str]:
    f, pair = problem.fan, problem.pair
    flc = classify_flc(f, pair, depth=args.depth, jobs=args.jobs)
    dic = is_dicritical(f, pair.foliation)
    report = {
        "valid": True,
        "simplicial": f.is_simplicial,
        "flc": flc.status.value,
        "lc_places": [list(p) for p in flc.lc_places],
        "not_lc_witness": list(flc.witness) if flc.witness else None,
        "dicritical": dic.dicritical,
        "dicritical_witnesses": [{"cone": list(c), "point": list(p)} for c, p in dic.witnesses],
    }
    status = {
        FlcStatus.CERTIFIED_FLC: "F-lc (certified)",
        FlcStatus.FLC_UP_TO_DEPTH: f"F-lc up to depth {args.depth}",
        FlcStatus.NOT_LC_WITNESS: "not F-lc",
        FlcStatus.STRICTLY_LC_WITNESS: "strictly F-lc",
    }[flc.status]
    parts = [status, "dicritical" if dic.dicritical else "non-dicritical"]
    if flc.lc_places:
        parts.append("strictly lc place at " + io.render_leaf(list(flc.lc_places[0])))
    if flc.witness:
        parts.append("discrepancy below -epsilon at " + io.render_leaf(list(flc.witness)))
    return report, ", ".join(parts)


def cmd_intersect(problem: io.Problem, args) -> tuple[dict, str]:
    f = problem.fan
    ws = walls(f)
    if not 0 <= args.wall < len(ws):
        raise InputError(f"wall index {args.wall} out of range (the fan has {len(ws)} walls)")
    d = parse_divisor(args.divisor, problem)
    value = intersection_number(f, d, ws[args.wall])
    report = {"divisor": args.divisor, "wall": io.wall_json(ws[args.wall], args.wall), "value": _q(value)}
    return report, _q(value)


def cmd_rays(problem: io.Problem, args) -> tuple[dict, str]:
    f, pair = problem.fan, problem.pair
    ws = walls(f)
    rays = []
    for ray in negative_extremal_walls(f, pair):
        c = classify_contraction(ray)
        rays.append({"wall": io.wall_json(ray.wall, ws.index(ray.wall)), "value": _q(ray.value),
                     "kind": c.kind.value, "removed_ray": c.removed,
                     "negative": list(ray.negative), "positive": list(ray.positive)})
    return {"rays": rays}, f"{len(rays)} negative extremal wall class(es)"


def cmd_mmp(problem: io.Problem, args) -> tuple[dict, str]:
    strategy = parse_strategy(args.strategy)
    trace = run_mmp(problem.fan, problem.pair, strategy, cap=args.cap)
    out = trace.outcome
    if isinstance(out, MinimalModel):
        outcome = {"type": "MinimalModel", "fan": io.fan_json(out.fan)}
        head = f"{len(trace.steps)} step(s), minimal model"
    else:
        outcome = {"type": "MoriFiberSpace", "fan": io.fan_json(out.fan), "wall": list(out.wall.cone),
                   "map": [list(r) for r in out.linear_map], "target": io.fan_json(out.target),
                   "base_foliation_W": [list(v) for v in out.induced.foliation.basis],
                   "ramification": io.divisor_json(out.induced.ramification)}
        head = f"{len(trace.steps)} step(s), Mori fiber space onto rank {out.target.lattice_rank}"
    return {"steps": _steps_json(trace), "outcome": outcome}, head


def _graph(problem: io.Problem, args):
    return enumerate_models(problem.fan, problem.pair, cap=args.cap,
                            flop_closure=getattr(args, "flop_closure", False))


def cmd_models(problem: io.Problem, args) -> tuple[dict, str]:
    g = _graph(problem, args)
    nodes = [{"fan": io.fan_json(n.fan), "wall_values": [_q(v) for v in n.wall_values],
              "steps": len(n.provenance), "flops": len(n.flops)} for n in g.nodes]
    edges = [{"source": e.source, "target": e.target, "wall": list(e.wall.cone)} for e in g.edges]
    fibers = [{"fan": io.fan_json(m.fan), "target": io.fan_json(m.target)} for m in g.fiber_outcomes]
    report = {"nodes": nodes, "edges": edges, "mori_fiber_spaces": fibers, "states": g.states}
    return report, f"{len(nodes)} minimal model(s), {len(edges)} flop edge(s)"


def cmd_flops(problem: io.Problem, args) -> tuple[dict, str]:
    args.flop_closure = True
    g = _graph(problem, args)
    for i in (args.source, args.target):
        if not 0 <= i < len(g.nodes):
            raise InputError(f"model index {i} out of range ({len(g.nodes)} models)")
    path = flop_connect(g, args.source, args.target, args.method)
    report = {"method": path.method, "walls": [list(w.cone) for w in path.walls],
              "values": [_q(v) for v in path.values], "fans": [io.fan_json(x) for x in path.fans],
              "epsilon": _q(path.epsilon) if path.epsilon is not None else None,
              "cartier_index": path.cartier_index}
    return report, f"{len(path.walls)} flop(s) via {path.method}"


def cmd_geography(problem: io.Problem, args) -> tuple[dict, str]:
    family = [parse_divisor(x, problem) for x in args.family.split(";") if x.strip()] if args.family else []
    ample = parse_divisor(args.ample, problem) if args.ample else problem.ample
    geo = geography(problem.fan, problem.pair.foliation, family, ample, base=problem.pair.boundary
                    if not family else None, polarization=Fraction(args.polarization), cap=args.cap)
    chambers = [{"model": c.model, "fan": io.fan_json(c.fan), "dim": c.dim,
                 "vertices": [[_q(x) for x in v] for v in c.vertices],
                 "inequalities": [{"row": [_q(x) for x in r], "rhs": _q(b)}
                                  for r, b in zip(c.polytope.a, c.polytope.b)],
                 "equations": [{"row": [_q(x) for x in r], "rhs": _q(b)}
                               for r, b in zip(c.polytope.c, c.polytope.d)]}
                for c in geo.chambers]
    report = {"chambers": chambers, "models": [io.fan_json(m) for m in geo.models],
              "covered": geo.covered, "disjoint": geo.disjoint}
    head = f"{len(chambers)} chamber(s), covering={io.render_leaf(geo.covered)}, disjoint={io.render_leaf(geo.disjoint)}"
    if not (geo.covered and geo.disjoint):
        raise ViolationReport(report, head)
    return report, head


def cmd_discrepancy(problem: io.Problem, args) -> tuple[dict, str]:
    f, pair = problem.fan, problem.pair
    w = parse_vector(args.at, f.lattice_rank)
    a = foliated_discrepancy(f, pair, w)
    ax = classical_discrepancy(f, pair.boundary, w)
    eps = pair.foliation.epsilon(w)
    report = {"point": list(w), "foliated": _q(a), "variety": _q(ax), "epsilon": eps,
              "lc_place": a == -eps}
    return report, _q(a)


def cmd_audit(problem: io.Problem, args) -> tuple[dict, str]:
    rep = cone_bound_audit(problem.fan, problem.pair)
    ws = walls(problem.fan)
    entries = [{"wall": io.wall_json(e.wall, ws.index(e.wall)), "log_value": _q(e.value),
                "foliated_value": _q(e.foliated_value), "variety_value": _q(e.variety_value),
                "violates": e.violates, "variety_in_interval": e.variety_in_interval}
               for e in rep.entries]
    report = {"entries": entries, "violations": len(rep.violations)}
    head = f"{len(entries)} negative extremal wall(s), {len(rep.violations)} bound violation(s)"
    if rep.violations:
        raise ViolationReport(report, head)
    return report, head


COMMANDS: dict[str, Callable] = {
    "check": cmd_check, "intersect": cmd_intersect, "rays": cmd_rays, "mmp": cmd_mmp,
    "models": cmd_models, "flops": cmd_flops, "geography": cmd_geography,
    "discrepancy": cmd_discrepancy, "audit": cmd_audit,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--input", "-i", required=True, help="problem file (JSON)")
    common.add_argument("--format", choices=("text", "json"), default="text")
    common.add_argument("--depth", type=int, default=5, help="lattice sampling depth for lc checks")
    common.add_argument("--cap", type=int, default=10_000, help="MMP step cap")
    common.add_argument("--jobs", type=int, default=None, help="worker threads (default $FOLMMP_JOBS or 1)")
    parser = argparse.ArgumentParser(prog="folmmp", description="Exact toric foliated MMP engine")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("check", parents=[common], help="validate, classify singularities, test dicriticality")
    p = sub.add_parser("intersect", parents=[common], help="intersect a divisor with a wall curve")
    p.add_argument("--divisor", required=True)
    p.add_argument("--wall", type=int, required=True)
    sub.add_parser("rays", parents=[common], help="negative extremal walls")
    p = sub.add_parser("mmp", parents=[common], help="run the MMP")
    p.add_argument("--strategy", default="first", help="first | seed:N | index:i,j,...")
    p = sub.add_parser("models", parents=[common], help="enumerate minimal models")
    p.add_argument("--flop-closure", action="store_true", help="also add flop-equivalent nef models")
    p = sub.add_parser("flops", parents=[common], help="connect two models by flops")
    p.add_argument("--from", dest="source", type=int, required=True)
    p.add_argument("--to", dest="target", type=int, required=True)
    p.add_argument("--method", choices=("certified", "bfs"), default="certified")
    p = sub.add_parser("geography", parents=[common], help="chamber decomposition of a boundary family")
    p.add_argument("--family", default="", help="divisor expressions separated by ';'")
    p.add_argument("--ample", default=None)
    p.add_argument("--polarization", default="0", help="weight of the ample class in the moduli part")
    p = sub.add_parser("discrepancy", parents=[common], help="discrepancy of the divisor over a lattice point")
    p.add_argument("--at", required=True)
    sub.add_parser("audit", parents=[common], help="cone-length audit of negative extremal walls")
    return parser


def _emit(report: dict, headline: str, fmt: str) -> None:
    if fmt == "json":
        print(io.dumps(report))
    else:
        print(headline)
        for path, value in io.flatten(report):
            print(f"{path} = {io.render_leaf(value)}")


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    if args.jobs is None:
        env = os.environ.get("FOLMMP_JOBS", "1")
        args.jobs = int(env) if env.isdigit() and int(env) > 0 else 1
    try:
        problem = io.load_problem(args.input)
        report, headline = COMMANDS[args.command](problem, args)
    except ViolationReport as exc:
        _emit(exc.report, exc.headline, args.format)
        print(f"folmmp: violation: {exc.headline}", file=sys.stderr)
        return EXIT_VIOLATION
    except (io.ProblemError, InputError, NotQCartier, NotInSupport) as exc:
        print(f"folmmp: input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (TerminationViolation, CertifiedStepNotTrivial, AssertionError) as exc:
        print(f"folmmp: theorem-level check failed: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_VIOLATION
    except ValueError as exc:
        print(f"folmmp: input error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except Exception:
        traceback.print_exc(file=sys.stderr)
        return EXIT_INTERNAL
    _emit(report, headline, args.format)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
