"""Command-line entry point ``reeb-steady``.

Exit codes: 0 success (or: admits a steady flow), 2 decisively negative
answer, 3 invalid input, 4 internal tolerance failure, 64 usage error.
Reports are JSON with sorted keys, so exact-mode runs are byte-identical.
"""
from __future__ import annotations

import argparse
import json
import random
import sys
from fractions import Fraction
from pathlib import Path
from typing import Any, Sequence

from . import catalog
from .casimirs import moment_table, orbit_equivalent
from .circulation import (
    AffineCirculationSpace,
    ArithmeticModeError,
    Infeasible,
    is_balanced,
    is_totally_negative,
    solve_circulation_space,
)
from .generators import FAMILIES, family
from .graph import InvalidGraphError, MeasuredReebGraph, validate_graph
from .measures import MeasureError, QuadratureError, realize_weight
from .numbers import ToleranceError, dump_num, parse_num
from .polytope import Empty, Feasible, boundedness, balanced_regions, enumerate_vertices, feasibility, negative_system
from .steady.certificate import InternalConsistencyError, graph_certificate
from .steady.triples import ChartError, SteadyTriple, cylinder_triple, elliptic_triple, hyperbolic_triple, verify_triple

EXIT_OK = 0
EXIT_NEGATIVE = 2
EXIT_INVALID = 3
EXIT_TOLERANCE = 4
EXIT_USAGE = 64


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # type: ignore[override]
        raise UsageError(f"{self.format_usage()}{self.prog}: error: {message}")


# -- input helpers ------------------------------------------------------------------

def _read_json(path: str) -> Any:
    try:
        with open(path) as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise InvalidGraphError([]) from exc


def _load_graph(path: str) -> MeasuredReebGraph:
    obj = _read_json(path)
    if isinstance(obj, dict) and "vertices" not in obj and "graph" in obj:
        obj = obj["graph"]  # reports that embed a graph can be fed back in
    return MeasuredReebGraph.from_json(obj)


def _numbers(text: str) -> list:
    try:
        return [parse_num(x.strip()) for x in text.split(",") if x.strip()]
    except (ValueError, ZeroDivisionError) as exc:
        raise InvalidGraphError([]) from exc


def _with_weights(g: MeasuredReebGraph, a: Sequence) -> MeasuredReebGraph:
    if len(a) != len(g.edges):
        raise ValueError(f"--a needs {len(g.edges)} values (one per edge, by id), got {len(a)}")
    return g.with_measures({e.id: realize_weight(*g.edge_range(e.id), w) for e, w in zip(g.edges, a)})


def _space(g: MeasuredReebGraph, arith: str) -> AffineCirculationSpace | Infeasible:
    return solve_circulation_space(g, arith)


def _interval(verts: Sequence[Sequence], exact: bool) -> list:
    xs = sorted(v[0] for v in verts)
    ends = (xs[0], xs[-1]) if exact else (float(xs[0]), float(xs[-1]))
    return [dump_num(x) for x in ends]


# -- subcommands ---------------------------------------------------------------------

def cmd_validate(args: argparse.Namespace) -> tuple[int, dict]:
    g = _load_graph(args.graph)
    problems = validate_graph(g)
    report = {"valid": not problems, "violations": [p.to_json() for p in problems], "graph": g.to_json()}
    return (EXIT_OK if not problems else EXIT_INVALID), report


def cmd_circulation_space(args: argparse.Namespace) -> tuple[int, dict]:
    g = _load_graph(args.graph)
    space = _space(g, args.arith)
    if isinstance(space, Infeasible):
        return EXIT_NEGATIVE, space.to_json()
    return EXIT_OK, {"status": "feasible", **space.to_json()}


def _steady_report(g: MeasuredReebGraph, arith: str, tol: float, with_vertices: bool) -> tuple[int, dict]:
    space = _space(g, arith)
    if isinstance(space, Infeasible):
        return EXIT_NEGATIVE, {"verdict": "no circulation function", **space.to_json()}
    report: dict[str, Any] = {"dim": space.dim, "coordinates": [{"edge": e, "end": end} for e, end in space.coordinates]}
    if g.closed:
        h = negative_system(g, space)
        verdict = feasibility(h, tol)
        report.update({"criterion": "totally negative", **h.to_json(), "feasibility": verdict.to_json()})
        if isinstance(verdict, Empty):
            report["verdict"] = "empty polytope"
            return EXIT_NEGATIVE, report
        report["boundedness"] = boundedness(h).to_json()
        vrep = enumerate_vertices(h) if (with_vertices or space.dim == 1) else None
        if vrep is not None:
            if with_vertices:
                report["vrep"] = vrep.to_json()
            if space.dim == 1 and vrep.vertices and not vrep.rays:
                report["interval"] = {"open": _interval(vrep.vertices, space.exact)}
        report["verdict"] = "admits steady flow"
        return EXIT_OK, report
    regions = balanced_regions(g, space)
    report.update({"criterion": "balanced", "regions": [r.to_json() for r in regions]})
    if any(isinstance(r.verdict, Feasible) for r in regions):
        report["verdict"] = "admits steady flow"
        return EXIT_OK, report
    report["verdict"] = "no balanced region"
    return EXIT_NEGATIVE, report


def cmd_check_steady(args: argparse.Namespace) -> tuple[int, dict]:
    g = _load_graph(args.graph)
    if args.a is not None:
        g = _with_weights(g, _numbers(args.a))
    if args.point is not None:
        space = _space(g, args.arith)
        if isinstance(space, Infeasible):
            return EXIT_NEGATIVE, {"verdict": "no circulation function", **space.to_json()}
        c = space.point(_numbers(args.point))
        verdict = is_totally_negative(c, args.tol) if g.closed else is_balanced(c, args.tol)
        report = {"point": args.point, "circulation": c.to_json(), **verdict.to_json()}
        return (EXIT_OK if verdict.ok else EXIT_NEGATIVE), report
    return _steady_report(g, args.arith, args.tol, False)


def cmd_polytope(args: argparse.Namespace) -> tuple[int, dict]:
    g = _load_graph(args.graph)
    return _steady_report(g, args.arith, args.tol, args.vertices)


def cmd_casimirs(args: argparse.Namespace) -> tuple[int, Any]:
    g = _load_graph(args.graph)
    table = moment_table(g, args.order)
    if args.format == "csv":
        return EXIT_OK, table.to_csv()
    return EXIT_OK, table.to_json()


def cmd_orbit_equiv(args: argparse.Namespace) -> tuple[int, dict]:
    g1, g2 = _load_graph(args.first), _load_graph(args.second)
    c1 = _circulation_at(g1, args.point1, args.arith)
    c2 = _circulation_at(g2, args.point2, args.arith)
    res = orbit_equivalent(g1, g2, order=args.order, tol=args.tol, c1=c1, c2=c2)
    return (EXIT_OK if res.to_json()["status"] == "equivalent" else EXIT_NEGATIVE), res.to_json()


def _circulation_at(g: MeasuredReebGraph, point: str | None, arith: str):
    if point is None:
        return None
    space = _space(g, arith)
    if isinstance(space, Infeasible):
        raise ValueError(f"graph admits no circulation function (total weight {dump_num(space.total_weight)})")
    return space.point(_numbers(point))


def _triple(obj: dict) -> SteadyTriple:
    chart = obj.get("chart")
    zeta = [float(x) for x in obj["zeta"]]
    bounds = obj.get("bounds")
    if chart == "cylinder":
        s_range = tuple(bounds[0]) if bounds else (-1.0, 1.0)
        return cylinder_triple(zeta, float(obj.get("c", 1.0)), s_range)  # type: ignore[arg-type]
    if chart == "elliptic":
        s_max = float(bounds[0][1]) ** 2 if bounds else float(obj.get("s_max", 1.0))
        return elliptic_triple(zeta, s_max)
    if chart == "hyperbolic":
        radius = float(bounds[0][1]) if bounds else float(obj.get("radius", 1.0))
        return hyperbolic_triple(zeta, int(obj.get("eps", 1)), float(obj["c"]), radius)
    raise ChartError(f"unknown chart {chart!r}; choose cylinder, elliptic or hyperbolic")


def cmd_verify_triple(args: argparse.Namespace) -> tuple[int, dict]:
    if args.spec:
        obj = _read_json(args.spec)
    else:
        obj = {"chart": args.chart, "zeta": _floats(args.zeta), "c": args.c, "eps": args.eps}
    t = _triple(obj)
    rep = verify_triple(t, grid=args.grid, levels=args.levels)
    return (EXIT_OK if rep.ok else EXIT_NEGATIVE), {"triple": t.to_json(), **rep.to_json()}


def _floats(text: str) -> list[float]:
    try:
        return [float(Fraction(x.strip())) for x in text.split(",") if x.strip()]
    except (ValueError, ZeroDivisionError) as exc:
        raise ChartError(f"bad coefficient list {text!r}") from exc


def cmd_certificate(args: argparse.Namespace) -> tuple[int, dict]:
    g = _load_graph(args.graph)
    space = _space(g, args.arith)
    if isinstance(space, Infeasible):
        return EXIT_NEGATIVE, {"verdict": "no circulation function", **space.to_json()}
    if args.point is not None:
        t = _numbers(args.point)
    else:
        t = None
        if g.closed:
            verdict = feasibility(negative_system(g, space))
            if isinstance(verdict, Feasible):
                t = list(verdict.interior_point)
        else:
            for region in balanced_regions(g, space):
                if isinstance(region.verdict, Feasible):
                    t = list(region.verdict.interior_point)
                    break
        if t is None:
            return EXIT_NEGATIVE, {"status": "failure", "verdict": "no balanced circulation function"}
    c = space.point(t)
    res = graph_certificate(g, c, force=True)
    report = {"point": [dump_num(x) for x in t], "circulation": c.to_json(), **res.to_json()}
    return (EXIT_OK if report["status"] == "certificate" else EXIT_NEGATIVE), report


def cmd_reeb_extract(args: argparse.Namespace) -> tuple[int, dict]:
    from .mesh import MeshError, compatibility_check, extract_reeb, load_mesh

    try:
        mesh = load_mesh(args.mesh, genus=args.genus)
        result = extract_reeb(mesh)
    except (MeshError, OSError) as exc:
        raise InvalidGraphError([]) from exc
    report = compatibility_check(result.graph, mesh, args.rtol)
    if args.diagnostics:
        _write(args.diagnostics, result.diagnostics_json())
    out = {
        "compatibility": report.to_json(),
        "mesh": {"vertices": mesh.n_vertices, "triangles": len(mesh.triangles), "euler_characteristic": mesh.euler_characteristic,
                 "boundary_loops": len(mesh.boundary_loops), "area": mesh.area},
        "graph": result.graph.to_json(),
    }
    if args.out:
        _write(args.out, result.graph.to_json())
        del out["graph"]
        args.out = None  # the graph went to --out; the summary goes to stdout
    return (EXIT_OK if report.ok else EXIT_NEGATIVE), out


def cmd_generate(args: argparse.Namespace) -> tuple[int, dict]:
    rng = random.Random(args.seed)
    graphs = [family(rng, args.family).to_json() for _ in range(args.count)]
    return EXIT_OK, (graphs[0] if args.count == 1 else {"family": args.family, "seed": args.seed, "graphs": graphs})


def cmd_catalog(args: argparse.Namespace) -> tuple[int, dict]:
    return EXIT_OK, catalog.NAMED[args.name]().to_json()


# -- plumbing --------------------------------------------------------------------

def _dumps(obj: Any) -> str:
    if isinstance(obj, str):
        return obj
    return json.dumps(obj, indent=2, sort_keys=True, allow_nan=True) + "\n"


def _write(path: str, obj: Any) -> None:
    Path(path).write_text(_dumps(obj))


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--arith", choices=("exact", "float", "auto"), default="auto")
    common.add_argument("--tol", type=float, default=1e-9)
    common.add_argument("--order", type=int, default=10)
    common.add_argument("--out")
    common.add_argument("--seed", type=int, default=0)

    p = _Parser(prog="reeb-steady", description="Steady Euler flows through measured Reeb graphs.")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    s = sub.add_parser("validate", parents=[common], help="check the graph axioms")
    s.add_argument("graph")
    s.set_defaults(run=cmd_validate)

    s = sub.add_parser("circulation-space", parents=[common], help="affine space of circulation functions")
    s.add_argument("graph")
    s.set_defaults(run=cmd_circulation_space)

    s = sub.add_parser("check-steady", parents=[common], help="does the graph admit a steady flow")
    s.add_argument("graph")
    s.add_argument("--a", help="edge weights, comma separated, one per edge in id order")
    s.add_argument("--point", help="check one circulation function given by its coordinates")
    s.set_defaults(run=cmd_check_steady)

    s = sub.add_parser("polytope", parents=[common], help="polytope of admissible circulation functions")
    s.add_argument("graph")
    s.add_argument("--vertices", action="store_true", help="also enumerate vertices and rays")
    s.set_defaults(run=cmd_polytope)

    s = sub.add_parser("casimirs", parents=[common], help="per-edge moment table")
    s.add_argument("graph")
    s.add_argument("--format", choices=("json", "csv"), default="json")
    s.set_defaults(run=cmd_casimirs)

    s = sub.add_parser("orbit-equiv", parents=[common], help="compare two graphs up to isomorphism")
    s.add_argument("first")
    s.add_argument("second")
    s.add_argument("--point1", help="circulation coordinates on the first graph (needed when its space is not a point)")
    s.add_argument("--point2", help="circulation coordinates on the second graph")
    s.set_defaults(run=cmd_orbit_equiv)

    s = sub.add_parser("verify-triple", parents=[common], help="check a steady triple on a chart")
    s.add_argument("spec", nargs="?", help="JSON triple description")
    s.add_argument("--chart", choices=("cylinder", "elliptic", "hyperbolic"), default="cylinder")
    s.add_argument("--zeta", default="1", help="vorticity polynomial coefficients, lowest degree first")
    s.add_argument("--c", type=float, default=1.0)
    s.add_argument("--eps", type=int, default=1)
    s.add_argument("--grid", type=int, default=200)
    s.add_argument("--levels", type=int, default=100)
    s.set_defaults(run=cmd_verify_triple)

    s = sub.add_parser("certificate", parents=[common], help="exactness certificate for a balanced circulation")
    s.add_argument("graph")
    s.add_argument("--point", help="coordinates of the circulation function (default: an interior point)")
    s.set_defaults(run=cmd_certificate)

    s = sub.add_parser("reeb-extract", parents=[common], help="measured Reeb graph of a mesh field")
    s.add_argument("mesh")
    s.add_argument("--diagnostics", help="write per-saddle log-fit tables here")
    s.add_argument("--genus", type=int, help="declared genus of the surface")
    s.add_argument("--rtol", type=float, default=1e-6, help="relative tolerance of the volume check")
    s.set_defaults(run=cmd_reeb_extract)

    s = sub.add_parser("generate", parents=[common], help="random graphs from a family")
    s.add_argument("--family", choices=FAMILIES, default="closed")
    s.add_argument("--count", type=int, default=1)
    s.set_defaults(run=cmd_generate)

    s = sub.add_parser("catalog", parents=[common], help="emit a named example graph")
    s.add_argument("name", choices=sorted(catalog.NAMED))
    s.set_defaults(run=cmd_catalog)
    return p


_VALUE_FLAGS = ("--a", "--point", "--point1", "--point2", "--zeta")


def _glue_negative_values(argv: list[str]) -> list[str]:
    """``--a -3,-1`` would read as a flag; rewrite it to ``--a=-3,-1``."""
    out: list[str] = []
    i = 0
    while i < len(argv):
        tok = argv[i]
        if tok in _VALUE_FLAGS and i + 1 < len(argv) and argv[i + 1].startswith("-") and not argv[i + 1].startswith("--"):
            out.append(f"{tok}={argv[i + 1]}")
            i += 2
            continue
        out.append(tok)
        i += 1
    return out


def run(argv: Sequence[str] | None = None, stdout: Any = None, stderr: Any = None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    argv = _glue_negative_values(list(sys.argv[1:] if argv is None else argv))
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(exc, file=stderr)
        return EXIT_USAGE
    try:
        code, report = args.run(args)
    except InvalidGraphError as exc:
        cause = exc.__cause__
        print(f"invalid input: {cause if cause is not None else exc}", file=stderr)
        return EXIT_INVALID
    except (ArithmeticModeError, MeasureError, ChartError, ValueError, OSError, KeyError) as exc:
        print(f"invalid input: {exc}", file=stderr)
        return EXIT_INVALID
    except (ToleranceError, QuadratureError, InternalConsistencyError) as exc:
        print(f"tolerance failure: {exc}", file=stderr)
        return EXIT_TOLERANCE
    if args.out:
        _write(args.out, report)
    else:
        stdout.write(_dumps(report))
    return code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
