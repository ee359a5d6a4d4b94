"""Command-line entry point.

Subcommands: solve-discrete, solve-polygonal, solve-scag, simulate,
converge. All randomness sits behind --seed, and identical invocations
produce byte-identical JSON/CSV/SVG outputs (except the wall-clock
runtime_ms diagnostic column in convergence CSVs).

Exit codes: 0 success; 2 unparseable input (with a machine-readable
error JSON naming the offending field); 3 infeasible game; 4 internal
invariant breach (a solver returned an uncertifiable result).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys

from . import discrete_game, polygeom, samplers, scag, sim, svg
from .errors import (
    AmbushGameError,
    CertificationError,
    EmptyTerminalSet,
    InfeasibleGame,
    InvalidFlow,
    InvalidReach,
    NoCutExists,
    NoPath,
    NoSites,
    SchemaError,
)

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_INFEASIBLE = 3
EXIT_INVARIANT = 4

_INFEASIBLE = (InfeasibleGame, EmptyTerminalSet, NoPath, NoSites, NoCutExists)
_INVARIANT = (CertificationError, InvalidFlow)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ambushgames",
        description="Solve traveler-vs-ambusher games on networks, polygons, and sampled roadmaps",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, output=True):
        p.add_argument("--input", required=True, help="input JSON file")
        if output:
            p.add_argument("--output", help="output file (default: stdout)")
        p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("solve-discrete", help="solve a network game")
    common(p)
    p.add_argument("--svg", action="store_true", help="also write an SVG next to --output")

    p = sub.add_parser("solve-polygonal", help="solve the analytic polygonal game")
    common(p)
    p.add_argument("--radius", type=float, help="ambush reach radius (overrides input R)")
    p.add_argument("--svg", action="store_true")

    p = sub.add_parser("solve-scag", help="solve a sampled continuous game")
    common(p)
    p.add_argument("--radius", type=float)
    p.add_argument("--builder", choices=["grid", "rrg", "prmstar"], default="grid")
    p.add_argument("--schedule", type=_int_list, default=[400],
                   help="vertex counts; the last entry sizes the graph")
    p.add_argument("--density-factor", type=float, default=2.0)
    p.add_argument("--svg", action="store_true")

    p = sub.add_parser("simulate", help="Monte Carlo check of a solved game")
    common(p)
    p.add_argument("--trials", type=int, default=100_000)
    p.add_argument("--radius", type=float)
    p.add_argument("--builder", choices=["grid", "rrg", "prmstar"], default="grid")
    p.add_argument("--schedule", type=_int_list, default=[400])
    p.add_argument("--density-factor", type=float, default=2.0)

    p = sub.add_parser("converge", help="value vs. graph density experiment")
    common(p)
    p.add_argument("--radius", type=float)
    p.add_argument("--builder", choices=["grid", "rrg", "prmstar"], default="grid")
    p.add_argument("--schedule", type=_int_list, required=True)
    p.add_argument("--density-factor", type=float, default=2.0)
    return parser


def _int_list(text: str) -> list[int]:
    try:
        return [int(v) for v in text.split(",") if v]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _load_json(path: str) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except FileNotFoundError:
        raise SchemaError("input", f"no such file: {path}")
    except json.JSONDecodeError as exc:
        raise SchemaError("$", f"invalid JSON: {exc}")


def _emit(text: str, path: str | None) -> None:
    if path:
        with open(path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _dump(obj: dict) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def _svg_path(output: str | None) -> str:
    if not output:
        raise SchemaError("output", "--svg requires --output")
    stem = output.rsplit(".", 1)[0] if "." in output else output
    return stem + ".svg"


def _radius(obj: dict, flag: float | None) -> float:
    if flag is not None:
        return flag
    if "R" in obj:
        return float(obj["R"])
    raise SchemaError("R", "missing reach radius: set R in the input or pass --radius")


def _cmd_solve_discrete(args) -> int:
    obj = _load_json(args.input)
    net, rewards = discrete_game.game_from_json(obj)
    solution = discrete_game.solve_game(net, rewards)
    _emit(_dump(discrete_game.solution_to_json(solution)), args.output)
    if args.svg:
        with open(_svg_path(args.output), "w") as fh:
            fh.write(svg.render_network(net, p=solution.p, q=solution.q))
    return EXIT_OK


def _cmd_solve_polygonal(args) -> int:
    obj = _load_json(args.input)
    domain, file_radius = polygeom.domain_from_json(obj)
    reach = args.radius if args.radius is not None else file_radius
    if reach is None:
        raise SchemaError("R", "missing reach radius: set R in the input or pass --radius")
    cut = polygeom.ambush_min_cut(domain, reach)
    placements = polygeom.red_placement(cut)
    segment_objs = []
    for (a, b), count in zip(cut.segments, cut.per_segment_count):
        segment_objs.append(
            {
                "a": [float(a[0]), float(a[1])],
                "b": [float(b[0]), float(b[1])],
                "count": count,
            }
        )
    placement_objs = []
    i = 0
    for seg_index, count in enumerate(cut.per_segment_count):
        for _ in range(count):
            point, prob = placements[i]
            placement_objs.append(
                {
                    "point": [float(point[0]), float(point[1])],
                    "probability": prob,
                    "segment": seg_index,
                }
            )
            i += 1
    out = {
        "R": reach,
        "capacity": cut.capacity,
        "value": 1.0 / cut.capacity,
        "segments": segment_objs,
        "placements": placement_objs,
    }
    _emit(_dump(out), args.output)
    if args.svg:
        with open(_svg_path(args.output), "w") as fh:
            fh.write(svg.render_domain(domain, cut=cut, placements=placements))
    return EXIT_OK


def _load_scag(obj: dict, args) -> tuple[polygeom.PolygonalDomain, scag.ScagInstance]:
    domain, file_radius = polygeom.domain_from_json(obj)
    reach = args.radius if args.radius is not None else file_radius
    if reach is None:
        raise SchemaError("R", "missing reach radius: set R in the input or pass --radius")
    if "points" in obj:
        graph = samplers.graph_from_json(obj)
    else:
        graph = samplers.build(
            domain, args.builder, args.schedule[-1], seed=args.seed
        )
    if "sites" in obj:
        sites = scag.sites_from_json({**obj, "R": reach})
    else:
        sites = scag.cover_sites(
            domain, reach, density_factor=args.density_factor, seed=args.seed
        )
    sites.validate(domain)
    return domain, scag.ScagInstance.build(graph, sites)


def _cmd_solve_scag(args) -> int:
    obj = _load_json(args.input)
    domain, instance = _load_scag(obj, args)
    solution = scag.solve_scag(instance)
    out = {
        "value": solution.value,
        "p": {f"{u}-{v}": f for (u, v), f in sorted(solution.p.items()) if f > 1e-12},
        "q": {str(k): prob for k, prob in sorted(solution.q.items()) if prob > 1e-12},
    }
    _emit(_dump(out), args.output)
    if args.svg:
        with open(_svg_path(args.output), "w") as fh:
            fh.write(
                svg.render_scag(
                    domain,
                    instance.graph,
                    p=solution.p,
                    q=solution.q,
                    sites=instance.sites.sites,
                    reach=instance.sites.reach,
                )
            )
    return EXIT_OK


def _cmd_simulate(args) -> int:
    obj = _load_json(args.input)
    if "outer" in obj:
        _, instance = _load_scag(obj, args)
        solution = scag.solve_scag(instance)
        mean, se = sim.simulate_scag(instance, solution, args.trials, args.seed)
    else:
        net, rewards = discrete_game.game_from_json(obj)
        solution = discrete_game.solve_game(net, rewards)
        mean, se = sim.simulate_discrete(net, solution, rewards, args.trials, args.seed)
    _emit(_dump(sim.report(args.trials, mean, se, solution.value)), args.output)
    return EXIT_OK


def _cmd_converge(args) -> int:
    obj = _load_json(args.input)
    domain, file_radius = polygeom.domain_from_json(obj)
    reach = args.radius if args.radius is not None else file_radius
    if reach is None:
        raise SchemaError("R", "missing reach radius: set R in the input or pass --radius")
    points = scag.convergence_run(
        domain,
        reach,
        args.builder,
        schedule=args.schedule,
        seeds=(args.seed,),
        density_factor=args.density_factor,
        site_seed=args.seed,
    )
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["n", "seed", "value", "cag_value", "runtime_ms"])
    for pt in points:
        writer.writerow(
            [
                pt.n,
                pt.seed,
                "" if pt.value is None else repr(pt.value),
                repr(pt.cag_value),
                f"{pt.runtime_ms:.1f}",
            ]
        )
    _emit(buf.getvalue(), args.output)
    return EXIT_OK


_COMMANDS = {
    "solve-discrete": _cmd_solve_discrete,
    "solve-polygonal": _cmd_solve_polygonal,
    "solve-scag": _cmd_solve_scag,
    "simulate": _cmd_simulate,
    "converge": _cmd_converge,
}


def run(args) -> int:
    try:
        return _COMMANDS[args.command](args)
    except SchemaError as exc:
        sys.stdout.write(
            _dump({"error": "parse", "field": exc.field, "message": str(exc)})
        )
        return EXIT_PARSE
    except ValueError as exc:
        sys.stdout.write(_dump({"error": "parse", "field": "$", "message": str(exc)}))
        return EXIT_PARSE
    except InvalidReach as exc:
        sys.stdout.write(_dump({"error": "parse", "field": "R", "message": str(exc)}))
        return EXIT_PARSE
    except _INFEASIBLE as exc:
        sys.stdout.write(
            _dump({"error": "infeasible", "message": str(exc)})
        )
        return EXIT_INFEASIBLE
    except _INVARIANT as exc:
        sys.stdout.write(
            _dump({"error": "invariant", "message": str(exc)})
        )
        return EXIT_INVARIANT
    except AmbushGameError as exc:
        sys.stdout.write(_dump({"error": "internal", "message": str(exc)}))
        return EXIT_INVARIANT


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return run(args)


if __name__ == "__main__":
    sys.exit(main())
