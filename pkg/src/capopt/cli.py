"""Command-line client for batch runs: solve, sweep, pdn, demand, validate.

The CLI is a thin layer over the core modules: it reads files, delegates, and
writes canonical JSON/CSV. Exit codes: 0 success, 2 infeasible, 3 bad input,
4 resource limit.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Optional, Sequence

from . import schemas, synth
from .capmodel import build_model
from .demand import demand_curve, intersect_supply
from .errors import CapoptError, InfeasibleError, LimitError, ValidationError
from .frontier import pareto_filter, sweep_k
from .milp import check_solution, solve_milp
from .partlib import dump_library, load_library
from .pdnplace import PlacementConfig, solve_placement
from .schemas import dump_text, parse_price

EXIT_OK = 0
EXIT_INFEASIBLE = 2
EXIT_INVALID = 3
EXIT_LIMIT = 4


def _read_json(path: str):
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise ValidationError(f"file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path}: invalid JSON: {exc}") from None


def _load_library_args(args) -> list:
    path = Path(args.library)
    if not path.exists():
        raise ValidationError(f"library file not found: {path}")
    fmt = "json" if path.suffix.lower() == ".json" else "csv"
    derating = impedance = None
    if fmt == "csv":
        if getattr(args, "derating", None):
            derating = Path(args.derating).read_bytes()
        if getattr(args, "impedance", None):
            impedance = Path(args.impedance).read_bytes()
    elif getattr(args, "derating", None) or getattr(args, "impedance", None):
        raise ValidationError("--derating/--impedance apply to CSV libraries only")
    return load_library(path.read_bytes(), fmt, derating=derating, impedance=impedance)


def _write(path: Optional[str], text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")


def _cmd_solve(args) -> int:
    parts = _load_library_args(args)
    spec = schemas.parse_spec(_read_json(args.spec), k_override=args.k)
    model = build_model(spec, parts)
    solution = solve_milp(model)
    if solution.status != "optimal":
        _write(args.out, dump_text({"status": "infeasible",
                                    "spec": schemas.spec_to_dict(spec)}))
        print("infeasible: no counts satisfy the spec", file=sys.stderr)
        return EXIT_INFEASIBLE
    report = check_solution(model, solution.counts)
    _write(args.out, dump_text(schemas.solution_payload(model, solution, report, spec)))
    print(f"optimal: objective {solution.objective:.12g}, "
          f"{sum(solution.counts)} parts")
    return EXIT_OK


def _cmd_sweep(args) -> int:
    parts = _load_library_args(args)
    spec = schemas.parse_spec(_read_json(args.spec))
    points = sweep_k(spec, parts, args.k_min, args.k_max, args.steps, args.spacing)
    model = build_model(spec, parts)
    if args.out and args.out.endswith(".csv"):
        _write(args.out, schemas.frontier_csv(points, model.variable_ids))
    else:
        pareto = pareto_filter(points)
        _write(args.out, dump_text(
            schemas.frontier_payload(points, model.variable_ids, pareto)))
    print(f"swept {args.steps} K values -> {len(points)} distinct solutions")
    return EXIT_OK


def _cmd_pdn(args) -> int:
    doc = _read_json(args.problem)
    if args.library:
        parts = _load_library_args(args)
    elif "library" in doc:
        lib_path = Path(args.problem).parent / doc["library"]
        fmt = "json" if lib_path.suffix.lower() == ".json" else "csv"
        parts = load_library(lib_path.read_bytes(), fmt)
    elif "parts" in doc:
        from .partlib import parse_part
        parts = [parse_part(p, f"parts[{i}]") for i, p in enumerate(doc["parts"])]
    else:
        raise ValidationError("placement problem needs --library, a 'library' "
                              "path, or inline 'parts'")
    problem = schemas.parse_placement(doc, parts)
    config = PlacementConfig(count_cap=args.count_cap)
    solution = solve_placement(problem, config)
    _write(args.out, dump_text(schemas.placement_payload(problem, solution)))
    if solution.status != "optimal":
        print("infeasible: no placement satisfies every location", file=sys.stderr)
        return EXIT_INFEASIBLE
    print(f"optimal: objective {solution.objective:.12g}")
    return EXIT_OK


def _cmd_demand(args) -> int:
    parts = _load_library_args(args)
    apps = schemas.parse_apps(_read_json(args.apps), parts)
    prices = [parse_price(tok) for tok in args.prices.split(",") if tok.strip()]
    curve = demand_curve(apps, args.part, prices)
    supply = schemas.parse_supply(_read_json(args.supply)) if args.supply else None
    crossing = intersect_supply(curve, supply) if supply else None
    if args.out and args.out.endswith(".csv"):
        _write(args.out, schemas.demand_csv(curve))
    else:
        _write(args.out, dump_text(
            schemas.demand_payload(curve, crossing, supply is not None)))
    if args.csv_out:
        _write(args.csv_out, schemas.demand_csv(curve))
    tail = f", intersection at q={crossing.quantity}" if crossing else ""
    print(f"demand curve over {len(prices)} prices{tail}")
    return EXIT_OK


def _cmd_validate(args) -> int:
    parts = _load_library_args(args)
    print(f"library ok: {len(parts)} parts, all invariants hold")
    return EXIT_OK


def _cmd_genlib(args) -> int:
    parts = synth.generate_library(args.parts, args.seed)
    payload = {
        "metadata": {"generator": "capopt-synth", "seed": args.seed,
                     "parts": args.parts},
        "parts": dump_library(parts),
    }
    _write(args.out, dump_text(payload))
    print(f"generated {len(parts)} parts (seed {args.seed})")
    return EXIT_OK


def _cmd_serve(args) -> int:
    import uvicorn

    from .service.app import create_app

    parts = _load_library_args(args)
    app = create_app(parts)
    uvicorn.run(app, host=args.host, port=args.port, log_level="info")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="capopt",
        description="Capacitor part-selection optimization toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_library(p):
        p.add_argument("--library", required=True,
                       help="part library (.json or parts .csv)")
        p.add_argument("--derating", help="derating table CSV (with CSV library)")
        p.add_argument("--impedance", help="tabulated impedance CSV (with CSV library)")

    p = sub.add_parser("solve", help="solve one spec")
    add_library(p)
    p.add_argument("--spec", required=True, help="ProblemSpec JSON file")
    p.add_argument("--k", type=float, default=None,
                   help="override the spec's K (mm^2 per cent)")
    p.add_argument("--out", help="output JSON path (default stdout)")
    p.set_defaults(func=_cmd_solve)

    p = sub.add_parser("sweep", help="trace the cost/area frontier over K")
    add_library(p)
    p.add_argument("--spec", required=True)
    p.add_argument("--k-min", type=float, required=True)
    p.add_argument("--k-max", type=float, required=True)
    p.add_argument("--steps", type=int, required=True)
    p.add_argument("--spacing", choices=("log", "linear"), default="log")
    p.add_argument("--out", help="output path (.json or .csv)")
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("pdn", help="solve a placement-aware PDN problem")
    p.add_argument("--problem", required=True, help="PlacementProblem JSON file")
    p.add_argument("--count-cap", type=int, default=None,
                   help="per-variable count bound for the exact search")
    p.add_argument("--library", help="part library overriding the problem's")
    p.add_argument("--derating")
    p.add_argument("--impedance")
    p.add_argument("--out", help="output JSON path (default stdout)")
    p.set_defaults(func=_cmd_pdn)

    p = sub.add_parser("demand", help="price-sweep demand curve for one part")
    add_library(p)
    p.add_argument("--apps", required=True, help="applications JSON file")
    p.add_argument("--part", required=True, help="part id to sweep")
    p.add_argument("--prices", required=True,
                   help="comma-separated price grid in cents")
    p.add_argument("--supply", help="supply curve JSON file")
    p.add_argument("--out", help="output path (.json or .csv)")
    p.add_argument("--csv-out", help="also write the curve as CSV here")
    p.set_defaults(func=_cmd_demand)

    p = sub.add_parser("validate", help="check every library invariant")
    add_library(p)
    p.set_defaults(func=_cmd_validate)

    p = sub.add_parser("genlib", help="generate a synthetic library")
    p.add_argument("--parts", type=int, required=True)
    p.add_argument("--seed", type=int, default=0,
                   help="RNG seed, recorded in output metadata")
    p.add_argument("--out", help="output JSON path (default stdout)")
    p.set_defaults(func=_cmd_genlib)

    p = sub.add_parser("serve", help="run the local HTTP service")
    add_library(p)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8008)
    p.set_defaults(func=_cmd_serve)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except InfeasibleError as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except LimitError as exc:
        print(f"limit exceeded: {exc}", file=sys.stderr)
        return EXIT_LIMIT
    except (ValidationError, CapoptError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
