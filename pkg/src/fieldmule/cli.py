"""Command-line runner: simulate scenarios, inspect pickup zones, evaluate
candidate routes, estimate costs, and fit sensor calibrations."""

from __future__ import annotations

import argparse
import csv
import pathlib
import sys

import yaml

from .gateway import Route
from .sensing import SingularFit, fit_cubic, kfold_cv
from .sim import (
    Scenario,
    ScenarioError,
    compute_pickup_zones,
    demo_scenario,
    estimate_deployment_cost,
    run,
    whatif_route,
    write_outputs,
)


def _load_scenario(path: str, seed: int | None = None, days: float | None = None) -> Scenario:
    scenario = Scenario.from_yaml(pathlib.Path(path).read_text())
    if seed is not None:
        scenario.rng_seed = seed
    if days is not None:
        scenario.duration_days = days
    scenario.validate()
    return scenario


def cmd_run(args) -> int:
    scenario = _load_scenario(args.scenario, args.seed, args.days)
    result = run(scenario)
    write_outputs(result, args.out)
    print(result.metrics.to_text(), end="")
    print(f"trace_hash: {result.trace_hash()}")
    print(f"outputs written to {args.out}")
    return 0


def cmd_zones(args) -> int:
    scenario = _load_scenario(args.scenario)
    zones = compute_pickup_zones(scenario)
    if not zones:
        print("no pickup zones (no road within range of any node)")
        return 0
    for z in zones:
        segs = ", ".join(
            f"({a[0]:.1f},{a[1]:.1f})-({b[0]:.1f},{b[1]:.1f})" for a, b in z.segments
        )
        print(f"{z.node_id}: dwell {z.dwell_minutes:g} min, segments: {segs}")
    return 0


def cmd_whatif(args) -> int:
    scenario = _load_scenario(args.scenario)
    route_d = yaml.safe_load(pathlib.Path(args.route).read_text())
    route = Route.from_points(
        [tuple(w) for w in route_d["waypoints"]], loop=bool(route_d.get("loop", False))
    )
    for p in whatif_route(scenario, route):
        when = (
            f"earliest contact at {p.earliest_contact_time_s:.0f} s"
            if p.will_contact
            else "no contact"
        )
        print(f"{p.node_id}: {when}, dwell {p.required_dwell_minutes:g} min")
    return 0


def cmd_cost(args) -> int:
    total = estimate_deployment_cost(args.nodes, args.gateways)
    print(f"${total:.2f}")
    return 0


def cmd_calibrate(args) -> int:
    with open(args.pairs, newline="") as f:
        reader = csv.DictReader(f)
        pairs = [(float(row["voltage_v"]), float(row["raw"])) for row in reader]
    model, r2 = fit_cubic([p[0] for p in pairs], [p[1] for p in pairs])
    print(model.to_text(), end="")
    print(f"r_squared = {r2:.6f}")
    if len(pairs) >= 10:
        mean, std = kfold_cv(pairs, k=10)
        print(f"cv_deviation_percent = {mean:.4f} +/- {std:.4f}")
    return 0


def cmd_demo(args) -> int:
    scenario = demo_scenario(days=args.days, seed=args.seed)
    out = pathlib.Path(args.out)
    if out.suffix not in (".yaml", ".yml"):
        out.mkdir(parents=True, exist_ok=True)
        out = out / "scenario.yaml"
    out.write_text(scenario.to_yaml())
    print(f"demo scenario written to {out}")
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    app = create_app()
    if args.scenario:
        from .service import Session

        app.state.session = Session(_load_scenario(args.scenario))
    uvicorn.run(app, host=args.host, port=args.port)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fieldmule", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run a scenario to completion")
    p.add_argument("scenario")
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int)
    p.add_argument("--days", type=float)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("zones", help="print pickup zones for a scenario")
    p.add_argument("scenario")
    p.set_defaults(func=cmd_zones)

    p = sub.add_parser("whatif", help="evaluate a candidate route")
    p.add_argument("scenario")
    p.add_argument("route")
    p.set_defaults(func=cmd_whatif)

    p = sub.add_parser("cost", help="estimate deployment cost")
    p.add_argument("--nodes", type=int, required=True)
    p.add_argument("--gateways", type=int, required=True)
    p.set_defaults(func=cmd_cost)

    p = sub.add_parser("calibrate", help="fit the cubic calibration from a pairs CSV "
                                         "(columns voltage_v, raw)")
    p.add_argument("pairs")
    p.set_defaults(func=cmd_calibrate)

    p = sub.add_parser("demo", help="write the built-in demo scenario")
    p.add_argument("--out", default="demo_scenario.yaml")
    p.add_argument("--days", type=float, default=7.0)
    p.add_argument("--seed", type=int, default=42)
    p.set_defaults(func=cmd_demo)

    p = sub.add_parser("serve", help="start the dashboard service")
    p.add_argument("--scenario", help="load this scenario on startup")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ScenarioError, SingularFit, FileNotFoundError, KeyError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
