"""Command-line front end.

Exit codes: 0 success / proven optimal, 2 usage error, 3 feasible but not
proven (or no incumbent found within limits), 4 infeasible, 1 failed
validation or unexpected error.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .instance import Instance, generate_instance
from .model import CA, CUA, build_mp_ca, build_mp_cua, export_lp
from .radio import RadioParams
from .simulation import (ExperimentConfig, evaluate_schedule, export_results,
                         run_monte_carlo)
from .solver import (FEASIBLE, INFEASIBLE, NO_SOLUTION, OPTIMAL, Solution,
                     SolveLimits, solve, validate)

STATUS_EXIT = {OPTIMAL: 0, FEASIBLE: 3, NO_SOLUTION: 3, INFEASIBLE: 4}


def _build_model(instance: Instance, variant: str):
    return build_mp_ca(instance) if variant == CA else build_mp_cua(instance)


def _limits_from_args(args) -> SolveLimits:
    return SolveLimits(time_limit=args.time_limit, node_limit=args.node_limit,
                       gap_tolerance=args.gap)


def _add_limit_flags(p):
    p.add_argument("--time-limit", type=float, default=60.0,
                   help="wall-clock limit per solve in seconds")
    p.add_argument("--node-limit", type=int, default=50_000_000,
                   help="search-node limit (deterministic cutoff)")
    p.add_argument("--gap", type=float, default=1e-9,
                   help="relative optimality gap tolerance")


def cmd_generate(args) -> int:
    instance = generate_instance(
        args.scenario, args.nodes, args.robots, args.seed,
        side_length=args.side_length, beams_per_cell=args.beams,
        velocity=args.velocity, horizon=args.horizon,
        service_time=args.service_time, min_separation=args.min_separation,
        window_mode=args.window_mode, window_width=args.window_width)
    Path(args.out).write_text(instance.to_json(), newline="\n")
    print(f"wrote {args.out}: scenario {args.scenario.upper()}, "
          f"{args.nodes} nodes, {args.robots} robots, "
          f"{len(instance.collisions.pairs)} collision pairs")
    return 0


def cmd_solve(args) -> int:
    instance = Instance.from_json(Path(args.instance).read_text())
    model = _build_model(instance, args.variant)
    sol = solve(model, _limits_from_args(args))
    if args.out:
        Path(args.out).write_text(
            json.dumps(sol.to_dict(), indent=2, sort_keys=True) + "\n",
            newline="\n")
    print(f"status={sol.status} objective="
          f"{sol.objective if sol.routes else 'n/a'} "
          f"nodes={sol.stats.get('nodes_explored')}")
    if sol.status == INFEASIBLE and sol.stats.get("diagnostics"):
        for d in sol.stats["diagnostics"]:
            print(f"  hint: {d}")
    return STATUS_EXIT[sol.status]


def cmd_validate(args) -> int:
    instance = Instance.from_json(Path(args.instance).read_text())
    sol = Solution.from_dict(json.loads(Path(args.solution).read_text()))
    report = validate(sol, instance, args.variant)
    if report.ok:
        print("valid: all clauses pass")
        return 0
    for v in report.violations:
        print(f"violated [{v.clause}] {v.message}")
    return 1


def cmd_evaluate(args) -> int:
    instance = Instance.from_json(Path(args.instance).read_text())
    sol = Solution.from_dict(json.loads(Path(args.solution).read_text()))
    radio = (RadioParams.from_file(args.radio) if args.radio
             else RadioParams())
    ev = evaluate_schedule(sol, instance, radio,
                           np.random.default_rng(args.seed))
    payload = {
        "overall_rate_mbps": ev.overall_rate_bps / 1e6,
        "total_travel_time_s": ev.total_travel_time,
        "collision_events": [{"pair": list(c.pair),
                              "overlap": list(c.overlap)}
                             for c in ev.collision_events],
        "per_node": [{"node": p.node, "robot": p.robot,
                      "serving_cell": p.serving_cell,
                      "interval": list(p.interval), "sinr": p.sinr,
                      "rate_mbps": p.rate_bps / 1e6}
                     for p in ev.per_node],
    }
    text = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    if args.out:
        Path(args.out).write_text(text, newline="\n")
    else:
        print(text, end="")
    print(f"overall rate {ev.overall_rate_bps / 1e6:.1f} Mbps, "
          f"{len(ev.collision_events)} collision events", file=sys.stderr)
    return 0


def cmd_export_lp(args) -> int:
    instance = Instance.from_json(Path(args.instance).read_text())
    model = _build_model(instance, args.variant)
    Path(args.out).write_text(export_lp(model), newline="\n")
    print(f"wrote {args.out}: {len(model.variables)} variables, "
          f"{len(model.rows)} rows")
    return 0


def cmd_experiment(args) -> int:
    cfg_dict = {}
    if args.config:
        cfg_dict = json.loads(Path(args.config).read_text())
    if args.runs is not None:
        cfg_dict["runs"] = args.runs
    if args.seed is not None:
        cfg_dict["base_seed"] = args.seed
    if args.scenarios:
        cfg_dict["scenarios"] = [s.upper() for s in args.scenarios]
    if args.node_counts:
        cfg_dict["node_counts"] = args.node_counts
    config = ExperimentConfig.from_dict(cfg_dict)

    done = [0]
    total = len(config.scenarios) * len(config.node_counts) * config.runs

    def progress(rec):
        done[0] += 1
        if args.verbose:
            print(f"[{done[0]}/{total}] {rec.scenario} n={rec.n_nodes} "
                  f"run={rec.run} cua={rec.status_cua} ca={rec.status_ca}",
                  file=sys.stderr)

    results = run_monte_carlo(config, progress=progress)
    files = export_results(results, args.out)
    from .simulation import aggregate
    agg = aggregate(results)
    print("scenario  n_visit  mean_improvement_%  max_%  included  excluded")
    for row in agg["improvement"]:
        mean_s = "-" if row["mean_pct"] is None else f"{row['mean_pct']:8.2f}"
        max_s = "-" if row["max_pct"] is None else f"{row['max_pct']:5.2f}"
        print(f"{row['scenario']:>8}  {row['n_visit']:>7}  {mean_s:>18}  "
              f"{max_s:>5}  {row['n_included']:>8}  {row['n_excluded']:>8}")
    for f in files:
        print(f"wrote {f}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="beamplan",
        description="Interference-aware multi-robot path planning in "
                    "mmWave multi-cell networks")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="sample a problem instance")
    p.add_argument("--scenario", required=True, choices=["A", "B", "a", "b"])
    p.add_argument("--nodes", type=int, required=True)
    p.add_argument("--robots", type=int, default=3)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--side-length", type=float, default=50.0)
    p.add_argument("--beams", type=int, default=12)
    p.add_argument("--velocity", type=float, default=5.0)
    p.add_argument("--horizon", type=float, default=200.0)
    p.add_argument("--service-time", type=float, default=2.0)
    p.add_argument("--min-separation", type=float, default=1.0)
    p.add_argument("--window-mode", choices=["full", "random"],
                   default="full")
    p.add_argument("--window-width", type=float, default=100.0)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("solve", help="solve an instance to optimality")
    p.add_argument("--instance", required=True)
    p.add_argument("--variant", choices=[CUA, CA], default=CUA)
    p.add_argument("--out")
    _add_limit_flags(p)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("validate", help="check a solution against the "
                                        "instance semantics")
    p.add_argument("--instance", required=True)
    p.add_argument("--solution", required=True)
    p.add_argument("--variant", choices=[CUA, CA], default=CUA)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("evaluate", help="evaluate a schedule under the "
                                        "downlink model")
    p.add_argument("--instance", required=True)
    p.add_argument("--solution", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--radio", help="radio config JSON file")
    p.add_argument("--out")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("export-lp", help="write the MILP in LP text format")
    p.add_argument("--instance", required=True)
    p.add_argument("--variant", choices=[CUA, CA], default=CUA)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_export_lp)

    p = sub.add_parser("experiment", help="run the Monte Carlo experiments")
    p.add_argument("--config", help="experiment config JSON")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--runs", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--scenarios", nargs="+")
    p.add_argument("--node-counts", type=int, nargs="+")
    p.add_argument("--verbose", action="store_true")
    p.set_defaults(func=cmd_experiment)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if hasattr(args, "scenario"):
        args.scenario = args.scenario.upper()
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
