"""Schedule evaluation under the downlink model and the Monte Carlo harness.

A schedule is evaluated at its visit nodes only: each node's service interval
[t_i, t_i + w_i] either overlaps a collision partner's interval (the paired
adjacent base station then interferes at main-lobe gain) or it does not (all
non-serving stations contribute side-lobe interference only, if enabled).

The CUA and CA evaluations of one run share the same sampled link states
(common random numbers), which isolates the scheduling effect.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from . import __version__ as _pkg_version
from .instance import Instance, generate_instance
from .model import CA, CUA, FEAS_TOL, build_mp_ca, build_mp_cua
from .radio import LinkSample, RadioParams, rate, sample_link, sinr
from .solver import OPTIMAL, Solution, SolveLimits, solve, validate

MBPS = 1e6


@dataclass(frozen=True)
class PerNodeRate:
    node: int
    robot: int
    serving_cell: int
    interval: tuple[float, float]
    sinr: float
    rate_bps: float


@dataclass(frozen=True)
class CollisionEvent:
    pair: tuple[int, int]
    overlap: tuple[float, float]


@dataclass
class ScheduleEvaluation:
    per_node: list[PerNodeRate]
    collision_events: list[CollisionEvent]
    overall_rate_bps: float
    total_travel_time: float


def evaluate_schedule(solution: Solution, instance: Instance,
                      radio: RadioParams,
                      rng: np.random.Generator) -> ScheduleEvaluation:
    """Per-node SINR/rate for a solved schedule plus detected collisions.

    Links are sampled in a fixed (node, cell) order so that two calls with
    identically seeded generators see the same channel realizations.
    """
    report = validate(solution, instance, CUA,
                      allow_idle_robots=True)
    if not report.ok:
        raise ValueError(
            f"refusing to evaluate an invalid schedule: "
            f"{[v.clause for v in report.violations]}")
    layout = instance.layout
    serving = instance.serving_beams()
    w = instance.service_array()
    t = solution.arrival_times
    cell_ids = sorted(layout.cell_ids())

    links: dict[tuple[int, int], LinkSample] = {}
    for n in instance.nodes.nodes:
        for cid in cell_ids:
            cx, cy = layout.center(cid)
            d = math.hypot(n.x - cx, n.y - cy)
            links[(n.id, cid)] = sample_link(d, radio, rng)

    events: list[CollisionEvent] = []
    active_cells: dict[int, set[int]] = {n.id: set()
                                         for n in instance.nodes.nodes}
    for i, j in sorted(instance.collisions.pairs):
        lo = max(t[i], t[j])
        hi = min(t[i] + w[i], t[j] + w[j])
        if hi - lo > FEAS_TOL:
            events.append(CollisionEvent(pair=(i, j), overlap=(lo, hi)))
            active_cells[i].add(serving[j].cell)
            active_cells[j].add(serving[i].cell)

    robot_of = {u: k for k, route in enumerate(solution.routes, start=1)
                for u in route[1:-1]}
    g_s = radio.side_lobe_gain
    g_m = radio.main_lobe_gain_value
    per_node: list[PerNodeRate] = []
    for n in instance.nodes.nodes:
        own = serving[n.id].cell
        serving_link = links[(n.id, own)]
        interferers = []
        for cid in cell_ids:
            if cid == own:
                continue
            if cid in active_cells[n.id]:
                gain = g_m
            elif radio.sidelobe_interference:
                gain = g_s
            else:
                continue
            link = links[(n.id, cid)]
            interferers.append((link.distance, link, gain))
        s = sinr(serving_link.distance, serving_link, interferers, radio)
        per_node.append(PerNodeRate(
            node=n.id, robot=robot_of[n.id], serving_cell=own,
            interval=(t[n.id], t[n.id] + w[n.id]),
            sinr=s, rate_bps=rate(s, radio.bandwidth_hz)))

    overall = float(np.mean([p.rate_bps for p in per_node]))
    return ScheduleEvaluation(per_node=per_node, collision_events=events,
                              overall_rate_bps=overall,
                              total_travel_time=float(solution.objective))


# ---------------------------------------------------------------------------
# Monte Carlo experiments


@dataclass(frozen=True)
class ExperimentConfig:
    scenarios: tuple[str, ...] = ("A", "B")
    node_counts: tuple[int, ...] = (12, 14, 16, 18)
    n_robots: int = 3
    runs: int = 100
    base_seed: int = 0
    side_length: float = 50.0
    beams_per_cell: int = 12
    velocity: float = 5.0
    horizon: float = 200.0
    service_time: float = 2.0
    min_separation: float = 1.0
    radio: RadioParams = field(default_factory=RadioParams)
    limits: SolveLimits = field(default_factory=SolveLimits)

    def to_dict(self) -> dict:
        d = {
            "scenarios": list(self.scenarios),
            "node_counts": list(self.node_counts),
            "n_robots": self.n_robots,
            "runs": self.runs,
            "base_seed": self.base_seed,
            "side_length": self.side_length,
            "beams_per_cell": self.beams_per_cell,
            "velocity": self.velocity,
            "horizon": self.horizon,
            "service_time": self.service_time,
            "min_separation": self.min_separation,
            "radio": {k: getattr(self.radio, k)
                      for k in ("bandwidth_hz", "tx_power_w", "side_lobe_gain",
                                "beamwidth_rad", "alpha_los", "alpha_nlos",
                                "kappa_los", "kappa_nlos", "noise_psd_w_hz",
                                "carrier_hz", "los_decay_per_m", "fading",
                                "nakagami_m_los", "nakagami_m_nlos",
                                "sidelobe_interference")},
            "limits": {"time_limit": self.limits.time_limit,
                       "node_limit": self.limits.node_limit,
                       "gap_tolerance": self.limits.gap_tolerance},
        }
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        d = dict(d)
        radio = d.pop("radio", {})
        limits = d.pop("limits", {})
        kw = {}
        for k in ("scenarios", "node_counts"):
            if k in d:
                kw[k] = tuple(d.pop(k))
        for k in ("n_robots", "runs", "base_seed", "beams_per_cell"):
            if k in d:
                kw[k] = int(d.pop(k))
        for k in ("side_length", "velocity", "horizon", "service_time",
                  "min_separation"):
            if k in d:
                kw[k] = float(d.pop(k))
        if d:
            raise ValueError(f"unknown experiment config keys: {sorted(d)}")
        kw["radio"] = (radio if isinstance(radio, RadioParams)
                       else RadioParams.from_dict(radio))
        kw["limits"] = (limits if isinstance(limits, SolveLimits)
                        else SolveLimits(**limits))
        return cls(**kw)


@dataclass
class RunRecord:
    scenario: str
    n_nodes: int
    run: int
    h_pairs: int
    status_cua: str
    status_ca: str
    objective_cua: float | None
    objective_ca: float | None
    rate_cua_mbps: float | None
    rate_ca_mbps: float | None
    improvement_pct: float | None
    collisions_cua: int | None
    collisions_ca: int | None
    nodes_explored_cua: int
    nodes_explored_ca: int

    @property
    def included(self) -> bool:
        return self.status_cua == OPTIMAL and self.status_ca == OPTIMAL


@dataclass
class ExperimentResults:
    config: ExperimentConfig
    records: list[RunRecord]

    def included(self, scenario: str | None = None,
                 n_nodes: int | None = None) -> list[RunRecord]:
        return [r for r in self.records if r.included
                and (scenario is None or r.scenario == scenario)
                and (n_nodes is None or r.n_nodes == n_nodes)]

    def excluded_counts(self) -> dict[str, int]:
        out = {"timeout": 0, "infeasible": 0}
        for r in self.records:
            if r.included:
                continue
            if INFEASIBLE_STATUSES & {r.status_cua, r.status_ca}:
                out["infeasible"] += 1
            else:
                out["timeout"] += 1
        return out


INFEASIBLE_STATUSES = {"infeasible"}


def run_seed(base_seed: int, scenario_index: int, n_nodes: int, run: int,
             purpose: int = 0) -> np.random.SeedSequence:
    """Documented per-run seed derivation: one base seed, spawn keys per
    (scenario, node count, run, purpose); purpose 0 samples the instance,
    purpose 1 drives the channel."""
    return np.random.SeedSequence(
        entropy=base_seed, spawn_key=(scenario_index, n_nodes, run, purpose))


def run_single(config: ExperimentConfig, scenario: str, n_nodes: int,
               run: int) -> RunRecord:
    scen_idx = config.scenarios.index(scenario)
    inst_rng = np.random.default_rng(
        run_seed(config.base_seed, scen_idx, n_nodes, run, 0))
    instance = generate_instance(
        scenario, n_nodes, config.n_robots, inst_rng,
        side_length=config.side_length, beams_per_cell=config.beams_per_cell,
        velocity=config.velocity, horizon=config.horizon,
        service_time=config.service_time,
        min_separation=config.min_separation)
    cua = solve(build_mp_cua(instance), config.limits)
    ca_kwargs = {}
    if cua.status == OPTIMAL:
        ca_kwargs = {"warm_routes": cua.routes, "lower_bound": cua.objective}
    ca = solve(build_mp_ca(instance), config.limits, **ca_kwargs)

    rec = RunRecord(
        scenario=scenario, n_nodes=n_nodes, run=run,
        h_pairs=len(instance.collisions.pairs),
        status_cua=cua.status, status_ca=ca.status,
        objective_cua=cua.objective if cua.status == OPTIMAL else None,
        objective_ca=ca.objective if ca.status == OPTIMAL else None,
        rate_cua_mbps=None, rate_ca_mbps=None, improvement_pct=None,
        collisions_cua=None, collisions_ca=None,
        nodes_explored_cua=cua.stats.get("nodes_explored", 0),
        nodes_explored_ca=ca.stats.get("nodes_explored", 0))
    if not rec.included:
        return rec

    link_seed = run_seed(config.base_seed, scen_idx, n_nodes, run, 1)
    ev_cua = evaluate_schedule(cua, instance, config.radio,
                               np.random.default_rng(link_seed))
    ev_ca = evaluate_schedule(ca, instance, config.radio,
                              np.random.default_rng(link_seed))
    rec.rate_cua_mbps = ev_cua.overall_rate_bps / MBPS
    rec.rate_ca_mbps = ev_ca.overall_rate_bps / MBPS
    rec.improvement_pct = 100.0 * (ev_ca.overall_rate_bps -
                                   ev_cua.overall_rate_bps) \
        / ev_cua.overall_rate_bps
    rec.collisions_cua = len(ev_cua.collision_events)
    rec.collisions_ca = len(ev_ca.collision_events)
    return rec


def run_monte_carlo(config: ExperimentConfig,
                    progress=None) -> ExperimentResults:
    """Full experiment sweep; deterministic given the config (runs are
    independent and the aggregation is order-free)."""
    records = []
    for scenario in config.scenarios:
        for n_nodes in config.node_counts:
            for run in range(config.runs):
                rec = run_single(config, scenario, n_nodes, run)
                records.append(rec)
                if progress is not None:
                    progress(rec)
    return ExperimentResults(config=config, records=records)


# ---------------------------------------------------------------------------
# aggregation and export


def _quartiles(values: list[float]) -> dict[str, float]:
    arr = np.asarray(values, dtype=float)
    return {
        "min": float(arr.min()),
        "q1": float(np.percentile(arr, 25)),
        "median": float(np.percentile(arr, 50)),
        "q3": float(np.percentile(arr, 75)),
        "max": float(arr.max()),
        "mean": float(arr.mean()),
    }


def aggregate(results: ExperimentResults) -> dict:
    cfg = results.config
    out: dict = {"rate_box": [], "travel": [], "improvement": []}
    for scenario in cfg.scenarios:
        for n in cfg.node_counts:
            runs = results.included(scenario, n)
            n_excluded = sum(1 for r in results.records
                             if r.scenario == scenario and r.n_nodes == n
                             and not r.included)
            if runs:
                for scheme, attr in (("MP-CUA", "rate_cua_mbps"),
                                     ("MP-CA", "rate_ca_mbps")):
                    q = _quartiles([getattr(r, attr) for r in runs])
                    out["rate_box"].append(
                        {"scenario": scenario, "n_visit": n,
                         "scheme": scheme, **q})
                out["travel"].append(
                    {"scenario": scenario, "n_visit": n,
                     "MP-CUA": float(np.mean([r.objective_cua for r in runs])),
                     "MP-CA": float(np.mean([r.objective_ca for r in runs]))})
                imps = [r.improvement_pct for r in runs]
                out["improvement"].append(
                    {"scenario": scenario, "n_visit": n,
                     "mean_pct": float(np.mean(imps)),
                     "max_pct": float(np.max(imps)),
                     "n_included": len(runs),
                     "n_excluded": n_excluded})
            else:
                out["improvement"].append(
                    {"scenario": scenario, "n_visit": n, "mean_pct": None,
                     "max_pct": None, "n_included": 0,
                     "n_excluded": n_excluded})
    return out


_RAW_COLUMNS = ["scenario", "n_nodes", "run", "h_pairs", "status_cua",
                "status_ca", "objective_cua", "objective_ca",
                "rate_cua_mbps", "rate_ca_mbps", "improvement_pct",
                "collisions_cua", "collisions_ca", "nodes_explored_cua",
                "nodes_explored_ca"]


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def export_results(results: ExperimentResults, out_dir,
                   formats: tuple[str, ...] = ("csv", "json")) -> list[str]:
    """Write the box-plot table, travel-time tables, improvement summary,
    raw per-run records and the reproduction manifest.  Identical results
    produce byte-identical files."""
    from pathlib import Path

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    cfg = results.config
    agg = aggregate(results)
    written = []

    def w(name: str, text: str):
        p = out / name
        p.write_text(text, newline="\n")
        written.append(str(p))

    if "csv" in formats:
        lines = ["scenario,n_visit,scheme,min_mbps,q1_mbps,median_mbps,"
                 "q3_mbps,max_mbps,mean_mbps"]
        for row in agg["rate_box"]:
            lines.append(
                f"{row['scenario']},{row['n_visit']},{row['scheme']},"
                f"{row['min']:.1f},{row['q1']:.1f},{row['median']:.1f},"
                f"{row['q3']:.1f},{row['max']:.1f},{row['mean']:.1f}")
        w("rate_box_stats.csv", "\n".join(lines) + "\n")

        for scenario in cfg.scenarios:
            header = "scheme," + ",".join(
                f"n_visit_{n}" for n in cfg.node_counts)
            rows = {"MP-CUA": [], "MP-CA": []}
            for n in cfg.node_counts:
                entry = next((t for t in agg["travel"]
                              if t["scenario"] == scenario
                              and t["n_visit"] == n), None)
                for scheme in rows:
                    rows[scheme].append(
                        f"{entry[scheme]:.4f}" if entry else "")
            lines = [header]
            for scheme in ("MP-CUA", "MP-CA"):
                lines.append(scheme + "," + ",".join(rows[scheme]))
            w(f"travel_time_scenario_{scenario}.csv", "\n".join(lines) + "\n")

        lines = ["scenario,n_visit,mean_improvement_pct,max_improvement_pct,"
                 "n_included,n_excluded"]
        for row in agg["improvement"]:
            mean_s = "" if row["mean_pct"] is None else f"{row['mean_pct']:.2f}"
            max_s = "" if row["max_pct"] is None else f"{row['max_pct']:.2f}"
            lines.append(f"{row['scenario']},{row['n_visit']},{mean_s},"
                         f"{max_s},{row['n_included']},{row['n_excluded']}")
        w("improvement_summary.csv", "\n".join(lines) + "\n")

        lines = [",".join(_RAW_COLUMNS)]
        for r in results.records:
            lines.append(",".join(_cell(getattr(r, c)) for c in _RAW_COLUMNS))
        w("raw_runs.csv", "\n".join(lines) + "\n")

    if "json" in formats:
        payload = {
            "schema_version": 1,
            "config": cfg.to_dict(),
            "aggregates": agg,
            "records": [{c: getattr(r, c) for c in _RAW_COLUMNS}
                        for r in results.records],
        }
        w("results.json", json.dumps(payload, indent=2, sort_keys=True) + "\n")

    manifest = {
        "schema_version": 1,
        "beamplan_version": _pkg_version,
        "config": cfg.to_dict(),
        "seed_derivation": "SeedSequence(base_seed, spawn_key=(scenario_index,"
                           " n_nodes, run, purpose)); purpose 0 = instance,"
                           " 1 = channel",
    }
    w("run_manifest.json", json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    return written
