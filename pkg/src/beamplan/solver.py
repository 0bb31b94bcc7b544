"""Exact solving, brute-force oracle, and prose-semantics validation.

The branch-and-bound engine searches route constructions directly (arcs are
the branching decisions); every incumbent is decoded to the model's variable
vector and re-checked against the canonical constraint rows before being
returned, so the combinatorial search and the MILP stay in lockstep.
"""
from __future__ import annotations

import itertools
import math
import time
from dataclasses import dataclass, field

import numpy as np

from ._search import (TRACE_CAP, bnb_chunk, new_dominance_tables,
                      root_lower_bound)
from .instance import Instance
from .model import CA, CUA, FEAS_TOL, MilpModel

OPTIMAL = "optimal"
FEASIBLE = "feasible"
INFEASIBLE = "infeasible"
NO_SOLUTION = "no_solution"

_DOM_MAX_NODES = 40


@dataclass(frozen=True)
class SolveLimits:
    time_limit: float = 60.0
    node_limit: int = 50_000_000
    gap_tolerance: float = 1e-9

    def __post_init__(self):
        if self.time_limit <= 0 or self.node_limit <= 0:
            raise ValueError("limits must be positive")
        if not 0 <= self.gap_tolerance < 1:
            raise ValueError("gap tolerance must be in [0, 1)")


@dataclass
class Solution:
    routes: list[list[int]]
    arrival_times: dict[int, float]
    objective: float
    status: str
    gap: float | None = None
    stats: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "routes": self.routes,
            "arrival_times": {str(k): v for k, v in self.arrival_times.items()},
            "objective": self.objective,
            "status": self.status,
            "gap": self.gap,
            "stats": self.stats,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Solution":
        return cls(routes=[list(map(int, r)) for r in d["routes"]],
                   arrival_times={int(k): float(v)
                                  for k, v in d["arrival_times"].items()},
                   objective=float(d["objective"]) if d["objective"] is not None
                   else math.inf,
                   status=d["status"], gap=d.get("gap"),
                   stats=d.get("stats", {}))


@dataclass(frozen=True)
class Violation:
    clause: str
    message: str
    indices: tuple = ()


@dataclass
class ValidationReport:
    ok: bool
    violations: list[Violation]

    def clauses(self) -> set[str]:
        return {v.clause for v in self.violations}


# ---------------------------------------------------------------------------
# schedule arithmetic shared by heuristics and the validator


def route_travel_time(T, route: list[int]) -> float:
    return float(sum(T[a, b] for a, b in zip(route, route[1:])))


def total_travel_time(instance: Instance, routes: list[list[int]]) -> float:
    return float(sum(route_travel_time(instance.travel, r) for r in routes))


def chain_arrival_times(instance: Instance, routes: list[list[int]]
                        ) -> dict[int, float]:
    """Arrival times pinned by the exact chain t_j = t_i + w_i + T_ij."""
    e0, _ = instance.depot_window
    T = instance.travel
    w = instance.service_array()
    t: dict[int, float] = {}
    for route in routes:
        clock = e0
        last = 0
        for u in route[1:-1]:
            clock = clock + T[last, u]
            t[u] = clock
            clock += w[u]
            last = u
    return t


def _schedule_feasible(instance: Instance, inner_routes: list[list[int]],
                       variant: str, allow_idle: bool,
                       tol: float = FEAS_TOL) -> bool:
    T = instance.travel
    w = instance.service_array()
    e, l = instance.window_arrays()
    e0, l0 = instance.depot_window
    sink = instance.sink
    t: dict[int, float] = {}
    for r in inner_routes:
        if not r:
            if not allow_idle:
                return False
            continue
        clock = e0
        last = 0
        for u in r:
            clock = clock + T[last, u]
            if clock < e[u] - tol or clock > l[u] + tol:
                return False
            t[u] = clock
            clock += w[u]
            last = u
        if clock + T[last, sink] > l0 + tol:
            return False
    if variant == CA:
        for i, j in instance.collisions.pairs:
            if i in t and j in t:
                lo = max(t[i], t[j])
                hi = min(t[i] + w[i], t[j] + w[j])
                if hi - lo > tol:
                    return False
    return True


# ---------------------------------------------------------------------------
# warm start heuristics


def _two_opt_relocate(T, routes: list[list[int]], sink: int) -> list[list[int]]:
    routes = [list(r) for r in routes]
    K = len(routes)

    def cost(rs):
        return sum(route_travel_time(T, [0] + r + [sink]) for r in rs)

    improved = True
    while improved:
        improved = False
        for k in range(K):
            r = routes[k]
            n = len(r)
            for i in range(n - 1):
                for j in range(i + 1, n):
                    nr = r[:i] + r[i:j + 1][::-1] + r[j + 1:]
                    if cost([nr]) < cost([r]) - 1e-12:
                        routes[k] = nr
                        r = nr
                        improved = True
        for k1 in range(K):
            for k2 in range(K):
                if k1 == k2 or len(routes[k1]) <= 1:
                    continue
                moved = False
                for i in range(len(routes[k1])):
                    u = routes[k1][i]
                    for j in range(len(routes[k2]) + 1):
                        r1 = routes[k1][:i] + routes[k1][i + 1:]
                        r2 = routes[k2][:j] + [u] + routes[k2][j:]
                        if cost([r1, r2]) < cost([routes[k1], routes[k2]]) - 1e-12:
                            routes[k1], routes[k2] = r1, r2
                            improved = True
                            moved = True
                            break
                    if moved:
                        break
    return routes


def _initial_route_sets(instance: Instance) -> list[list[list[int]]]:
    v = instance.n_nodes
    K = instance.n_robots
    T = instance.travel
    if v < K:
        return []
    pos = instance.nodes.positions()
    dx, dy = instance.layout.depot
    ang = np.arctan2(pos[:, 1] - dy, pos[:, 0] - dx)
    order = list(np.argsort(ang, kind="stable") + 1)
    out = []
    for shift in range(0, v, max(1, v // 4)):
        rot = order[shift:] + order[:shift]
        base, extra = divmod(v, K)
        routes, i = [], 0
        for k in range(K):
            m = base + (1 if k < extra else 0)
            routes.append(rot[i:i + m])
            i += m
        out.append(routes)
    unvis = set(range(1, v + 1))
    routes = [[] for _ in range(K)]
    lasts = [0] * K
    while unvis:
        k = min(range(K), key=lambda k: len(routes[k]))
        u = min(unvis, key=lambda u: T[lasts[k], u])
        routes[k].append(u)
        lasts[k] = u
        unvis.remove(u)
    out.append(routes)
    # nearest-neighbor ordering within each candidate set
    for routes in out:
        for k in range(K):
            rem = set(routes[k])
            seq = []
            last = 0
            while rem:
                u = min(rem, key=lambda u: (T[last, u], u))
                seq.append(u)
                rem.remove(u)
                last = u
            routes[k] = seq
    return out


def _ca_repair(instance: Instance, inner_routes: list[list[int]],
               allow_idle: bool, tol: float = FEAS_TOL
               ) -> list[list[int]] | None:
    """Cheap perturbations that try to clear service-interval overlaps."""
    K = len(inner_routes)
    base = [list(r) for r in inner_routes]
    for rev in itertools.product((False, True), repeat=K):
        cand = [r[::-1] if f else list(r) for f, r in zip(rev, base)]
        if _schedule_feasible(instance, cand, CA, allow_idle, tol):
            return cand
    w = instance.service_array()
    cur = base
    for _ in range(2 * max(1, len(instance.collisions.pairs))):
        if not _schedule_feasible(instance, cur, CUA, allow_idle, tol):
            return None
        t = chain_arrival_times(instance, [[0] + r + [instance.sink]
                                           for r in cur])
        viol = None
        for i, j in sorted(instance.collisions.pairs):
            if i in t and j in t:
                if min(t[i] + w[i], t[j] + w[j]) - max(t[i], t[j]) > tol:
                    viol = (i, j)
                    break
        if viol is None:
            return cur
        moved = False
        for node in viol:
            for k in range(K):
                if node in cur[k]:
                    nr = [x for x in cur[k] if x != node] + [node]
                    cand = [nr if kk == k else cur[kk] for kk in range(K)]
                    if _schedule_feasible(instance, cand, CA, allow_idle, tol):
                        return cand
                    if _schedule_feasible(instance, cand, CUA, allow_idle, tol):
                        cur = cand
                        moved = True
                    break
            if moved:
                break
        if not moved:
            return None
    return None


def _warm_start(instance: Instance, variant: str, allow_idle: bool,
                extra: list[list[list[int]]] | None = None
                ) -> tuple[float, list[list[int]] | None]:
    T = instance.travel
    sink = instance.sink
    best_cost = math.inf
    best = None
    candidates = _initial_route_sets(instance)
    if extra:
        candidates = [[list(r) for r in rs] for rs in extra] + candidates
    for routes in candidates:
        routes = _two_opt_relocate(T, routes, sink)
        if variant == CA and instance.collisions.pairs:
            repaired = _ca_repair(instance, routes, allow_idle)
            if repaired is None:
                continue
            routes = repaired
        if not _schedule_feasible(instance, routes, variant, allow_idle):
            continue
        c = sum(route_travel_time(T, [0] + r + [sink]) for r in routes)
        if c < best_cost - 1e-12:
            best_cost = c
            best = [list(r) for r in routes]
    return best_cost, best


def _encode_moves(inner_routes: list[list[int]], v: int, K: int) -> np.ndarray:
    nonempty = sorted([r for r in inner_routes if r], key=lambda r: r[0])
    empty = [r for r in inner_routes if not r]
    seq: list[int] = []
    for r in nonempty + empty:
        seq.extend(r)
        seq.append(0)
    return np.array(seq + [-9] * (v + K - len(seq)), dtype=np.int64)


def _decode_moves(seq: np.ndarray, sink: int) -> list[list[int]]:
    routes = []
    cur = [0]
    for x in seq:
        if x == -9:
            break
        if x == 0:
            cur.append(sink)
            routes.append(cur)
            cur = [0]
        else:
            cur.append(int(x))
    return routes


# ---------------------------------------------------------------------------
# exact solve


def solve(model: MilpModel, limits: SolveLimits | None = None, *,
          warm_routes: list[list[int]] | None = None,
          lower_bound: float | None = None) -> Solution:
    """Branch-and-bound to proven optimality (or best incumbent at a limit).

    ``warm_routes`` seeds the incumbent (full routes incl. depot endpoints);
    ``lower_bound`` is an externally known valid bound (e.g. the CUA optimum
    when solving CA) that allows early termination.
    """
    limits = limits or SolveLimits()
    instance = model.instance
    v = instance.n_nodes
    K = instance.n_robots
    sink = instance.sink
    T = np.ascontiguousarray(instance.travel)
    e, l = instance.window_arrays()
    w = instance.service_array()
    e0, _ = instance.depot_window

    arc_ok = np.zeros((v + 2, v + 2), dtype=np.uint8)
    for i, j in model.arcs:
        arc_ok[i, j] = 1

    pairs = sorted(instance.collisions.pairs) if model.variant == CA else []
    plist: list[list[int]] = [[] for _ in range(v + 2)]
    for a, b in pairs:
        plist[a].append(b)
        plist[b].append(a)
    pstart = np.zeros(v + 3, dtype=np.int64)
    flat: list[int] = []
    for u in range(v + 2):
        pstart[u + 1] = pstart[u] + len(plist[u])
        flat.extend(sorted(plist[u]))
    pflat = np.array(flat or [0], dtype=np.int64)

    wall_start = time.perf_counter()
    extra = None
    if warm_routes is not None:
        extra = [[list(r[1:-1]) for r in warm_routes]]
    warm_cost, warm = _warm_start(instance, model.variant,
                                  model.allow_idle_robots, extra)

    maxd = v + K + 2
    ctl = np.zeros(8, dtype=np.int64)
    fctl = np.zeros(4, dtype=np.float64)
    fctl[0] = warm_cost + 1e-9 if warm is not None else 1e300
    best_seq = (_encode_moves(warm, v, K) if warm is not None
                else np.full(v + K, -9, dtype=np.int64))
    lv_i64 = lambda: np.zeros(maxd, dtype=np.int64)
    lv_last, lv_robot, lv_thr, lv_mask, lv_node, lv_ncand, lv_ci = (
        lv_i64() for _ in range(7))
    lv_started = np.zeros(maxd, dtype=np.uint8)
    lv_time = np.zeros(maxd, dtype=np.float64)
    lv_cost = np.zeros(maxd, dtype=np.float64)
    cands = np.zeros((maxd, v + 2), dtype=np.int64)
    t_node = np.full(v + 2, -1.0)
    mst_nodes = np.zeros(v + 2, dtype=np.int64)
    mst_key = np.zeros(v + 2, dtype=np.float64)
    mst_intree = np.zeros(v + 2, dtype=np.uint8)
    move_cost = np.zeros(v + 2, dtype=np.float64)
    trace_explored = np.zeros(TRACE_CAP, dtype=np.int64)
    trace_obj = np.zeros(TRACE_CAP, dtype=np.float64)
    dom_cost, dom_time = new_dominance_tables()

    use_dom = (v <= _DOM_MAX_NODES and not pairs
               and all(e[i] <= e0 + T[0, i] + FEAS_TOL for i in range(1, v + 1)))
    lb_floor = -1e300 if lower_bound is None else float(lower_bound)
    allow_idle = 1 if model.allow_idle_robots else 0

    chunk = 1_000_000
    while ctl[2] == 0 and ctl[1] < limits.node_limit:
        if time.perf_counter() - wall_start > limits.time_limit:
            break
        budget = min(chunk, limits.node_limit - ctl[1])
        bnb_chunk(T, e, l, w, K, arc_ok, pstart, pflat, allow_idle,
                  1 if use_dom else 0, lb_floor, FEAS_TOL, budget,
                  ctl, fctl, lv_last, lv_robot, lv_started, lv_thr, lv_time,
                  lv_cost, lv_mask, lv_node, lv_ncand, lv_ci, cands, t_node,
                  mst_nodes, mst_key, mst_intree, move_cost, best_seq,
                  trace_explored, trace_obj, dom_cost, dom_time)

    wall = time.perf_counter() - wall_start
    completed = ctl[2] == 1
    explored = int(ctl[1])
    best = float(fctl[0])
    root_lb = float(fctl[1])
    have_solution = best < 1e299

    trace = [(int(trace_explored[i]), float(trace_obj[i]))
             for i in range(int(ctl[3]))]
    if warm is not None:
        trace = [(0, float(warm_cost))] + trace
    lb_final = best if (completed and have_solution) else max(root_lb, lb_floor)
    stats = {
        "nodes_explored": explored,
        "root_lower_bound": root_lb,
        "incumbent_trace": trace,
        "lower_bound_trace": [(0, root_lb), (explored, lb_final)],
        "wall_time_s": wall,
        "completed": bool(completed),
        "warm_start_objective": None if warm is None else float(warm_cost),
        "diagnostics": list(model.diagnostics),
    }

    if not have_solution:
        status = INFEASIBLE if completed else NO_SOLUTION
        return Solution(routes=[], arrival_times={}, objective=math.inf,
                        status=status, gap=None, stats=stats)

    routes = _decode_moves(best_seq, sink)
    arrival = chain_arrival_times(instance, routes)
    objective = total_travel_time(instance, routes)
    if abs(objective - best) > 1e-6 * max(1.0, abs(best)):
        raise RuntimeError(
            f"decoded objective {objective} != search objective {best}")
    point = model.point_from_routes([r for r in routes], arrival)
    model_obj = model.objective_value(point)
    if abs(model_obj - objective) > 1e-6 * max(1.0, abs(objective)):
        raise RuntimeError(
            f"model objective {model_obj} != route objective {objective}")
    bad = model.violated_rows(point)
    if bad:
        raise RuntimeError(f"decoded solution violates model rows: {bad[:5]}")

    if completed:
        status, gap = OPTIMAL, 0.0
    else:
        status = FEASIBLE
        gap = max(0.0, (objective - lb_final) / max(abs(objective), 1e-12))
    return Solution(routes=routes, arrival_times=arrival, objective=objective,
                    status=status, gap=gap, stats=stats)


# ---------------------------------------------------------------------------
# brute-force oracle (kept deliberately independent of the search kernel)


def _ordered_partitions(nodes: list[int], K: int, allow_idle: bool):
    """All labeled splits of every permutation into K routes (canonical order:
    nonempty routes by increasing first node, empty routes last)."""
    v = len(nodes)
    min_cuts = K - 1
    for perm in itertools.permutations(nodes):
        if allow_idle:
            cut_positions = itertools.combinations_with_replacement(
                range(0, v + 1), min_cuts)
        else:
            cut_positions = itertools.combinations(range(1, v), min_cuts)
        for cuts in cut_positions:
            segs = []
            prev = 0
            for c in list(cuts) + [v]:
                segs.append(list(perm[prev:c]))
                prev = c
            nonempty = [s for s in segs if s]
            if not allow_idle and len(nonempty) < K:
                continue
            firsts = [s[0] for s in nonempty]
            if firsts != sorted(firsts):
                continue
            yield nonempty + [[] for _ in range(K - len(nonempty))]


def _waiting_could_rescue(instance: Instance, inner_routes: list[list[int]],
                          grid: float = 0.1, max_delay: float = 10.0,
                          combo_cap: int = 200_000) -> bool:
    """Diagnostic: could per-robot departure delays (0.1 s grid) have cleared
    the overlaps that the exact-chain schedule fails on?  The time constraints
    pin arrival times, so a rescue found here never changes feasibility; it is
    only reported."""
    w = instance.service_array()
    e, l = instance.window_arrays()
    e0, l0 = instance.depot_window
    T = instance.travel
    sink = instance.sink
    routes = [r for r in inner_routes if r]
    base_t = []
    slack = []
    for r in routes:
        clock = e0
        last = 0
        t = {}
        for u in r:
            clock += T[last, u]
            t[u] = clock
            clock += w[u]
            last = u
        ret = clock + T[last, sink]
        s = l0 - ret
        for u in r:
            s = min(s, l[u] - t[u])
        base_t.append(t)
        slack.append(max(0.0, s))
    steps = [int(min(s, max_delay) / grid) + 1 for s in slack]
    total = 1
    for s in steps:
        total *= s
        if total > combo_cap:
            return False
    pairs = sorted(instance.collisions.pairs)
    node_route = {u: ri for ri, r in enumerate(routes) for u in r}
    for combo in itertools.product(*(range(s) for s in steps)):
        deltas = [c * grid for c in combo]
        ok = True
        for i, j in pairs:
            if i not in node_route or j not in node_route:
                continue
            ti = base_t[node_route[i]][i] + deltas[node_route[i]]
            tj = base_t[node_route[j]][j] + deltas[node_route[j]]
            if min(ti + w[i], tj + w[j]) - max(ti, tj) > FEAS_TOL:
                ok = False
                break
        if ok:
            return True
    return False


def brute_force(instance: Instance, variant: str,
                allow_idle_robots: bool = False,
                check_waiting_rescue: bool = False) -> Solution:
    """Exhaustive oracle: enumerate every labeled route set, keep the best.

    Tractable for v <= 9, K <= 3.  Arrival times follow the exact chain; ties
    are broken by lexicographic route encoding.
    """
    v = instance.n_nodes
    K = instance.n_robots
    if v > 9 or K > 3:
        raise ValueError("brute force limited to v <= 9, K <= 3")
    T = instance.travel
    w = instance.service_array()
    e, l = instance.window_arrays()
    e0, l0 = instance.depot_window
    sink = instance.sink
    tol = FEAS_TOL
    pairs = sorted(instance.collisions.pairs)

    best = None
    waiting_rescues = 0
    for inner in _ordered_partitions(list(range(1, v + 1)), K,
                                     allow_idle_robots):
        t: dict[int, float] = {}
        feasible = True
        overlap_only = True
        for r in inner:
            if not r:
                continue
            clock = e0
            last = 0
            for u in r:
                clock += T[last, u]
                t[u] = clock
                if clock < e[u] - tol or clock > l[u] + tol:
                    feasible = False
                    overlap_only = False
                clock += w[u]
                last = u
            if clock + T[last, sink] > l0 + tol:
                feasible = False
                overlap_only = False
            if not feasible:
                break
        if feasible and variant == CA:
            for i, j in pairs:
                lo = max(t[i], t[j])
                hi = min(t[i] + w[i], t[j] + w[j])
                if hi - lo > tol:
                    feasible = False
                    break
            if not feasible and overlap_only and check_waiting_rescue:
                if _waiting_could_rescue(instance, inner):
                    waiting_rescues += 1
        if not feasible:
            continue
        cost = sum(route_travel_time(T, [0] + r + [sink]) for r in inner)
        encoding = tuple(tuple(r) for r in inner)
        if best is None or cost < best[0] - 1e-12 or (
                abs(cost - best[0]) <= 1e-12 and encoding < best[1]):
            best = (cost, encoding, dict(t))

    stats = {"enumerated": True, "waiting_rescues_found": waiting_rescues}
    if best is None:
        return Solution(routes=[], arrival_times={}, objective=math.inf,
                        status=INFEASIBLE, gap=None, stats=stats)
    cost, encoding, t = best
    routes = [[0] + list(r) + [sink] for r in encoding]
    return Solution(routes=routes, arrival_times=t, objective=float(cost),
                    status=OPTIMAL, gap=0.0, stats=stats)


# ---------------------------------------------------------------------------
# prose-semantics validation


def validate(solution: Solution, instance: Instance, variant: str,
             allow_idle_robots: bool = False,
             tol: float = FEAS_TOL) -> ValidationReport:
    """Check a candidate schedule against the prose constraints directly.

    Independent of the MILP encoding: depot endpoints per robot, unique
    visits, window membership, exact arrival chains, return horizon, and
    (CA) disjoint service intervals per collision pair.
    """
    out: list[Violation] = []
    v = instance.n_nodes
    sink = instance.sink
    T = instance.travel
    w = instance.service_array()
    e, l = instance.window_arrays()
    e0, l0 = instance.depot_window
    t = solution.arrival_times

    malformed = False
    for k, route in enumerate(solution.routes):
        if len(route) < 2 or route[0] != 0 or route[-1] != sink:
            out.append(Violation(
                "malformed", f"robot {k + 1} route must run depot 0 -> sink "
                f"{sink}: {route}", (k + 1,)))
            malformed = True
            continue
        inner = route[1:-1]
        if any(u < 1 or u > v for u in inner):
            out.append(Violation(
                "malformed", f"robot {k + 1} visits unknown or depot ids",
                (k + 1,)))
            malformed = True
        if not inner and not allow_idle_robots:
            out.append(Violation(
                "depot_endpoints",
                f"robot {k + 1} never leaves the depot", (k + 1,)))
    if len(solution.routes) != instance.n_robots:
        out.append(Violation(
            "depot_endpoints",
            f"{len(solution.routes)} routes for {instance.n_robots} robots",
            ()))
    if malformed:
        return ValidationReport(ok=False, violations=out)

    visited = [u for r in solution.routes for u in r[1:-1]]
    if sorted(visited) != list(range(1, v + 1)):
        missing = sorted(set(range(1, v + 1)) - set(visited))
        dupes = sorted({u for u in visited if visited.count(u) > 1})
        out.append(Violation(
            "visit_partition",
            f"missing={missing} duplicated={dupes}", tuple(missing + dupes)))

    for k, route in enumerate(solution.routes):
        inner = route[1:-1]
        if not inner:
            continue
        clock = e0
        last = 0
        for u in inner:
            expect = clock + T[last, u]
            tu = t.get(u)
            if tu is None:
                out.append(Violation(
                    "arrival_chain", f"no arrival time for node {u}", (u,)))
                tu = expect
            elif abs(tu - expect) > tol:
                out.append(Violation(
                    "arrival_chain",
                    f"t_{u} = {tu:.6f} but chain gives {expect:.6f}", (u,)))
            if tu < e[u] - tol or tu > l[u] + tol:
                out.append(Violation(
                    "window",
                    f"t_{u} = {tu:.6f} outside [{e[u]:.6f}, {l[u]:.6f}]", (u,)))
            clock = expect + w[u]
            last = u
        ret = clock + T[last, sink]
        if ret > l0 + tol:
            out.append(Violation(
                "depot_return",
                f"robot {k + 1} returns at {ret:.6f} > l0 = {l0:.6f}",
                (k + 1,)))

    if variant == CA:
        for i, j in sorted(instance.collisions.pairs):
            if i not in t or j not in t:
                continue
            lo = max(t[i], t[j])
            hi = min(t[i] + w[i], t[j] + w[j])
            if hi - lo > tol:
                out.append(Violation(
                    "ca_overlap",
                    f"pair ({i}, {j}) service intervals overlap by "
                    f"{hi - lo:.6f} s", (i, j)))

    if solution.status in (OPTIMAL, FEASIBLE) and solution.routes:
        recomputed = total_travel_time(instance, solution.routes)
        if abs(recomputed - solution.objective) > 1e-6 * max(
                1.0, abs(recomputed)):
            out.append(Violation(
                "objective_consistency",
                f"objective {solution.objective:.9f} != recomputed "
                f"{recomputed:.9f}", ()))

    return ValidationReport(ok=not out, violations=out)
