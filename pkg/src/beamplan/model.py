"""Canonical MILP formulations of the two path-planning variants.

Variables:
  x_{i}_{j}_{k}  binary, robot k drives arc (i, j); arcs into node 0 and out
                 of node v+1 never exist (depot is duplicated as source 0 and
                 sink v+1),
  t_{i}          continuous arrival time at visit node i, bounded [0, l0],
  z_{i}_{j}      binary order variable per collision pair (CA variant only).

Every constraint is stored in canonical sparse form (coefs, relation, rhs) so
solutions can be checked row by row and the model exported as LP text.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass

from .instance import Instance

CUA = "cua"
CA = "ca"

FEAS_TOL = 1e-6


@dataclass(frozen=True)
class BigM:
    """Uniform big-M constant: l0 + max service + max travel time."""

    value: float


def big_m_value(instance: Instance) -> BigM:
    _, l0 = instance.depot_window
    w = instance.service_array()
    return BigM(value=float(l0 + w.max() + instance.travel.max()))


@dataclass(frozen=True)
class Variable:
    name: str
    kind: str               # "binary" | "continuous"
    lb: float
    ub: float


@dataclass(frozen=True)
class Row:
    name: str
    family: str
    coefs: tuple[tuple[str, float], ...]
    relation: str           # "<=" | ">=" | "="
    rhs: float

    def evaluate(self, values: dict[str, float]) -> float:
        return sum(c * values.get(v, 0.0) for v, c in self.coefs)

    def satisfied(self, values: dict[str, float], tol: float = FEAS_TOL) -> bool:
        lhs = self.evaluate(values)
        if self.relation == "<=":
            return lhs <= self.rhs + tol
        if self.relation == ">=":
            return lhs >= self.rhs - tol
        return abs(lhs - self.rhs) <= tol


@dataclass(frozen=True)
class MilpModel:
    variant: str
    instance: Instance
    variables: tuple[Variable, ...]
    objective: tuple[tuple[str, float], ...]
    rows: tuple[Row, ...]
    arcs: frozenset[tuple[int, int]]
    big_m: float
    allow_idle_robots: bool
    digest: str
    diagnostics: tuple[str, ...] = ()
    notes: tuple[str, ...] = ()

    def variable_names(self) -> list[str]:
        return [v.name for v in self.variables]

    def family_counts(self) -> dict[str, int]:
        out: dict[str, int] = {}
        for r in self.rows:
            out[r.family] = out.get(r.family, 0) + 1
        return out

    def variable_counts(self) -> dict[str, int]:
        out = {"x": 0, "t": 0, "z": 0}
        for v in self.variables:
            out[v.name.split("_")[0]] += 1
        return out

    def stats(self) -> dict:
        return {
            "variant": self.variant,
            "instance_digest": self.digest,
            "big_m": self.big_m,
            "n_variables": len(self.variables),
            "n_rows": len(self.rows),
            "variables": self.variable_counts(),
            "rows_by_family": self.family_counts(),
            "n_arcs": len(self.arcs),
            "diagnostics": list(self.diagnostics),
            "notes": list(self.notes),
        }

    def objective_value(self, values: dict[str, float]) -> float:
        return sum(c * values.get(v, 0.0) for v, c in self.objective)

    def violated_rows(self, values: dict[str, float],
                      tol: float = FEAS_TOL) -> list[str]:
        bad = [r.name for r in self.rows if not r.satisfied(values, tol)]
        bounds = {v.name: v for v in self.variables}
        for name, val in values.items():
            var = bounds.get(name)
            if var is None:
                continue
            if val < var.lb - tol or val > var.ub + tol:
                bad.append(f"bound[{name}]")
            if var.kind == "binary" and min(abs(val), abs(val - 1)) > tol:
                bad.append(f"integrality[{name}]")
        return bad

    def point_from_routes(self, routes: list[list[int]],
                          arrival_times: dict[int, float],
                          z_choice: dict[tuple[int, int], int] | None = None,
                          ) -> dict[str, float]:
        """Assemble the full variable vector for a labeled route set.

        For CA, z is set from the arrival order unless given explicitly; an
        overlapping pair gets z by earlier start (the (12c) rows then flag it).
        """
        values = {v.name: 0.0 for v in self.variables}
        for k, route in enumerate(routes, start=1):
            for i, j in zip(route, route[1:]):
                values[f"x_{i}_{j}_{k}"] = 1.0
        for i, t in arrival_times.items():
            values[f"t_{i}"] = float(t)
        if self.variant == CA:
            for (i, j) in sorted(self.instance.collisions.pairs):
                if z_choice is not None:
                    zij = z_choice[(i, j)]
                else:
                    zij = 1 if arrival_times[i] <= arrival_times[j] else 0
                values[f"z_{i}_{j}"] = float(zij)
                values[f"z_{j}_{i}"] = float(1 - zij)
        return values


def _arc_set(instance: Instance, allow_idle_robots: bool,
             prune_unreachable: bool) -> tuple[frozenset, list[str]]:
    v = instance.n_nodes
    sink = instance.sink
    e, l = instance.window_arrays()
    w = instance.service_array()
    T = instance.travel
    e0, l0 = instance.depot_window
    diagnostics = []
    arcs = set()
    for i in range(0, sink + 1):
        for j in range(0, sink + 1):
            if i == j or i == sink or j == 0:
                continue
            if i == 0 and j == sink:
                if allow_idle_robots:
                    arcs.add((i, j))
                continue
            arcs.add((i, j))
    # earliest possible arrival at each visit node (exact-chain semantics)
    tmin = {i: e0 + T[0, i] for i in range(1, v + 1)}
    for i in range(1, v + 1):
        if tmin[i] > l[i] + FEAS_TOL:
            diagnostics.append(
                f"node {i} unreachable: earliest arrival "
                f"{tmin[i]:.3f} s exceeds window end {l[i]:.3f} s")
            if prune_unreachable:
                arcs.discard((0, i))
        if tmin[i] + w[i] + T[i, sink] > l0 + FEAS_TOL:
            diagnostics.append(
                f"node {i} cannot be served and returned from by the "
                f"horizon {l0:.3f} s")
    if prune_unreachable:
        for i in range(1, v + 1):
            for j in range(1, v + 1):
                if i == j:
                    continue
                if tmin[i] + w[i] + T[i, j] > l[j] + FEAS_TOL:
                    arcs.discard((i, j))
    return frozenset(arcs), diagnostics


def _build(instance: Instance, variant: str, allow_idle_robots: bool,
           prune_unreachable: bool) -> MilpModel:
    v = instance.n_nodes
    sink = instance.sink
    K = instance.n_robots
    T = instance.travel
    e, l = instance.window_arrays()
    w = instance.service_array()
    e0, l0 = instance.depot_window
    M = big_m_value(instance).value
    arcs, diagnostics = _arc_set(instance, allow_idle_robots, prune_unreachable)
    robots = range(1, K + 1)
    vp = range(1, v + 1)

    variables = []
    for i, j in sorted(arcs):
        for k in robots:
            variables.append(Variable(f"x_{i}_{j}_{k}", "binary", 0.0, 1.0))
    for i in vp:
        variables.append(Variable(f"t_{i}", "continuous", 0.0, float(l0)))

    objective = tuple((f"x_{i}_{j}_{k}", float(T[i, j]))
                      for (i, j) in sorted(arcs) for k in robots)

    rows: list[Row] = []

    def add(name, family, coefs, relation, rhs):
        rows.append(Row(name=name, family=family,
                        coefs=tuple(coefs), relation=relation, rhs=float(rhs)))

    for k in robots:
        out0 = [(f"x_0_{j}_{k}", 1.0) for j in vp if (0, j) in arcs]
        if allow_idle_robots and (0, sink) in arcs:
            out0.append((f"x_0_{sink}_{k}", 1.0))
        add(f"c7a_k{k}", "7a", out0, "=", 1.0)
    for k in robots:
        into = [(f"x_{j}_{sink}_{k}", 1.0) for j in vp if (j, sink) in arcs]
        if allow_idle_robots and (0, sink) in arcs:
            into.append((f"x_0_{sink}_{k}", 1.0))
        add(f"c7b_k{k}", "7b", into, "=", 1.0)
    for j in vp:
        coefs = [(f"x_{i}_{j}_{k}", 1.0)
                 for i in range(0, sink) if i != j and (i, j) in arcs
                 for k in robots]
        add(f"c7c_j{j}", "7c", coefs, "=", 1.0)
    # flow conservation for every node id incl. the depot copies; at the
    # copies the forced unit flow of the virtual closing arc sink->source is
    # substituted, leaving "leave once" / "enter once" rows
    for j in range(0, sink + 1):
        for k in robots:
            if j == 0:
                coefs = [(f"x_0_{h}_{k}", 1.0)
                         for h in range(1, sink + 1) if (0, h) in arcs]
                add(f"c7d_j0_k{k}", "7d", coefs, "=", 1.0)
            elif j == sink:
                coefs = [(f"x_{i}_{sink}_{k}", 1.0)
                         for i in range(0, sink) if (i, sink) in arcs]
                add(f"c7d_j{sink}_k{k}", "7d", coefs, "=", 1.0)
            else:
                coefs = [(f"x_{i}_{j}_{k}", 1.0)
                         for i in range(0, sink) if i != j and (i, j) in arcs]
                coefs += [(f"x_{j}_{h}_{k}", -1.0)
                          for h in range(1, sink + 1) if h != j and (j, h) in arcs]
                add(f"c7d_j{j}_k{k}", "7d", coefs, "=", 0.0)

    for i in vp:
        if (0, i) not in arcs:
            continue
        for k in robots:
            # e0 + T0i <= t_i + M (1 - x_0ik)
            add(f"c8a_i{i}_k{k}", "8a",
                [(f"x_0_{i}_{k}", M), (f"t_{i}", -1.0)],
                "<=", M - e0 - T[0, i])
    for i, j in itertools.permutations(vp, 2):
        if (i, j) not in arcs:
            continue
        for k in robots:
            # t_i + w_i + T_ij <= t_j + M (1 - x_ijk)
            add(f"c8b_i{i}_j{j}_k{k}", "8b",
                [(f"t_{i}", 1.0), (f"t_{j}", -1.0), (f"x_{i}_{j}_{k}", M)],
                "<=", M - w[i] - T[i, j])
    for i in vp:
        if (i, sink) not in arcs:
            continue
        for k in robots:
            # t_i + w_i + T_i,sink <= x_i,sink,k (l0 - M) + M
            add(f"c8c_i{i}_k{k}", "8c",
                [(f"t_{i}", 1.0), (f"x_{i}_{sink}_{k}", M - l0)],
                "<=", M - w[i] - T[i, sink])
    for i in vp:
        if (0, i) not in arcs:
            continue
        for k in robots:
            # t_i <= e0 + T0i + M (1 - x_0ik)
            add(f"c8d_i{i}_k{k}", "8d",
                [(f"t_{i}", 1.0), (f"x_0_{i}_{k}", M)],
                "<=", e0 + T[0, i] + M)
    for i, j in itertools.permutations(vp, 2):
        if (i, j) not in arcs:
            continue
        # t_j <= t_i + w_i + T_ij + M (1 - sum_k x_ijk)
        coefs = [(f"t_{j}", 1.0), (f"t_{i}", -1.0)]
        coefs += [(f"x_{i}_{j}_{k}", M) for k in robots]
        add(f"c8e_i{i}_j{j}", "8e", coefs, "<=", w[i] + T[i, j] + M)
    for i in vp:
        add(f"c8f_lo_i{i}", "8f", [(f"t_{i}", 1.0)], ">=", e[i])
        add(f"c8f_hi_i{i}", "8f", [(f"t_{i}", 1.0)], "<=", l[i])

    notes = []
    if variant == CA:
        pairs = sorted(instance.collisions.pairs)
        for i, j in pairs:
            variables.append(Variable(f"z_{i}_{j}", "binary", 0.0, 1.0))
            variables.append(Variable(f"z_{j}_{i}", "binary", 0.0, 1.0))
        if pairs:
            coefs = []
            for i, j in pairs:
                coefs += [(f"z_{i}_{j}", 1.0), (f"z_{j}_{i}", 1.0)]
            add("c12a", "12a", coefs, "=", float(len(pairs)))
            notes.append("(12a) is implied by the (12b) rows; emitted anyway")
        for i, j in pairs:
            add(f"c12b_i{i}_j{j}", "12b",
                [(f"z_{i}_{j}", 1.0), (f"z_{j}_{i}", 1.0)], "=", 1.0)
        for i, j in pairs:
            for a, b in ((i, j), (j, i)):
                # t_a + w_a <= t_b + M (1 - z_ab); the matching h term is
                # identically zero because rows exist only for h = 1 pairs
                add(f"c12c_i{a}_j{b}", "12c",
                    [(f"t_{a}", 1.0), (f"t_{b}", -1.0), (f"z_{a}_{b}", M)],
                    "<=", M - w[a])
        if pairs:
            notes.append("(12c) emitted per ordered pair with h fixed to 1")

    return MilpModel(
        variant=variant,
        instance=instance,
        variables=tuple(variables),
        objective=objective,
        rows=tuple(rows),
        arcs=arcs,
        big_m=M,
        allow_idle_robots=allow_idle_robots,
        digest=instance.digest(),
        diagnostics=tuple(diagnostics),
        notes=tuple(notes),
    )


def build_mp_cua(instance: Instance, allow_idle_robots: bool = False,
                 prune_unreachable: bool = True) -> MilpModel:
    """Collision-unaware variant: minimize total travel time under windows."""
    return _build(instance, CUA, allow_idle_robots, prune_unreachable)


def build_mp_ca(instance: Instance, allow_idle_robots: bool = False,
                prune_unreachable: bool = True) -> MilpModel:
    """Collision-aware variant: adds pairwise non-overlap of service intervals."""
    return _build(instance, CA, allow_idle_robots, prune_unreachable)


def _fmt(x: float) -> str:
    return repr(float(x))


def export_lp(model: MilpModel) -> str:
    """Serialize to LP text (Minimize / Subject To / Bounds / Binaries / End).

    Output is deterministic for identical models: stable variable order and
    shortest round-trip float formatting.
    """
    lines = [f"\\ {model.variant} model, instance {model.digest}"]
    lines.append("Minimize")
    terms = [f"{_fmt(c)} {v}" for v, c in model.objective if c != 0.0]
    if not terms:
        terms = ["0 " + model.variables[0].name]
    cur = " obj:"
    for idx, t in enumerate(terms):
        piece = (" " if idx == 0 else " + ") + t
        if len(cur) + len(piece) > 240:
            lines.append(cur)
            cur = "   " + ("+ " if idx else "") + t
        else:
            cur += piece
    lines.append(cur)
    lines.append("Subject To")
    rel = {"<=": "<=", ">=": ">=", "=": "="}
    for row in model.rows:
        parts = []
        for v, c in row.coefs:
            if c == 0.0:
                continue
            sign = "+" if c >= 0 else "-"
            parts.append(f"{sign} {_fmt(abs(c))} {v}")
        if not parts:
            parts = ["+ 0 " + model.variables[0].name]
        body = " ".join(parts)
        if body.startswith("+ "):
            body = body[2:]
        lines.append(f" {row.name}: {body} {rel[row.relation]} {_fmt(row.rhs)}")
    lines.append("Bounds")
    for var in model.variables:
        if var.kind == "continuous":
            lines.append(f" {_fmt(var.lb)} <= {var.name} <= {_fmt(var.ub)}")
    lines.append("Binaries")
    cur = ""
    for var in model.variables:
        if var.kind != "binary":
            continue
        if len(cur) + len(var.name) + 1 > 240:
            lines.append(" " + cur.strip())
            cur = ""
        cur += var.name + " "
    if cur.strip():
        lines.append(" " + cur.strip())
    lines.append("End")
    return "\n".join(lines) + "\n"
