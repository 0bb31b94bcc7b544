"""Multi-cell hexagonal layout, beam sectors, interfering-beam pairs and node placement.

Conventions used throughout:
  * positions are (x, y) in meters, angles in radians measured
    counterclockwise from the +x axis,
  * beam sector ``k`` of a cell covers azimuths ``[k*theta, (k+1)*theta)``
    around the cell's base station (half-open, so every azimuth belongs to
    exactly one sector),
  * the depot sits at the junction point shared by the cells.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import numpy as np
from shapely.geometry import Point, Polygon
from shapely.ops import unary_union

TWO_PI = 2.0 * math.pi

#: beamwidth from the simulation parameter table (12 sectors per cell)
DEFAULT_BEAMWIDTH = math.pi / 6.0


class LayoutError(ValueError):
    """Raised for inconsistent layout parameters."""


class SamplingError(RuntimeError):
    """Raised when rejection sampling cannot place the requested nodes."""


class BeamRef(NamedTuple):
    """One beam sector: ``cell`` id and sector ``index`` in [0, beams_per_cell)."""

    cell: int
    index: int


@dataclass(frozen=True)
class CellLayout:
    """Hexagonal cells with sectorized base stations at their centers."""

    cells: tuple[tuple[int, tuple[float, float]], ...]
    side_length: float
    beams_per_cell: int
    beamwidth: float
    depot: tuple[float, float]

    def __post_init__(self):
        if not math.isclose(self.beams_per_cell * self.beamwidth, TWO_PI,
                            rel_tol=1e-9):
            raise LayoutError(
                f"{self.beams_per_cell} beams of width {self.beamwidth:.6f} rad "
                f"do not tile the circle")
        centers = [c for _, c in self.cells]
        for i in range(len(centers)):
            for j in range(i + 1, len(centers)):
                if math.dist(centers[i], centers[j]) < 1e-9:
                    raise LayoutError("cell centers must be pairwise distinct")

    def center(self, cell: int) -> tuple[float, float]:
        for cid, c in self.cells:
            if cid == cell:
                return c
        raise KeyError(f"no cell {cell}")

    def cell_ids(self) -> list[int]:
        return [cid for cid, _ in self.cells]

    def hexagon(self, cell: int) -> Polygon:
        """Hexagon polygon of the cell (circumradius = side_length)."""
        cx, cy = self.center(cell)
        pts = [(cx + self.side_length * math.cos(math.radians(30 + 60 * k)),
                cy + self.side_length * math.sin(math.radians(30 + 60 * k)))
               for k in range(6)]
        return Polygon(pts)

    def coverage(self) -> Polygon:
        return unary_union([self.hexagon(c) for c in self.cell_ids()])

    def adjacent_cell_pairs(self) -> list[tuple[int, int]]:
        """Cell id pairs whose hexagons share an edge."""
        out = []
        ids = self.cell_ids()
        for a in range(len(ids)):
            for b in range(a + 1, len(ids)):
                d = math.dist(self.center(ids[a]), self.center(ids[b]))
                if math.isclose(d, math.sqrt(3.0) * self.side_length,
                                rel_tol=1e-9):
                    out.append((ids[a], ids[b]))
        return out


def build_layout(side_length: float, beams_per_cell: int,
                 beamwidth: float = DEFAULT_BEAMWIDTH,
                 n_cells: int = 3) -> CellLayout:
    """Three hexagon cells arranged around a common junction vertex.

    Base stations sit at the cell centers, the depot at the shared junction
    (the origin).  ``beams_per_cell * beamwidth`` must equal ``2*pi``; pass an
    explicit ``beamwidth`` to use a sector count other than 12.
    """
    if side_length <= 0:
        raise LayoutError("side_length must be positive")
    if beams_per_cell < 3:
        raise LayoutError("need at least 3 beams per cell")
    if not math.isclose(beams_per_cell * beamwidth, TWO_PI, rel_tol=1e-9):
        raise LayoutError(
            f"beams_per_cell={beams_per_cell} with beamwidth={beamwidth:.6f} rad "
            f"does not tile the circle; expected {TWO_PI / beamwidth:.3f} sectors")
    if n_cells not in (1, 3):
        raise LayoutError("supported layouts: 1 cell, or 3 cells around a junction")
    if n_cells == 1:
        cells = ((1, (0.0, float(side_length))),)
    else:
        cells = tuple(
            (i + 1, (side_length * math.cos(math.pi / 2 + i * TWO_PI / 3),
                     side_length * math.sin(math.pi / 2 + i * TWO_PI / 3)))
            for i in range(3))
    return CellLayout(cells=cells, side_length=float(side_length),
                      beams_per_cell=int(beams_per_cell),
                      beamwidth=float(beamwidth), depot=(0.0, 0.0))


def beam_of(point: Sequence[float], cell: int, layout: CellLayout) -> BeamRef:
    """Beam sector containing the azimuth from the cell's BS to ``point``."""
    cx, cy = layout.center(cell)
    dx, dy = point[0] - cx, point[1] - cy
    if dx == 0.0 and dy == 0.0:
        raise ValueError("point coincides with the base station")
    az = math.atan2(dy, dx) % TWO_PI
    idx = int(az // layout.beamwidth)
    if idx >= layout.beams_per_cell:  # az == 2*pi after rounding
        idx = 0
    return BeamRef(cell=cell, index=idx)


def _boresight(layout: CellLayout, beam: BeamRef) -> float:
    return (beam.index + 0.5) * layout.beamwidth


def _ang_dist(a: float, b: float) -> float:
    d = (a - b) % TWO_PI
    return min(d, TWO_PI - d)


def wedge_polygon(layout: CellLayout, beam: BeamRef, radius: float,
                  arc_points: int = 33) -> Polygon:
    """Main-lobe sector of ``beam`` truncated at ``radius``."""
    cx, cy = layout.center(beam.cell)
    a0 = beam.index * layout.beamwidth
    a1 = a0 + layout.beamwidth
    arc = [(cx + radius * math.cos(a), cy + radius * math.sin(a))
           for a in np.linspace(a0, a1, arc_points)]
    return Polygon([(cx, cy)] + arc)


def interfering_beam_pairs(layout: CellLayout,
                           range_limit: float | None = None
                           ) -> frozenset[tuple[BeamRef, BeamRef]]:
    """Mutually interfering beam pairs between adjacent cells.

    Two beams interfere when their boresights are opposed to within one
    beamwidth and their truncated main-lobe wedges overlap with positive
    area.  On the default 3-cell, 12-beam layout this yields 6 pairs, two
    per adjacent cell pair.
    """
    if range_limit is None:
        range_limit = layout.side_length
    if len(layout.cells) < 2 or range_limit <= 0:
        return frozenset()
    area_eps = 1e-6 * range_limit * range_limit
    pairs = set()
    for ca, cb in layout.adjacent_cell_pairs():
        for ia in range(layout.beams_per_cell):
            ba = BeamRef(ca, ia)
            wa = None
            for ib in range(layout.beams_per_cell):
                bb = BeamRef(cb, ib)
                opposed = _ang_dist(_boresight(layout, ba),
                                    _boresight(layout, bb) + math.pi)
                if opposed > layout.beamwidth + 1e-9:
                    continue
                if wa is None:
                    wa = wedge_polygon(layout, ba, range_limit)
                wb = wedge_polygon(layout, bb, range_limit)
                if wa.intersection(wb).area > area_eps:
                    pairs.add(tuple(sorted((ba, bb))))
    return frozenset(pairs)


def collision_region(layout: CellLayout,
                     pairs: frozenset[tuple[BeamRef, BeamRef]] | None = None,
                     range_limit: float | None = None):
    """Union of the pairwise wedge intersections (the strong-interference area)."""
    if range_limit is None:
        range_limit = layout.side_length
    if pairs is None:
        pairs = interfering_beam_pairs(layout, range_limit)
    if not pairs:
        return Polygon()
    parts = [wedge_polygon(layout, a, range_limit)
             .intersection(wedge_polygon(layout, b, range_limit))
             for a, b in sorted(pairs)]
    return unary_union(parts)


def serving_cell(point: Sequence[float], layout: CellLayout) -> int:
    """Nearest base station; ties broken by lowest cell id."""
    best = None
    for cid, (cx, cy) in sorted(layout.cells):
        d = math.hypot(point[0] - cx, point[1] - cy)
        if best is None or d < best[0] - 1e-12:
            best = (d, cid)
    return best[1]


@dataclass(frozen=True)
class Node:
    id: int
    x: float
    y: float
    e: float
    l: float
    w: float


@dataclass(frozen=True)
class NodeSet:
    """Visit nodes 1..v plus the depot window; the depot occupies ids 0 and v+1."""

    nodes: tuple[Node, ...]
    depot_window: tuple[float, float]

    def __post_init__(self):
        if [n.id for n in self.nodes] != list(range(1, len(self.nodes) + 1)):
            raise ValueError("node ids must be 1..v in order")
        e0, l0 = self.depot_window
        for n in self.nodes:
            if n.e > n.l:
                raise ValueError(f"node {n.id}: empty window [{n.e}, {n.l}]")
            if n.l > l0:
                raise ValueError(f"node {n.id}: window end beyond depot horizon")

    def __len__(self):
        return len(self.nodes)

    def positions(self) -> np.ndarray:
        return np.array([(n.x, n.y) for n in self.nodes])


@dataclass(frozen=True)
class CollisionMatrix:
    """Symmetric 0/1 relation over visit-node pairs (sparse pair list)."""

    n_nodes: int
    pairs: frozenset[tuple[int, int]] = field(default_factory=frozenset)

    def __post_init__(self):
        for i, j in self.pairs:
            if not (1 <= i < j <= self.n_nodes):
                raise ValueError(f"bad collision pair ({i}, {j})")

    def h(self, i: int, j: int) -> int:
        if i == j:
            return 0
        return 1 if (min(i, j), max(i, j)) in self.pairs else 0

    def collision_nodes(self) -> set[int]:
        return {i for p in self.pairs for i in p}

    def to_matrix(self) -> np.ndarray:
        m = np.zeros((self.n_nodes + 1, self.n_nodes + 1), dtype=np.int8)
        for i, j in self.pairs:
            m[i, j] = m[j, i] = 1
        return m


def serving_beams(nodes: NodeSet, layout: CellLayout) -> dict[int, BeamRef]:
    """Serving beam per node: nearest BS, then sector membership."""
    out = {}
    for n in nodes.nodes:
        cell = serving_cell((n.x, n.y), layout)
        out[n.id] = beam_of((n.x, n.y), cell, layout)
    return out


def collision_matrix(nodes: NodeSet, layout: CellLayout,
                     pairs: frozenset[tuple[BeamRef, BeamRef]]
                     ) -> CollisionMatrix:
    """h_ij = 1 iff the serving beams of i and j form an interfering pair."""
    serving = serving_beams(nodes, layout)
    hp = set()
    ids = sorted(serving)
    for a in range(len(ids)):
        for b in range(a + 1, len(ids)):
            i, j = ids[a], ids[b]
            key = tuple(sorted((serving[i], serving[j])))
            if key in pairs:
                hp.add((i, j))
    return CollisionMatrix(n_nodes=len(nodes), pairs=frozenset(hp))


def sample_nodes(scenario: str, count: int, layout: CellLayout,
                 rng_seed, min_separation: float = 1.0,
                 horizon: float = 200.0, service_time: float = 2.0,
                 window_mode: str = "full", window_width: float = 100.0,
                 max_attempts_per_node: int = 10_000) -> NodeSet:
    """Place ``count`` visit nodes for scenario A or B.

    Scenario A draws uniformly over the collision region, scenario B over
    the union of the hexagon cells.  Windows default to the full horizon
    ``[0, horizon]``; ``window_mode="random"`` draws e_i ~ U[0, horizon/2]
    and sets l_i = min(e_i + window_width, horizon).
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    scenario = scenario.upper()
    if scenario == "A":
        region = collision_region(layout)
    elif scenario == "B":
        region = layout.coverage()
    else:
        raise ValueError(f"unknown scenario {scenario!r}")
    if region.is_empty or region.area <= 0:
        raise SamplingError(f"scenario {scenario} region is degenerate")
    rng = rng_seed if isinstance(rng_seed, np.random.Generator) \
        else np.random.default_rng(rng_seed)
    minx, miny, maxx, maxy = region.bounds
    placed: list[tuple[float, float]] = []
    attempts = 0
    budget = max_attempts_per_node * count
    while len(placed) < count:
        if attempts >= budget:
            raise SamplingError(
                f"could not place {count} nodes with min separation "
                f"{min_separation} m in scenario {scenario} after {budget} draws")
        attempts += 1
        x = rng.uniform(minx, maxx)
        y = rng.uniform(miny, maxy)
        if not region.contains(Point(x, y)):
            continue
        if any(math.hypot(x - px, y - py) < min_separation for px, py in placed):
            continue
        placed.append((x, y))
    nodes = []
    for i, (x, y) in enumerate(placed, start=1):
        if window_mode == "full":
            e_i, l_i = 0.0, float(horizon)
        elif window_mode == "random":
            e_i = float(rng.uniform(0.0, 0.5 * horizon))
            l_i = float(min(e_i + window_width, horizon))
        else:
            raise ValueError(f"unknown window_mode {window_mode!r}")
        nodes.append(Node(id=i, x=float(x), y=float(y), e=e_i, l=l_i,
                          w=float(service_time)))
    return NodeSet(nodes=tuple(nodes), depot_window=(0.0, float(horizon)))


def travel_time_matrix(nodes: NodeSet, velocity: float,
                       depot: tuple[float, float] = (0.0, 0.0)) -> np.ndarray:
    """(v+2)x(v+2) matrix of travel times; rows 0 and v+1 are the depot copies."""
    if velocity <= 0:
        raise ValueError("velocity must be positive")
    v = len(nodes)
    pos = np.vstack([[depot], nodes.positions(), [depot]])
    d = np.hypot(pos[:, None, 0] - pos[None, :, 0],
                 pos[:, None, 1] - pos[None, :, 1])
    np.fill_diagonal(d, 0.0)
    d[0, v + 1] = d[v + 1, 0] = 0.0
    return d / float(velocity)
