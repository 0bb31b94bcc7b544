"""Problem instance: nodes, fleet, travel times, collision pairs, JSON round-trip."""
from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .geometry import (CellLayout, CollisionMatrix, Node, NodeSet,
                       build_layout, collision_matrix, interfering_beam_pairs,
                       sample_nodes, serving_beams, travel_time_matrix)

SCHEMA_VERSION = 1


@dataclass(frozen=True)
class Instance:
    """Everything the planners need for one problem."""

    layout: CellLayout
    nodes: NodeSet
    velocity: float
    n_robots: int
    collisions: CollisionMatrix
    travel: np.ndarray = field(repr=False, compare=False, default=None)

    def __post_init__(self):
        if self.velocity <= 0:
            raise ValueError("velocity must be positive")
        if self.n_robots < 1:
            raise ValueError("need at least one robot")
        if self.collisions.n_nodes != len(self.nodes):
            raise ValueError("collision matrix size does not match node count")
        if self.travel is None:
            object.__setattr__(
                self, "travel",
                travel_time_matrix(self.nodes, self.velocity,
                                   depot=self.layout.depot))

    @property
    def n_nodes(self) -> int:
        return len(self.nodes)

    @property
    def sink(self) -> int:
        return self.n_nodes + 1

    @property
    def depot_window(self) -> tuple[float, float]:
        return self.nodes.depot_window

    def window(self, i: int) -> tuple[float, float]:
        if i == 0 or i == self.sink:
            return self.nodes.depot_window
        n = self.nodes.nodes[i - 1]
        return (n.e, n.l)

    def service(self, i: int) -> float:
        if i == 0 or i == self.sink:
            return 0.0
        return self.nodes.nodes[i - 1].w

    def service_array(self) -> np.ndarray:
        w = np.zeros(self.n_nodes + 2)
        for n in self.nodes.nodes:
            w[n.id] = n.w
        return w

    def window_arrays(self) -> tuple[np.ndarray, np.ndarray]:
        e = np.zeros(self.n_nodes + 2)
        l = np.zeros(self.n_nodes + 2)
        e[0], l[0] = self.nodes.depot_window
        e[self.sink], l[self.sink] = self.nodes.depot_window
        for n in self.nodes.nodes:
            e[n.id], l[n.id] = n.e, n.l
        return e, l

    def serving_beams(self):
        return serving_beams(self.nodes, self.layout)

    def to_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "layout": {
                "side_length": self.layout.side_length,
                "beams_per_cell": self.layout.beams_per_cell,
                "beamwidth": self.layout.beamwidth,
                "cells": [[cid, list(c)] for cid, c in self.layout.cells],
                "depot": list(self.layout.depot),
            },
            "nodes": [[n.id, n.x, n.y, n.e, n.l, n.w]
                      for n in self.nodes.nodes],
            "depot_window": list(self.nodes.depot_window),
            "velocity": self.velocity,
            "robots": self.n_robots,
            "collision_pairs": sorted(map(list, self.collisions.pairs)),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_dict(cls, d: dict) -> "Instance":
        if d.get("schema_version") != SCHEMA_VERSION:
            raise ValueError(
                f"unsupported instance schema: {d.get('schema_version')!r}")
        lay = d["layout"]
        layout = CellLayout(
            cells=tuple((int(cid), (float(c[0]), float(c[1])))
                        for cid, c in lay["cells"]),
            side_length=float(lay["side_length"]),
            beams_per_cell=int(lay["beams_per_cell"]),
            beamwidth=float(lay["beamwidth"]),
            depot=tuple(lay["depot"]),
        )
        nodes = NodeSet(
            nodes=tuple(Node(int(i), float(x), float(y), float(e), float(l),
                             float(w))
                        for i, x, y, e, l, w in d["nodes"]),
            depot_window=tuple(float(t) for t in d["depot_window"]),
        )
        coll = CollisionMatrix(
            n_nodes=len(nodes),
            pairs=frozenset((int(i), int(j)) for i, j in d["collision_pairs"]))
        return cls(layout=layout, nodes=nodes, velocity=float(d["velocity"]),
                   n_robots=int(d["robots"]), collisions=coll)

    @classmethod
    def from_json(cls, text: str) -> "Instance":
        return cls.from_dict(json.loads(text))

    def digest(self) -> str:
        payload = json.dumps(self.to_dict(), sort_keys=True,
                             separators=(",", ":"))
        return hashlib.sha256(payload.encode()).hexdigest()[:12]


def generate_instance(scenario: str, n_nodes: int, n_robots: int, seed,
                      side_length: float = 50.0, beams_per_cell: int = 12,
                      velocity: float = 5.0, horizon: float = 200.0,
                      service_time: float = 2.0, min_separation: float = 1.0,
                      window_mode: str = "full",
                      window_width: float = 100.0) -> Instance:
    """Sample a scenario A/B instance on the default cloverleaf layout."""
    layout = build_layout(side_length, beams_per_cell,
                          beamwidth=2.0 * math.pi / beams_per_cell)
    nodes = sample_nodes(scenario, n_nodes, layout, seed,
                         min_separation=min_separation, horizon=horizon,
                         service_time=service_time, window_mode=window_mode,
                         window_width=window_width)
    pairs = interfering_beam_pairs(layout)
    coll = collision_matrix(nodes, layout, pairs)
    return Instance(layout=layout, nodes=nodes, velocity=velocity,
                    n_robots=n_robots, collisions=coll)
