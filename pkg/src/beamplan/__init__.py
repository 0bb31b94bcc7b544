"""Interference-aware path planning for mobile robots in mmWave multi-cell networks."""

__version__ = "0.1.0"

from .geometry import (BeamRef, CellLayout, CollisionMatrix, Node, NodeSet,
                       beam_of, build_layout, collision_matrix,
                       collision_region, interfering_beam_pairs, sample_nodes,
                       travel_time_matrix)
from .instance import Instance, generate_instance
from .model import (BigM, MilpModel, big_m_value, build_mp_ca, build_mp_cua,
                    export_lp)
from .radio import (LinkSample, RadioParams, los_probability, main_lobe_gain,
                    path_loss, rate, sample_link, sinr)
from .simulation import (ExperimentConfig, ExperimentResults,
                         ScheduleEvaluation, evaluate_schedule, export_results,
                         run_monte_carlo)
from .solver import (Solution, SolveLimits, ValidationReport, brute_force,
                     solve, validate)

__all__ = [
    "BeamRef", "CellLayout", "CollisionMatrix", "Node", "NodeSet",
    "beam_of", "build_layout", "collision_matrix", "collision_region",
    "interfering_beam_pairs", "sample_nodes", "travel_time_matrix",
    "Instance", "generate_instance",
    "BigM", "MilpModel", "big_m_value", "build_mp_ca", "build_mp_cua",
    "export_lp",
    "LinkSample", "RadioParams", "los_probability", "main_lobe_gain",
    "path_loss", "rate", "sample_link", "sinr",
    "ExperimentConfig", "ExperimentResults", "ScheduleEvaluation",
    "evaluate_schedule", "export_results", "run_monte_carlo",
    "Solution", "SolveLimits", "ValidationReport", "brute_force", "solve",
    "validate",
]
