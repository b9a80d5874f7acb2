from .metrics import (
    Circle,
    Metrics,
    brute_force_enclosing_circle,
    compute_metrics,
    compute_tech_tree,
    compute_unique_items_curve,
    coverage_circle,
    read_events,
    smallest_enclosing_circle,
    terrains_visited,
    write_metrics_csv,
)
from .runner import AGENTS, RunOptions, RunRecorder, build_gateway, build_loop, run_agent
from .zero_shot import ZeroShotResult, run_zero_shot

__all__ = [
    "Circle",
    "Metrics",
    "brute_force_enclosing_circle",
    "compute_metrics",
    "compute_tech_tree",
    "compute_unique_items_curve",
    "coverage_circle",
    "read_events",
    "smallest_enclosing_circle",
    "terrains_visited",
    "write_metrics_csv",
    "AGENTS",
    "RunOptions",
    "RunRecorder",
    "build_gateway",
    "build_loop",
    "run_agent",
    "ZeroShotResult",
    "run_zero_shot",
]
