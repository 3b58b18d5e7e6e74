"""Kinodynamic parking planners: single-queue and multi-queue engines."""

from .search import (
    Engine,
    GridBinning,
    PlanResult,
    PlanStatus,
    PlannerConfig,
    SearchStats,
    WorldContext,
    adaptive_arc_length,
    bidirectional_plan,
    combine_paths,
    edge_cost,
    hybrid_astar,
    smha_star,
)
from .vehicle import Pose, VehicleParams
from .world import LayoutParams, OccupancyGrid, Orientation, build_parking_layout

__version__ = "0.1.0"

__all__ = [
    "Engine",
    "GridBinning",
    "LayoutParams",
    "OccupancyGrid",
    "Orientation",
    "PlanResult",
    "PlanStatus",
    "PlannerConfig",
    "Pose",
    "SearchStats",
    "VehicleParams",
    "WorldContext",
    "adaptive_arc_length",
    "bidirectional_plan",
    "build_parking_layout",
    "combine_paths",
    "edge_cost",
    "hybrid_astar",
    "smha_star",
    "__version__",
]
