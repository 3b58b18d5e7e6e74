"""Scenario configuration files.

A scenario file is YAML with four optional sections (layout, grid, vehicle,
planner) plus an entry pose. Every key has a default, so the empty file is a
valid scenario; unknown keys are rejected rather than silently ignored.
"""

from __future__ import annotations

from dataclasses import dataclass

import yaml

from .search import PlannerConfig
from .vehicle import Pose, VehicleParams
from .world import LayoutParams, Orientation


class ConfigError(ValueError):
    """Raised when a scenario file cannot be parsed or validated."""


_LAYOUT_KEYS = {"orientation", "slots_per_row", "slot_length_m",
                "slot_width_m", "aisle_width_m"}
_GRID_KEYS = {"resolution_m"}
_VEHICLE_KEYS = {"wheelbase_m", "length_m", "width_m", "rear_overhang_m",
                 "alpha_max_rad", "n_disks"}
_PLANNER_KEYS = {"w1", "w2", "reverse_penalty", "switch_penalty_m",
                 "arc_min_m", "arc_max_m", "d_fw1_m", "d_fw2_m",
                 "goal_xy_tol_m", "goal_theta_tol_rad", "max_iterations",
                 "theta_bins"}
_ENTRY_KEYS = {"x", "y", "theta"}


@dataclass(frozen=True)
class ScenarioConfig:
    layout: LayoutParams
    vehicle: VehicleParams
    planner: PlannerConfig


def _section(doc, name, allowed):
    section = doc.get(name)
    if section is None:
        return {}
    if not isinstance(section, dict):
        raise ConfigError("section '{}' must be a mapping".format(name))
    unknown = set(section) - allowed
    if unknown:
        raise ConfigError("unknown key(s) in '{}': {}".format(
            name, ", ".join(sorted(unknown))))
    return section


def parse_config(doc) -> ScenarioConfig:
    """Build a ScenarioConfig from an already-parsed mapping."""
    if doc is None:
        doc = {}
    if not isinstance(doc, dict):
        raise ConfigError("scenario file must contain a mapping")
    unknown = set(doc) - {"layout", "grid", "vehicle", "planner", "entry"}
    if unknown:
        raise ConfigError("unknown top-level key(s): {}".format(
            ", ".join(sorted(unknown))))

    layout = _section(doc, "layout", _LAYOUT_KEYS)
    grid = _section(doc, "grid", _GRID_KEYS)
    vehicle = _section(doc, "vehicle", _VEHICLE_KEYS)
    planner = _section(doc, "planner", _PLANNER_KEYS)
    entry = _section(doc, "entry", _ENTRY_KEYS)

    try:
        orientation = Orientation(layout.get("orientation", "parallel"))
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc

    entry_pose = Pose(float(entry.get("x", 0.0)),
                      float(entry.get("y", 10.0)),
                      float(entry.get("theta", 0.0)))

    try:
        layout_params = LayoutParams(
            orientation=orientation,
            slots_per_row=int(layout.get("slots_per_row", 14)),
            slot_length=float(layout.get("slot_length_m", 7.5)),
            slot_width=float(layout.get("slot_width_m", 3.25)),
            aisle_width=float(layout.get("aisle_width_m", 6.0)),
            resolution=float(grid.get("resolution_m", 0.25)),
            entry=entry_pose)
        vehicle_params = VehicleParams(
            wheelbase=float(vehicle.get("wheelbase_m", 2.7)),
            body_length=float(vehicle.get("length_m", 4.4)),
            body_width=float(vehicle.get("width_m", 1.8)),
            rear_overhang=float(vehicle.get("rear_overhang_m", 0.8)),
            alpha_max=float(vehicle.get("alpha_max_rad", 0.6)),
            n_disks=int(vehicle.get("n_disks", 5)))
        planner_config = PlannerConfig(
            weight_w1=float(planner.get("w1", 2.0)),
            weight_w2=float(planner.get("w2", 2.0)),
            reverse_penalty=float(planner.get("reverse_penalty", 2.0)),
            direction_switch_penalty=float(planner.get("switch_penalty_m", 2.0)),
            arc_length_min=float(planner.get("arc_min_m", 0.6)),
            arc_length_max=float(planner.get("arc_max_m", 3.0)),
            d_fw1=float(planner.get("d_fw1_m", 5.0)),
            d_fw2=float(planner.get("d_fw2_m", 1.0)),
            goal_xy_tol=float(planner.get("goal_xy_tol_m", 0.3)),
            goal_theta_tol=float(planner.get("goal_theta_tol_rad", 0.15)),
            max_iterations=int(planner.get("max_iterations", 200000)),
            theta_bins=int(planner.get("theta_bins", 72)))
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc

    return ScenarioConfig(layout=layout_params, vehicle=vehicle_params,
                          planner=planner_config)


def load_config(path) -> ScenarioConfig:
    """Parse and validate the scenario file at path."""
    try:
        with open(path) as fh:
            doc = yaml.safe_load(fh)
    except OSError as exc:
        raise ConfigError("cannot read config: {}".format(exc)) from exc
    except yaml.YAMLError as exc:
        raise ConfigError("malformed config: {}".format(exc)) from exc
    return parse_config(doc)
