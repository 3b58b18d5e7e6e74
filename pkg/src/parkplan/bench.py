"""Benchmark harness: KPI reports, single scenario runs, and paired sweeps.

A sweep runs both engines back-to-back per slot on an identical world, so
each CSV row pair shares one map hash and differs only in engine columns.
Exit codes: 0 success, 2 unusable config or arguments, 3 planner gave up.
"""

from __future__ import annotations

import csv
import json
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

from .config import ConfigError, ScenarioConfig, load_config
from .search import Engine, PlanResult, PlanStatus, bidirectional_plan
from .vehicle import Direction
from .world import build_parking_layout

CSV_COLUMNS = ("slot_id", "engine", "status", "expanded_states", "iterations",
               "execution_time_s", "path_length_m", "reverse_path_length_m",
               "direction_changes", "map_hash")

_IMPROVEMENT_KPIS = ("expanded_states", "iterations", "execution_time_s",
                     "path_length_m", "reverse_path_length_m",
                     "direction_changes")


@dataclass(frozen=True)
class KpiReport:
    expanded_states: int
    execution_time: float
    iterations: int
    path_length: float
    reverse_path_length: float
    direction_changes: int
    status: PlanStatus

    def __post_init__(self):
        if min(self.expanded_states, self.iterations,
               self.direction_changes) < 0:
            raise ValueError("counts must be non-negative")
        if self.reverse_path_length > self.path_length + 1e-9:
            raise ValueError("reverse length cannot exceed total length")


def compute_kpis(result: PlanResult) -> KpiReport:
    """Pure KPI extraction; execution time is copied, never remeasured."""
    stats = result.stats
    if result.status is not PlanStatus.FOUND:
        return KpiReport(expanded_states=stats.expanded_states,
                         execution_time=stats.wall_time_s,
                         iterations=stats.iterations,
                         path_length=0.0, reverse_path_length=0.0,
                         direction_changes=0, status=result.status)
    total = 0.0
    reverse = 0.0
    changes = 0
    prev_pose, prev_dir = result.poses[0]
    for pose, direction in result.poses[1:]:
        step = math.hypot(pose.x - prev_pose.x, pose.y - prev_pose.y)
        total += step
        if direction is Direction.REVERSE:
            reverse += step
        if direction is not prev_dir:
            changes += 1
        prev_pose, prev_dir = pose, direction
    return KpiReport(expanded_states=stats.expanded_states,
                     execution_time=stats.wall_time_s,
                     iterations=stats.iterations,
                     path_length=total, reverse_path_length=reverse,
                     direction_changes=changes, status=result.status)


def kpi_row(slot_id, engine, report: KpiReport, map_hash) -> dict:
    return {"slot_id": str(slot_id),
            "engine": Engine(engine).value,
            "status": report.status.value,
            "expanded_states": str(report.expanded_states),
            "iterations": str(report.iterations),
            "execution_time_s": format(report.execution_time, ".6f"),
            "path_length_m": format(report.path_length, ".6f"),
            "reverse_path_length_m": format(report.reverse_path_length, ".6f"),
            "direction_changes": str(report.direction_changes),
            "map_hash": map_hash}


def write_csv(rows, path):
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=CSV_COLUMNS)
        writer.writeheader()
        writer.writerows(rows)


def _plan_slot(scenario: ScenarioConfig, layout, slot_id, engine,
               collect_expansions=False):
    """One planning run; collision-trapped goals become Infeasible reports."""
    goal = layout.goal_of(slot_id)
    try:
        result = bidirectional_plan(layout.entry, goal, layout.grid,
                                    scenario.vehicle, None, scenario.planner,
                                    engine,
                                    collect_expansions=collect_expansions)
    except ValueError:
        report = KpiReport(expanded_states=0, execution_time=0.0,
                           iterations=0, path_length=0.0,
                           reverse_path_length=0.0, direction_changes=0,
                           status=PlanStatus.INFEASIBLE)
        return None, report
    return result, compute_kpis(result)


def run_pair(scenario: ScenarioConfig, layout, slot_id):
    """Baseline then candidate on the identical world; two CSV rows."""
    rows = []
    for engine in (Engine.HYBRID_ASTAR, Engine.SMHA):
        _, report = _plan_slot(scenario, layout, slot_id, engine)
        rows.append(kpi_row(slot_id, engine, report, layout.grid.grid_hash))
    return rows


def _format_report_line(slot_id, engine, report: KpiReport) -> str:
    return ("slot {} {}: {} expanded={} iterations={} time={:.3f}s "
            "length={:.2f}m reverse={:.2f}m changes={}".format(
                slot_id, Engine(engine).value, report.status.value,
                report.expanded_states, report.iterations,
                report.execution_time, report.path_length,
                report.reverse_path_length, report.direction_changes))


def run_scenario(config_path, slot_id, engine, svg_path=None, csv_path=None,
                 out=None) -> int:
    """Plan one slot with one engine; returns the process exit code."""
    if out is None:
        out = sys.stdout
    try:
        scenario = load_config(config_path)
        layout = build_parking_layout(scenario.layout, scenario.vehicle)
    except (ConfigError, ValueError) as exc:
        print("config error: {}".format(exc), file=sys.stderr)
        return 2
    try:
        layout.goal_of(slot_id)
    except KeyError as exc:
        print("config error: {}".format(exc.args[0]), file=sys.stderr)
        return 2

    result, report = _plan_slot(scenario, layout, slot_id, engine,
                                collect_expansions=svg_path is not None)
    print(_format_report_line(slot_id, engine, report), file=out)
    row = kpi_row(slot_id, engine, report, layout.grid.grid_hash)
    try:
        if csv_path is not None:
            write_csv([row], csv_path)
        if svg_path is not None:
            from .render import render_svg
            render_svg(layout.grid, result, svg_path,
                       expansions=result.expansions if result else (),
                       goal=layout.goal_of(slot_id))
    except OSError as exc:
        print("artifact error: {}".format(exc), file=sys.stderr)
        return 2
    return 0 if report.status is PlanStatus.FOUND else 3


def _sweep_worker(args):
    scenario, slot_id = args
    layout = build_parking_layout(scenario.layout, scenario.vehicle)
    return run_pair(scenario, layout, slot_id)


def _mean_improvements(rows):
    """Per-KPI mean of 100*(baseline-candidate)/baseline over found pairs."""
    by_slot = {}
    for row in rows:
        by_slot.setdefault(row["slot_id"], {})[row["engine"]] = row
    sums = {kpi: [0.0, 0] for kpi in _IMPROVEMENT_KPIS}
    for pair in by_slot.values():
        base, cand = pair.get("hybrid"), pair.get("smha")
        if base is None or cand is None:
            continue
        if base["status"] != "Found" or cand["status"] != "Found":
            continue
        for kpi in _IMPROVEMENT_KPIS:
            b, c = float(base[kpi]), float(cand[kpi])
            if b == 0.0:
                continue
            sums[kpi][0] += 100.0 * (b - c) / b
            sums[kpi][1] += 1
    return {kpi: (total / n if n else 0.0)
            for kpi, (total, n) in sums.items()}


def summarize_sweep(rows) -> dict:
    engines = ("hybrid", "smha")
    found = {e: sum(1 for r in rows
                    if r["engine"] == e and r["status"] == "Found")
             for e in engines}
    ran = {e: sum(1 for r in rows if r["engine"] == e) for e in engines}
    return {"slots": ran["hybrid"],
            "success_rate": {e: (found[e] / ran[e] if ran[e] else 0.0)
                             for e in engines},
            "mean_improvement_pct": _mean_improvements(rows)}


def sweep_layout(scenario: ScenarioConfig, layout, out_dir=None, jobs=1,
                 out=None):
    """Back-to-back engine pairs for every slot; returns (summary, rows)."""
    if out is None:
        out = sys.stdout
    slot_ids = [sid for sid, _ in layout.slots]
    if jobs > 1 and slot_ids:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            pairs = list(pool.map(_sweep_worker,
                                  [(scenario, sid) for sid in slot_ids]))
    else:
        pairs = [run_pair(scenario, layout, sid) for sid in slot_ids]

    rows = [row for pair in pairs for row in pair]
    summary = summarize_sweep(rows)

    for row in rows:
        print(",".join(row[c] for c in CSV_COLUMNS), file=out)
    print("pairs found on both engines: {}".format(
        sum(1 for pair in pairs
            if all(r["status"] == "Found" for r in pair))), file=out)
    for kpi, pct in summary["mean_improvement_pct"].items():
        print("mean {} improvement: {:.1f}%".format(kpi, pct), file=out)

    if out_dir is not None:
        import os
        os.makedirs(out_dir, exist_ok=True)
        write_csv(rows, os.path.join(out_dir, "kpis.csv"))
        with open(os.path.join(out_dir, "summary.json"), "w") as fh:
            json.dump(summary, fh, indent=2, sort_keys=True)
            fh.write("\n")
        from .render import sweep_figure
        sweep_figure(rows, os.path.join(out_dir, "sweep.svg"))
    return summary, rows


def run_sweep(config_path, out_dir=None, jobs=1, out=None) -> int:
    """Sweep every slot of the configured layout; process exit code."""
    try:
        scenario = load_config(config_path)
        layout = build_parking_layout(scenario.layout, scenario.vehicle)
    except (ConfigError, ValueError) as exc:
        print("config error: {}".format(exc), file=sys.stderr)
        return 2
    try:
        sweep_layout(scenario, layout, out_dir=out_dir, jobs=jobs, out=out)
    except OSError as exc:
        print("artifact error: {}".format(exc), file=sys.stderr)
        return 2
    return 0
