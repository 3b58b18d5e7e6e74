"""Acceptance suite: eight go/no-go checks, one report line per criterion.

Each criterion is a single test that prints "[criterion N] PASS/FAIL: detail"
before asserting, so a verbose run shows one line per criterion either way.
Later criteria reuse plans produced by earlier ones through a module registry.
"""

import csv
import io
import math
import random
import time
from pathlib import Path

import numpy as np

from parkplan.bench import CSV_COLUMNS, _plan_slot, kpi_row, summarize_sweep
from parkplan.config import load_config
from parkplan.heuristics import HeuristicSet, build_costmap, h_nonholonomic
from parkplan.reeds_shepp import rs_shortest_path, rs_length, segment_action
from parkplan.search import (Engine, PlannerConfig, PlanStatus,
                             bidirectional_plan, edge_cost, hybrid_astar,
                             smha_star)
from parkplan.vehicle import (ACTIONS, Pose, VehicleParams, arc_step,
                              footprint_disks, min_turning_radius,
                              normalize_angle)
from parkplan.world import OccupancyGrid, build_parking_layout

from pathcheck import check_plan_contract, replay_cost
from rs_oracle import rs_length_brute_force, target_in_start_frame
from test_heuristics import bellman_ford_costmap, blocked_mask, tiny_footprint

CONFIG_PATH = Path(__file__).resolve().parents[1] / "configs" / "parallel.yaml"

# Found plans registered by earlier criteria; criterion 7 replays them all.
REGISTRY = []

# slot-27 KPI rows from criterion 4, reused as run one of criterion 8.
SLOT27_ROWS = []


def _report(criterion, ok, detail):
    line = "[criterion {}] {}: {}".format(criterion,
                                          "PASS" if ok else "FAIL", detail)
    print(line)
    assert ok, line


def _register(label, result, grid, params, config, goal):
    if result is not None and result.found:
        REGISTRY.append((label, result, grid, params, config, goal))


# ------------------------------------------------------------ criterion 1


def test_criterion_1_shortest_curve_correctness():
    t0 = time.monotonic()
    rng = random.Random(101)
    pairs = []
    for _ in range(1000):
        pairs.append((Pose(rng.uniform(-10, 10), rng.uniform(-10, 10),
                           rng.uniform(-math.pi, math.pi)),
                      Pose(rng.uniform(-10, 10), rng.uniform(-10, 10),
                           rng.uniform(-math.pi, math.pi))))

    worst_replay = 0.0
    for start, goal in pairs:
        path = rs_shortest_path(start, goal, 1.0)
        pose = start
        for seg in path.segments:
            pose = arc_step(pose, segment_action(seg),
                            abs(seg.signed_length), 1.0)
        err = math.hypot(pose.x - goal.x, pose.y - goal.y) + \
            abs(normalize_angle(pose.theta - goal.theta))
        worst_replay = max(worst_replay, err)

    worst_gap = 0.0
    for start, goal in pairs[:50]:
        got = rs_length(start, goal, 1.0)
        want = rs_length_brute_force(*target_in_start_frame(
            (start.x, start.y, start.theta), (goal.x, goal.y, goal.theta),
            1.0))
        worst_gap = max(worst_gap, abs(got - want))

    elapsed = time.monotonic() - t0
    ok = worst_replay < 1e-6 and worst_gap < 1e-3 and elapsed < 60.0
    _report(1, ok,
            "1000 replays (worst endpoint error {:.2e}), 50 brute-force "
            "lengths (worst gap {:.2e}), {:.1f}s".format(
                worst_replay, worst_gap, elapsed))


# ------------------------------------------------------------ criterion 2


def test_criterion_2_heuristic_consistency_and_costmap():
    rng = random.Random(202)
    params = VehicleParams()
    radius = min_turning_radius(params)
    config = PlannerConfig()
    violations = 0
    for _ in range(10000):
        pose = Pose(rng.uniform(0, 30), rng.uniform(0, 30),
                    rng.uniform(-math.pi, math.pi))
        goal = Pose(rng.uniform(0, 30), rng.uniform(0, 30),
                    rng.uniform(-math.pi, math.pi))
        action = ACTIONS[rng.randrange(len(ACTIONS))]
        arc = rng.uniform(config.arc_length_min, config.arc_length_max)
        child = arc_step(pose, action, arc, radius)
        cost = edge_cost(action, arc, None, config)
        if h_nonholonomic(pose, goal, radius) > \
                cost + h_nonholonomic(child, goal, radius) + 1e-9:
            violations += 1

    fp = tiny_footprint()
    mismatches = 0
    grids = 0
    while grids < 100:
        h = rng.randint(3, 16)
        w = rng.randint(3, 16)
        res = rng.choice([0.25, 0.5, 1.0])
        cells = np.zeros((h, w), dtype=bool)
        for _ in range(rng.randint(0, 10)):
            cells[rng.randrange(h), rng.randrange(w)] = True
        free = [(ix, iy) for iy in range(h) for ix in range(w)
                if not cells[iy, ix]]
        if not free:
            continue
        grids += 1
        gx, gy = free[rng.randrange(len(free))]
        grid = OccupancyGrid(cells, res)
        goal = Pose((gx + 0.5) * res, (gy + 0.5) * res, 0.0)
        got = build_costmap(grid, goal, fp).values
        want = bellman_ford_costmap(blocked_mask(grid, fp), (gx, gy), res)
        if not np.array_equal(got, want):
            mismatches += 1

    ok = violations == 0 and mismatches == 0
    _report(2, ok,
            "{} consistency violations over 10000 edges, {} costmap "
            "mismatches over 100 grids".format(violations, mismatches))


# ------------------------------------------------------------ criterion 3


_BOUND_BLOCKS = {
    "open": None,
    "center": (10, 16, 12, 16),
    "south": (16, 20, 8, 14),
    "bar": (8, 20, 13, 15),
    "corner": (6, 10, 6, 12),
}
_BOUND_POSES = {
    "sw": Pose(3, 3, 0.0), "ne": Pose(10, 10, 1.5), "w": Pose(3, 10, -0.7),
    "se": Pose(10, 3, 2.0), "s": Pose(7, 3, 0.0), "midw": Pose(3, 7, 0.0),
    "e": Pose(11, 7, 3.0), "ese": Pose(9, 5, -2.2), "c": Pose(5, 5, 0.8),
}
_BOUND_CASES = (
    ("open", "sw", "ne"), ("open", "sw", "s"), ("open", "sw", "midw"),
    ("open", "sw", "e"), ("center", "sw", "ne"), ("center", "sw", "w"),
    ("center", "sw", "se"), ("center", "sw", "s"), ("south", "sw", "s"),
    ("south", "sw", "e"), ("south", "sw", "c"), ("south", "sw", "ese"),
    ("bar", "sw", "ne"), ("bar", "sw", "w"), ("bar", "sw", "se"),
    ("bar", "sw", "midw"), ("corner", "ne", "se"), ("corner", "ne", "s"),
    ("corner", "ne", "midw"), ("corner", "ne", "e"),
)


def test_criterion_3_suboptimality_bound():
    small = VehicleParams(wheelbase=2.0, body_length=3.0, body_width=1.6,
                          rear_overhang=0.5, n_disks=3)
    config = PlannerConfig(analytic_expansion=False, theta_bins=24,
                           arc_length_min=1.2, arc_length_max=1.2,
                           max_iterations=500000)
    zero = lambda pose: 0.0
    oracle_set = HeuristicSet(anchor=zero, inadmissibles=(zero,))
    bound = config.weight_w1 * config.weight_w2

    worst_ratio = 0.0
    worst_audit = 0
    solved = 0
    for block_name, start_key, goal_key in _BOUND_CASES:
        cells = np.zeros((28, 28), dtype=bool)
        block = _BOUND_BLOCKS[block_name]
        if block is not None:
            y0, y1, x0, x1 = block
            cells[y0:y1, x0:x1] = True
        grid = OccupancyGrid(cells, 0.5)
        start = _BOUND_POSES[start_key]
        goal = _BOUND_POSES[goal_key]
        oracle = hybrid_astar(start, goal, grid, small, config,
                              heuristics=oracle_set)
        sink = {}
        candidate = smha_star(start, goal, grid, small, None, config,
                              _debug_sink=sink)
        if not (oracle.found and candidate.found):
            continue
        solved += 1
        optimum = replay_cost(oracle.actions, config)
        cost = replay_cost(candidate.actions, config)
        assert cost <= bound * optimum + 1e-9, \
            "{} {}->{}: {} > {} * {}".format(block_name, start_key, goal_key,
                                             cost, bound, optimum)
        worst_ratio = max(worst_ratio, cost / optimum)
        worst_audit = max(worst_audit, max(sink["expansion_counts"].values()))
        label = "bound {} {}->{}".format(block_name, start_key, goal_key)
        _register(label, candidate, grid, small, config, goal)
        _register(label + " oracle", oracle, grid, small, config, goal)

    ok = solved == 20 and worst_ratio <= bound and worst_audit <= 2
    _report(3, ok,
            "{}/20 scenarios solved, worst cost ratio {:.2f} (bound {:.0f}), "
            "max expansions per bin {}".format(solved, worst_ratio, bound,
                                               worst_audit))


# ------------------------------------------------------------ criterion 4


def _slot27_pair():
    scenario = load_config(str(CONFIG_PATH))
    layout = build_parking_layout(scenario.layout, scenario.vehicle)
    entries = []
    for engine in (Engine.HYBRID_ASTAR, Engine.SMHA):
        result, report = _plan_slot(scenario, layout, 27, engine)
        row = kpi_row(27, engine, report, layout.grid.grid_hash)
        entries.append((engine, result, report, row))
    return scenario, layout, entries


def test_criterion_4_far_slot_back_to_back():
    t0 = time.monotonic()
    scenario, layout, entries = _slot27_pair()
    elapsed = time.monotonic() - t0
    (_, res_h, rep_h, row_h), (_, res_s, rep_s, row_s) = entries
    SLOT27_ROWS.append([row_h, row_s])

    goal = layout.goal_of(27)
    for label, result in (("hybrid slot 27", res_h), ("smha slot 27", res_s)):
        _register(label, result, layout.grid, scenario.vehicle,
                  scenario.planner, goal)

    both_found = rep_h.status is PlanStatus.FOUND and \
        rep_s.status is PlanStatus.FOUND
    fewer = rep_s.expanded_states < rep_h.expanded_states
    faster = rep_s.execution_time < rep_h.execution_time
    changes_ok = rep_h.direction_changes <= 6 and rep_s.direction_changes <= 6
    length_gap = abs(rep_h.path_length - rep_s.path_length) / \
        max(rep_h.path_length, rep_s.path_length, 1e-9)
    contracts_ok = both_found
    contract_note = ""
    if both_found:
        try:
            for result in (res_h, res_s):
                check_plan_contract(result, layout.grid, scenario.vehicle,
                                    scenario.planner, goal=goal)
        except AssertionError as exc:
            contracts_ok = False
            contract_note = "; contract: {}".format(exc)

    ok = (both_found and fewer and faster and changes_ok
          and length_gap <= 0.15 and contracts_ok and elapsed < 120.0)
    _report(4, ok,
            "expanded {} vs {}, time {:.2f}s vs {:.2f}s, changes {}/{}, "
            "length gap {:.1%}, total {:.1f}s{}".format(
                rep_h.expanded_states, rep_s.expanded_states,
                rep_h.execution_time, rep_s.execution_time,
                rep_h.direction_changes, rep_s.direction_changes,
                length_gap, elapsed, contract_note))


# ------------------------------------------------------------ criterion 5


def test_criterion_5_sweep_improvement():
    t0 = time.monotonic()
    scenario = load_config(str(CONFIG_PATH))
    layout = build_parking_layout(scenario.layout, scenario.vehicle)
    rows = []
    for slot_id, goal in layout.slots:
        for engine in (Engine.HYBRID_ASTAR, Engine.SMHA):
            result, report = _plan_slot(scenario, layout, slot_id, engine)
            rows.append(kpi_row(slot_id, engine, report,
                                layout.grid.grid_hash))
            _register("sweep slot {} {}".format(slot_id, engine.value),
                      result, layout.grid, scenario.vehicle,
                      scenario.planner, goal)
    elapsed = time.monotonic() - t0

    summary = summarize_sweep(rows)
    time_gain = summary["mean_improvement_pct"]["execution_time_s"]
    states_gain = summary["mean_improvement_pct"]["expanded_states"]
    rate_h = summary["success_rate"]["hybrid"]
    rate_s = summary["success_rate"]["smha"]

    ok = (time_gain >= 30.0 and states_gain >= 50.0 and rate_s >= rate_h
          and elapsed < 900.0)
    _report(5, ok,
            "mean execution time improvement {:.1f}%, expanded states "
            "{:.1f}%, success {:.0%} vs {:.0%}, sweep took {:.0f}s".format(
                time_gain, states_gain, rate_h, rate_s, elapsed))


# ------------------------------------------------------------ criterion 6


def test_criterion_6_footprint_geometry():
    rng = random.Random(606)
    uncovered = 0
    for _ in range(100):
        wheelbase = rng.uniform(1.5, 3.2)
        body_length = wheelbase + rng.uniform(0.5, 2.0)
        body_width = rng.uniform(1.2, 2.4)
        rear_overhang = rng.uniform(0.0, 1.0)
        params = VehicleParams(wheelbase=wheelbase, body_length=body_length,
                               body_width=body_width,
                               rear_overhang=rear_overhang,
                               alpha_max=rng.uniform(0.3, 1.2),
                               n_disks=rng.randint(1, 7))
        fp = footprint_disks(params)
        xs = np.array([rng.uniform(-rear_overhang,
                                   body_length - rear_overhang)
                       for _ in range(10000)])
        ys = np.array([rng.uniform(-body_width / 2.0, body_width / 2.0)
                       for _ in range(10000)])
        centers = np.array(fp.centers)
        d2 = (xs[:, None] - centers[None, :, 0]) ** 2 + \
            (ys[:, None] - centers[None, :, 1]) ** 2
        uncovered += int(np.sum(d2.min(axis=1) > fp.radius ** 2 + 1e-9))

    # direct evaluation of the slab construction for l=4, w=2, n=3:
    # r = sqrt((l/n)^2 + (w/2)^2), d = 2*sqrt(r^2 - (w/2)^2) = 2l/n
    fp = footprint_disks(VehicleParams(wheelbase=2.5, body_length=4.0,
                                       body_width=2.0, rear_overhang=0.8,
                                       alpha_max=0.5, n_disks=3))
    r_expected = math.sqrt(4.0 ** 2 / 3 ** 2 + 2.0 ** 2 / 4.0)
    d_expected = 2.0 * math.sqrt(r_expected ** 2 - 2.0 ** 2 / 4.0)
    r_ok = abs(fp.radius - 1.66667) <= 1e-4 and \
        abs(fp.radius - r_expected) <= 1e-12
    d_ok = abs(fp.spacing - d_expected) <= 1e-4

    ok = uncovered == 0 and r_ok and d_ok
    _report(6, ok,
            "{} uncovered samples over 100 vehicles x 10000 points, "
            "r={:.5f} (want 1.66667), d={:.5f} (direct evaluation "
            "{:.5f})".format(uncovered, fp.radius, fp.spacing, d_expected))


# ------------------------------------------------------------ criterion 7


def _two_chamber_grid():
    cells = np.zeros((24, 80), dtype=bool)
    cells[:2, :] = True
    cells[-2:, :] = True
    cells[:, :2] = True
    cells[:, -2:] = True
    cells[:, 38:40] = True
    return OccupancyGrid(cells, 0.25)


def test_criterion_7_contracts_and_termination():
    checked = 0
    failures = []
    for label, result, grid, params, config, goal in REGISTRY:
        try:
            check_plan_contract(result, grid, params, config, goal=goal)
        except AssertionError as exc:
            failures.append("{}: {}".format(label, exc))
        checked += 1

    grid = _two_chamber_grid()
    params = VehicleParams()
    config = PlannerConfig()
    start, goal = Pose(3.0, 3.0, 0.0), Pose(13.5, 3.0, 0.0)
    statuses = []
    iterations_ok = True
    for engine in (Engine.HYBRID_ASTAR, Engine.SMHA):
        result = bidirectional_plan(start, goal, grid, params, None, config,
                                    engine)
        statuses.append(result.status)
        iterations_ok &= result.stats.iterations <= config.max_iterations

    terminated = all(s is PlanStatus.INFEASIBLE for s in statuses)
    ok = checked > 0 and not failures and terminated and iterations_ok
    _report(7, ok,
            "{} found plans checked ({} contract failures); disconnected "
            "map gave {} / {}{}".format(
                checked, len(failures), statuses[0].value, statuses[1].value,
                "; first: " + failures[0] if failures else ""))


# ------------------------------------------------------------ criterion 8


def _rows_without_time(rows):
    columns = [c for c in CSV_COLUMNS if c != "execution_time_s"]
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([row[c] for c in columns])
    return buf.getvalue().encode()


def test_criterion_8_determinism():
    if SLOT27_ROWS:
        first = SLOT27_ROWS[0]
    else:
        first = [row for _, _, _, row in _slot27_pair()[2]]
    second = [row for _, _, _, row in _slot27_pair()[2]]

    blob_a = _rows_without_time(first)
    blob_b = _rows_without_time(second)
    ok = blob_a == blob_b
    _report(8, ok,
            "slot 27 rerun rows {} ({} bytes compared, execution time "
            "excluded)".format("identical" if ok else "differ",
                               len(blob_a)))
