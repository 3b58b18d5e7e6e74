"""Kinodynamic planners over the parking world.

Two engines share one expansion core: a single-queue best-first baseline
keyed by the max-heuristic, and a multi-queue planner with one consistent
anchor queue plus round-robin inadmissible queues sharing a single
cost-to-come. A bidirectional orchestrator splits a query into a coarse
approach stage and a precise maneuvering stage planned from the goal, then
joins them with an analytic connector.
"""

import math
import time
import heapq
from dataclasses import dataclass, replace
from enum import Enum

import numpy as np

from .heuristics import build_costmap, make_heuristic_set
from .reeds_shepp import rs_all_paths, rs_shortest_path, segment_action
from .vehicle import (
    ACTIONS,
    Direction,
    Pose,
    arc_step,
    flip_direction,
    footprint_disks,
    min_turning_radius,
)
from .world import (
    SEARCH_EXTRA_MARGIN,
    clear_pose_mask,
    clearance,
    compute_distance_field,
    is_collision_free,
)

SAMPLE_STEP = 0.05
_COMBINE_ATTEMPTS = 25


class PlanStatus(Enum):
    FOUND = "Found"
    INFEASIBLE = "Infeasible"
    ITERATION_LIMIT = "IterationLimit"


class Engine(Enum):
    HYBRID_ASTAR = "hybrid"
    SMHA = "smha"


class CombineError(RuntimeError):
    """No collision-free connector between the stage end poses."""


@dataclass(frozen=True)
class GridBinning:
    """Quotient map from continuous poses to discrete dedup bins."""

    xy_resolution: float
    theta_bins: int

    def bin_of(self, pose):
        itheta = int(math.floor((pose.theta + math.pi) * self.theta_bins
                                / (2.0 * math.pi))) % self.theta_bins
        return (int(math.floor(pose.x / self.xy_resolution)),
                int(math.floor(pose.y / self.xy_resolution)),
                itheta)


def _default_thresholds(arc_min, arc_max):
    return ((1.0, (arc_min + arc_max) / 2.0), (2.5, arc_max))


@dataclass(frozen=True)
class PlannerConfig:
    weight_w1: float = 2.0
    weight_w2: float = 2.0
    reverse_penalty: float = 2.0
    direction_switch_penalty: float = 2.0
    arc_length_min: float = 0.6
    arc_length_max: float = 3.0
    clearance_thresholds: tuple = None
    d_fw1: float = 5.0
    d_fw2: float = 1.0
    goal_xy_tol: float = 0.3
    goal_theta_tol: float = 0.15
    max_iterations: int = 200000
    theta_bins: int = 72
    analytic_expansion: bool = True

    def __post_init__(self):
        if self.weight_w1 < 1.0 or self.weight_w2 < 1.0:
            raise ValueError("heuristic weights must be >= 1")
        if self.reverse_penalty < 1.0:
            raise ValueError("reverse_penalty must be >= 1")
        if self.direction_switch_penalty < 0.0:
            raise ValueError("direction_switch_penalty must be >= 0")
        if not 0.0 < self.arc_length_min <= self.arc_length_max:
            raise ValueError("need 0 < arc_length_min <= arc_length_max")
        if self.d_fw2 > self.d_fw1:
            raise ValueError("d_fw2 must not exceed d_fw1")
        if self.goal_xy_tol <= 0.0 or self.goal_theta_tol <= 0.0:
            raise ValueError("goal tolerances must be positive")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be positive")
        if self.theta_bins < 4:
            raise ValueError("theta_bins must be at least 4")
        if self.clearance_thresholds is None:
            object.__setattr__(self, "clearance_thresholds",
                               _default_thresholds(self.arc_length_min,
                                                   self.arc_length_max))
        thresholds = tuple(tuple(t) for t in self.clearance_thresholds)
        object.__setattr__(self, "clearance_thresholds", thresholds)
        last_c, last_a = 0.0, self.arc_length_min
        for c, a in thresholds:
            if c < last_c or a < last_a:
                raise ValueError("clearance thresholds must be non-decreasing")
            if not self.arc_length_min <= a <= self.arc_length_max:
                raise ValueError("threshold arc lengths must lie in "
                                 "[arc_length_min, arc_length_max]")
            last_c, last_a = c, a


def adaptive_arc_length(clear, config):
    """Piecewise-constant, non-decreasing primitive length from clearance."""
    arc = config.arc_length_min
    for threshold, length in config.clearance_thresholds:
        if clear >= threshold:
            arc = length
    return min(max(arc, config.arc_length_min), config.arc_length_max)


def edge_cost(action, arc_length, previous, config):
    """Penalized cost of one primitive edge."""
    factor = config.reverse_penalty if action.direction is Direction.REVERSE else 1.0
    cost = arc_length * factor
    if previous is not None and previous.direction is not action.direction:
        cost += config.direction_switch_penalty
    return cost


@dataclass
class SearchStats:
    expanded_states: int = 0
    iterations: int = 0
    wall_time_s: float = 0.0


@dataclass(frozen=True)
class PlanResult:
    status: PlanStatus
    start: Pose
    poses: tuple          # ((Pose, Direction), ...) sampled at SAMPLE_STEP
    actions: tuple        # ((ControlAction, arc_length_m), ...)
    stats: SearchStats
    expansions: tuple = ()

    @property
    def found(self):
        return self.status is PlanStatus.FOUND

    @property
    def end_pose(self):
        return self.poses[-1][0] if self.poses else self.start


class WorldContext:
    """Immutable bundle shared by all searches of one planning call."""

    def __init__(self, grid, params):
        self.grid = grid
        self.params = params
        self.field = compute_distance_field(grid)
        self.footprint = footprint_disks(params)
        self.radius = min_turning_radius(params)

    def pose_clear(self, pose):
        return is_collision_free(pose, self.footprint, self.field,
                                 extra_margin=SEARCH_EXTRA_MARGIN)

    def arc_clear(self, pose, action, s_values):
        """All samples along one constant-control arc are collision-free.

        The sample poses follow the arc_step closed form so the points
        checked here are the ones a replay of the action produces.
        """
        sgn = float(action.direction.value)
        steer = float(action.steering.value)
        if steer == 0.0:
            xs = pose.x + sgn * s_values * math.cos(pose.theta)
            ys = pose.y + sgn * s_values * math.sin(pose.theta)
            thetas = np.full(s_values.shape, pose.theta)
        else:
            thetas = pose.theta + sgn * steer * s_values / self.radius
            k = self.radius / steer
            xs = pose.x + k * (np.sin(thetas) - math.sin(pose.theta))
            ys = pose.y - k * (np.cos(thetas) - math.cos(pose.theta))
        mask = clear_pose_mask(xs, ys, thetas, self.footprint, self.field,
                               extra_margin=SEARCH_EXTRA_MARGIN)
        return bool(mask.all())

    def rs_path_clear(self, path, start):
        """Analytic path collision check at the sampling used for replay."""
        pose = start
        for seg in path.segments:
            action = segment_action(seg)
            length = abs(seg.signed_length)
            n = max(1, math.ceil(length / SAMPLE_STEP))
            s_values = np.arange(1, n + 1) * length / n
            if not self.arc_clear(pose, action, s_values):
                return False
            pose = arc_step(pose, action, length * n / n, self.radius)
        return True


def _sample_actions(start, actions, radius):
    """Sampled (pose, direction) chain for an action sequence, start included."""
    first_dir = actions[0][0].direction if actions else Direction.FORWARD
    samples = [(start, first_dir)]
    pose = start
    for action, arc in actions:
        n = max(1, math.ceil(arc / SAMPLE_STEP))
        for i in range(1, n + 1):
            samples.append((arc_step(pose, action, arc * i / n, radius),
                            action.direction))
        pose = samples[-1][0]
    return samples


class _Node:
    __slots__ = ("pose", "g", "parent", "incoming", "bin", "hvals")

    def __init__(self, pose, g, parent, incoming, bin_, hvals):
        self.pose = pose
        self.g = g
        self.parent = parent
        self.incoming = incoming
        self.bin = bin_
        self.hvals = hvals


class _StageSearch:
    """Resumable best-first search; one instance per stage and engine."""

    def __init__(self, ctx, start, goal_test, shot_target, heuristics, config,
                 kind, penalty_flip=False, collect_expansions=False):
        self.ctx = ctx
        self.start = start
        self.goal_test = goal_test
        self.shot_target = shot_target
        self.heuristics = heuristics
        self.config = config
        self.kind = kind
        self.penalty_flip = penalty_flip
        self.binning = GridBinning(ctx.grid.resolution, config.theta_bins)
        self.stats = SearchStats()
        self.best = {}
        self.closed_anchor = set()
        self.closed_inad = set()
        self.expansion_counts = {}
        self.returned_ids = set()
        self.expansions_log = [] if collect_expansions else None
        self.anchor_key_history = []
        self._seq = 0
        self._started = False
        n_inad = len(heuristics.inadmissibles)
        self._n_queues = 1 + n_inad if kind is Engine.SMHA else 1
        self.queues = [[] for _ in range(self._n_queues)]
        self._rr = 0

        if not ctx.pose_clear(start):
            raise ValueError("start pose is in collision")
        root = self._make_node(start, 0.0, None, None)
        self.best[root.bin] = root
        self._push(root)

    # -- node and queue plumbing ------------------------------------------

    def _make_node(self, pose, g, parent, incoming):
        anchor, inads = self.heuristics.evaluate(pose)
        return _Node(pose, g, parent, incoming, self.binning.bin_of(pose),
                     (anchor,) + tuple(inads))

    def _key(self, node, qi):
        if self.kind is Engine.HYBRID_ASTAR:
            return node.g + node.hvals[-1]
        return node.g + self.config.weight_w1 * node.hvals[qi]

    def _push(self, node):
        for qi in range(self._n_queues):
            heapq.heappush(self.queues[qi],
                           (self._key(node, qi), node.bin, self._seq, node))
            self._seq += 1

    def _closed_for(self, qi, bin_):
        if qi == 0:
            return bin_ in self.closed_anchor
        return bin_ in self.closed_inad or bin_ in self.closed_anchor

    def _clean_top(self, qi):
        """Drop stale or closed entries; each drop counts as an iteration."""
        q = self.queues[qi]
        while q:
            _, bin_, _, node = q[0]
            if (id(node) in self.returned_ids
                    or node is not self.best.get(bin_)
                    or self._closed_for(qi, bin_)):
                heapq.heappop(q)
                self.stats.iterations += 1
            else:
                return

    def _top_key(self, qi):
        return self.queues[qi][0][0] if self.queues[qi] else math.inf

    # -- expansion ---------------------------------------------------------

    def _penalty_view(self, action):
        if action is None:
            return None
        return flip_direction(action) if self.penalty_flip else action

    def _expand(self, node):
        self.stats.expanded_states += 1
        if self.expansions_log is not None:
            self.expansions_log.append(node.pose)
        arc = adaptive_arc_length(
            clearance(node.pose, self.ctx.footprint, self.ctx.field),
            self.config)
        prev = self._penalty_view(node.incoming[0] if node.incoming else None)
        n = max(1, math.ceil(arc / SAMPLE_STEP))
        s_values = np.arange(1, n + 1) * arc / n
        for action in ACTIONS:
            # cheap dedup test first: a dominated child is dropped either way
            g_new = node.g + edge_cost(self._penalty_view(action), arc, prev,
                                       self.config)
            child_pose = arc_step(node.pose, action, arc, self.ctx.radius)
            bin_ = self.binning.bin_of(child_pose)
            incumbent = self.best.get(bin_)
            if incumbent is not None and incumbent.g <= g_new:
                continue
            if not self.ctx.arc_clear(node.pose, action, s_values):
                continue
            child = self._make_node(child_pose, g_new, node, (action, arc))
            self.best[bin_] = child
            self._push(child)

    def _try_shot(self, pose):
        path = rs_shortest_path(pose, self.shot_target, self.ctx.radius)
        if self.ctx.rs_path_clear(path, pose):
            return path
        return None

    def _reconstruct(self, node, shot=None):
        actions = []
        cur = node
        while cur.parent is not None:
            actions.append(cur.incoming)
            cur = cur.parent
        actions.reverse()
        if shot is not None:
            actions.extend((segment_action(seg), abs(seg.signed_length))
                           for seg in shot.segments)
        actions = tuple(actions)
        poses = tuple(_sample_actions(self.start, actions, self.ctx.radius))
        return PlanResult(
            status=PlanStatus.FOUND, start=self.start, poses=poses,
            actions=actions,
            stats=SearchStats(self.stats.expanded_states,
                              self.stats.iterations, self.stats.wall_time_s),
            expansions=tuple(self.expansions_log or ()))

    def _finish(self, status):
        return PlanResult(
            status=status, start=self.start, poses=(), actions=(),
            stats=SearchStats(self.stats.expanded_states,
                              self.stats.iterations, self.stats.wall_time_s),
            expansions=tuple(self.expansions_log or ()))

    def _select_queue(self):
        """Next queue to pop per the suspension rule, or None when drained."""
        if self.kind is Engine.HYBRID_ASTAR:
            self._clean_top(0)
            return 0 if self.queues[0] else None
        n_inad = self._n_queues - 1
        for _ in range(n_inad):
            qi = 1 + self._rr
            self._rr = (self._rr + 1) % n_inad
            self._clean_top(0)
            self._clean_top(qi)
            anchor_key = self._top_key(0)
            inad_key = self._top_key(qi)
            if not math.isinf(inad_key) and \
                    inad_key <= self.config.weight_w2 * anchor_key:
                return qi
            if not math.isinf(anchor_key):
                return 0
        return None

    def resume(self):
        """Continue searching; each call returns the next result."""
        t0 = time.perf_counter()
        try:
            if not self._started:
                self._started = True
                if self.goal_test(self.start):
                    root = self.best[self.binning.bin_of(self.start)]
                    self.returned_ids.add(id(root))
                    return self._reconstruct(root)
            while self.stats.iterations < self.config.max_iterations:
                qi = self._select_queue()
                if qi is None:
                    return self._finish(PlanStatus.INFEASIBLE)
                if self.kind is Engine.SMHA:
                    self.anchor_key_history.append(self._top_key(0))
                _, bin_, _, node = heapq.heappop(self.queues[qi])
                self.stats.iterations += 1
                if self.goal_test(node.pose):
                    self.returned_ids.add(id(node))
                    return self._reconstruct(node)
                if self.config.analytic_expansion:
                    period = max(1, math.floor(node.hvals[0]
                                               / self.config.arc_length_max))
                    if self.stats.expanded_states % period == 0:
                        shot = self._try_shot(node.pose)
                        if shot is not None:
                            self.returned_ids.add(id(node))
                            return self._reconstruct(node, shot)
                if qi == 0:
                    self.closed_anchor.add(bin_)
                else:
                    self.closed_inad.add(bin_)
                self.expansion_counts[bin_] = self.expansion_counts.get(bin_, 0) + 1
                self._expand(node)
            return self._finish(PlanStatus.ITERATION_LIMIT)
        finally:
            self.stats.wall_time_s += time.perf_counter() - t0


def _tolerance_goal_test(goal, config):
    def test(pose):
        if math.hypot(pose.x - goal.x, pose.y - goal.y) > config.goal_xy_tol:
            return False
        diff = (pose.theta - goal.theta + math.pi) % (2.0 * math.pi) - math.pi
        return abs(diff) <= config.goal_theta_tol
    return test


def _ball_goal_test(center, d):
    def test(pose):
        return math.hypot(pose.x - center.x, pose.y - center.y) <= d
    return test


def _timed(result, seconds):
    stats = SearchStats(result.stats.expanded_states, result.stats.iterations,
                        seconds)
    return replace(result, stats=stats)


def hybrid_astar(start, goal, grid, params, config, heuristics=None,
                 collect_expansions=False, _debug_sink=None):
    """Single-queue baseline keyed by the unweighted max-heuristic."""
    t0 = time.perf_counter()
    ctx = WorldContext(grid, params)
    if heuristics is None:
        costmap = build_costmap(grid, goal, ctx.footprint)
        heuristics = make_heuristic_set(goal, ctx.radius, costmap)
    stage = _StageSearch(ctx, start, _tolerance_goal_test(goal, config), goal,
                         heuristics, config, Engine.HYBRID_ASTAR,
                         collect_expansions=collect_expansions)
    result = stage.resume()
    if _debug_sink is not None:
        _debug_sink["expansion_counts"] = stage.expansion_counts
    return _timed(result, time.perf_counter() - t0)


def smha_star(start, goal, grid, params, heuristics, config,
              collect_expansions=False, _debug_sink=None):
    """Multi-queue planner: anchor bound, inadmissible guides, shared g."""
    t0 = time.perf_counter()
    ctx = WorldContext(grid, params)
    if heuristics is None:
        costmap = build_costmap(grid, goal, ctx.footprint)
        heuristics = make_heuristic_set(goal, ctx.radius, costmap)
    stage = _StageSearch(ctx, start, _tolerance_goal_test(goal, config), goal,
                         heuristics, config, Engine.SMHA,
                         collect_expansions=collect_expansions)
    result = stage.resume()
    if _debug_sink is not None:
        _debug_sink["expansion_counts"] = stage.expansion_counts
        _debug_sink["anchor_key_history"] = stage.anchor_key_history
    return _timed(result, time.perf_counter() - t0)


def combine_paths(pose_a, pose_b, radius, ctx):
    """Shortest collision-free analytic connector from pose_a to pose_b.

    Words are tried shortest first; raises CombineError when every word in
    the catalog is obstructed.
    """
    for path in rs_all_paths(pose_a, pose_b, radius):
        if ctx.rs_path_clear(path, pose_a):
            return path
    raise CombineError("no collision-free connector between stage end poses")


def bidirectional_plan(start, goal, grid, params, heuristics, config, engine,
                       collect_expansions=False):
    """Coarse approach toward the slot, precise stage from it, then stitch.

    The second stage searches from the goal with penalties applied to the
    executed (reversed) motion; its output is flipped so the combined action
    list runs start to goal. `heuristics` serves the forward stage (it must
    target the goal); pass None to build it here. The backward stage always
    builds its own set because its target is only known after stage one.
    """
    t0 = time.perf_counter()
    ctx = WorldContext(grid, params)
    if not ctx.pose_clear(goal):
        raise ValueError("goal pose is in collision")

    if heuristics is None:
        costmap_fw = build_costmap(grid, goal, ctx.footprint)
        heur_fw = make_heuristic_set(goal, ctx.radius, costmap_fw)
    else:
        heur_fw = heuristics
    forward = _StageSearch(ctx, start, _ball_goal_test(goal, config.d_fw1),
                           goal, heur_fw, config, _engine_kind(engine),
                           collect_expansions=collect_expansions)
    r1 = forward.resume()
    if not r1.found:
        return _timed(_merge_results(start, r1, None, None, r1.status, ctx),
                      time.perf_counter() - t0)
    x_mid = r1.end_pose

    costmap_bw = build_costmap(grid, x_mid, ctx.footprint)
    heur_bw = make_heuristic_set(x_mid, ctx.radius, costmap_bw)
    backward = _StageSearch(ctx, goal, _ball_goal_test(x_mid, config.d_fw2),
                            x_mid, heur_bw, config, _engine_kind(engine),
                            penalty_flip=True,
                            collect_expansions=collect_expansions)
    r2 = None
    connector = None
    for _ in range(_COMBINE_ATTEMPTS):
        r2 = backward.resume()
        if not r2.found:
            return _timed(
                _merge_results(start, r1, r2, None, r2.status, ctx),
                time.perf_counter() - t0)
        try:
            connector = combine_paths(x_mid, r2.end_pose, ctx.radius, ctx)
            break
        except CombineError:
            connector = None
    if connector is None:
        return _timed(
            _merge_results(start, r1, r2, None, PlanStatus.INFEASIBLE, ctx),
            time.perf_counter() - t0)
    return _timed(
        _merge_results(start, r1, r2, connector, PlanStatus.FOUND, ctx),
        time.perf_counter() - t0)


def _engine_kind(engine):
    if isinstance(engine, Engine):
        return engine
    return Engine(engine)


def _merge_results(start, r1, r2, connector, status, ctx):
    stats = SearchStats(
        r1.stats.expanded_states + (r2.stats.expanded_states if r2 else 0),
        r1.stats.iterations + (r2.stats.iterations if r2 else 0),
        r1.stats.wall_time_s + (r2.stats.wall_time_s if r2 else 0.0))
    expansions = r1.expansions + (r2.expansions if r2 else ())
    if status is not PlanStatus.FOUND:
        return PlanResult(status=status, start=start, poses=(), actions=(),
                          stats=stats, expansions=expansions)
    connector_actions = tuple((segment_action(seg), abs(seg.signed_length))
                              for seg in connector.segments)
    executed_backward = tuple((flip_direction(a), arc)
                              for a, arc in reversed(r2.actions))
    actions = r1.actions + connector_actions + executed_backward
    poses = tuple(_sample_actions(start, actions, ctx.radius))
    return PlanResult(status=PlanStatus.FOUND, start=start, poses=poses,
                      actions=actions, stats=stats, expansions=expansions)
