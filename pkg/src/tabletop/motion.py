"""SE(2) push-trajectory planning with RRT-connect and path shortcutting."""
from __future__ import annotations

import math
import time
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .geometry import (
    DEFAULT_STEP,
    CollisionChecker,
    ConvexPolygon,
    Pose2,
    WorkspaceRect,
    angle_diff,
    interpolate,
)


class InvalidEndpoint(ValueError):
    pass


@dataclass(frozen=True)
class MotionConfig:
    time_limit: Optional[float] = 0.05   # None: node budget only (deterministic)
    step_size: float = 0.03
    goal_tol: float = 0.01
    theta_weight: float = 0.05
    max_nodes: int = 2000
    rng_seed: int = 0
    check_step: float = DEFAULT_STEP
    shortcut_rounds: int = 40

    def __post_init__(self):
        if self.time_limit is not None and self.time_limit <= 0:
            raise ValueError("time_limit must be positive")
        if min(self.step_size, self.goal_tol, self.theta_weight, self.max_nodes, self.check_step) <= 0:
            raise ValueError("motion parameters must be positive")

    def scaled(self, factor: float) -> "MotionConfig":
        """Budget multiplied by ``factor`` (used for final plan polishing)."""
        from dataclasses import replace
        tl = None if self.time_limit is None else self.time_limit * factor
        return replace(self, time_limit=tl, max_nodes=int(self.max_nodes * factor))


def se2_distance(a: Pose2, b: Pose2, theta_weight: float = 0.05) -> float:
    return math.hypot(b.x - a.x, b.y - a.y) + theta_weight * abs(angle_diff(a.theta, b.theta))


def path_length(waypoints: Sequence[Pose2], theta_weight: float = 0.05) -> float:
    if len(waypoints) < 1:
        raise ValueError("path_length needs at least one waypoint")
    return sum(se2_distance(a, b, theta_weight) for a, b in zip(waypoints[:-1], waypoints[1:]))


class _Tree:
    def __init__(self, root: Pose2, capacity: int):
        self.nodes = np.empty((capacity + 1, 3))
        self.parent = np.empty(capacity + 1, dtype=int)
        self.nodes[0] = root.as_tuple()
        self.parent[0] = -1
        self.size = 1

    def nearest(self, q: np.ndarray, tw: float) -> int:
        n = self.nodes[: self.size]
        dth = np.abs(np.remainder(n[:, 2] - q[2] + math.pi, 2 * math.pi) - math.pi)
        d = np.hypot(n[:, 0] - q[0], n[:, 1] - q[1]) + tw * dth
        return int(np.argmin(d))

    def add(self, q: np.ndarray, parent: int) -> int:
        self.nodes[self.size] = q
        self.parent[self.size] = parent
        self.size += 1
        return self.size - 1

    def branch(self, i: int) -> list[np.ndarray]:
        out = []
        while i >= 0:
            out.append(self.nodes[i].copy())
            i = self.parent[i]
        return out


def _dist(a: np.ndarray, b: np.ndarray, tw: float) -> float:
    return math.hypot(b[0] - a[0], b[1] - a[1]) + tw * abs(angle_diff(a[2], b[2]))


def _steer(a: np.ndarray, b: np.ndarray, step: float, tw: float) -> tuple[np.ndarray, bool]:
    d = _dist(a, b, tw)
    if d <= step:
        return b.copy(), True
    t = step / d
    dth = angle_diff(a[2], b[2])
    return np.array([a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1]),
                     math.remainder(a[2] + t * dth, 2 * math.pi)]), False


class _Planner:
    def __init__(self, obj, obstacles, ws, cfg: MotionConfig):
        self.obj = obj
        self.cfg = cfg
        self.checker = CollisionChecker(obj, obstacles, ws)

    def segment_ok(self, a, b) -> bool:
        P = interpolate([Pose2(*a), Pose2(*b)], self.cfg.check_step, self.obj.circumradius)
        return self.checker.segments_free(P)

    def path_ok(self, poses: list[Pose2]) -> bool:
        P = interpolate(poses, self.cfg.check_step, self.obj.circumradius)
        return self.checker.segments_free(P)


def rrt_connect(obj: ConvexPolygon, start: Pose2, goal: Pose2,
                obstacles: Sequence[tuple[ConvexPolygon, Pose2]], ws: WorkspaceRect,
                config: MotionConfig = MotionConfig(),
                rng: Optional[np.random.Generator] = None) -> Optional[list[Pose2]]:
    """Plan a swept-clear waypoint path from ``start`` to ``goal``.

    Returns None when the node budget or time limit runs out. Raises
    InvalidEndpoint if either endpoint is in collision.
    """
    if rng is None:
        rng = np.random.default_rng(config.rng_seed)
    pl = _Planner(obj, obstacles, ws, config)
    free = pl.checker.poses_free([start, goal])
    if not free[0]:
        raise InvalidEndpoint("start pose is in collision")
    if not free[1]:
        raise InvalidEndpoint("goal pose is in collision")
    if pl.path_ok([start, goal]):
        return [start, goal]

    tw, step = config.theta_weight, config.step_size
    deadline = None if config.time_limit is None else time.perf_counter() + config.time_limit
    ta, tb = _Tree(start, config.max_nodes), _Tree(goal, config.max_nodes)
    a_is_start = True
    lo = np.array([0.0, 0.0, -math.pi])
    hi = np.array([ws.width, ws.height, math.pi])
    while ta.size + tb.size < config.max_nodes:
        if deadline is not None and time.perf_counter() > deadline:
            return None
        q = rng.uniform(lo, hi)
        # extend ta toward q
        i = ta.nearest(q, tw)
        new, _ = _steer(ta.nodes[i], q, step, tw)
        if pl.segment_ok(ta.nodes[i], new):
            ia = ta.add(new, i)
            # connect tb toward new
            j = tb.nearest(new, tw)
            cur = tb.nodes[j]
            while ta.size + tb.size < config.max_nodes:
                nxt, reached = _steer(cur, new, step, tw)
                if not pl.segment_ok(cur, nxt):
                    break
                if reached:
                    branch_a = ta.branch(ia)
                    branch_b = tb.branch(j)
                    if a_is_start:
                        raw = branch_a[::-1] + branch_b
                    else:
                        raw = branch_b[::-1] + branch_a
                    return _finish(raw, start, goal, pl, rng)
                j = tb.add(nxt, j)
                cur = nxt
        ta, tb = tb, ta
        a_is_start = not a_is_start
    return None


def _finish(raw: list[np.ndarray], start: Pose2, goal: Pose2, pl: _Planner, rng) -> list[Pose2]:
    path = [Pose2(*q) for q in raw]
    path[0], path[-1] = start, goal
    # drop exact duplicates produced where the two trees meet
    dedup = [path[0]]
    for p in path[1:]:
        if p.as_tuple() != dedup[-1].as_tuple():
            dedup.append(p)
    return shortcut(dedup, pl, rng, pl.cfg.shortcut_rounds)


def shortcut(path: list[Pose2], pl: _Planner, rng, rounds: int) -> list[Pose2]:
    """Replace random sub-chains by straight segments that stay clear.

    A greedy pass from the start first skips to the furthest visible waypoint;
    then random pairs are tried. Neither step can lengthen the path.
    """
    out = [path[0]]
    i = 0
    while i < len(path) - 1:
        j = len(path) - 1
        while j > i + 1 and not pl.segment_ok(path[i].as_tuple(), path[j].as_tuple()):
            j -= 1
        out.append(path[j])
        i = j
    path = out
    for _ in range(rounds):
        if len(path) <= 2:
            break
        i, j = sorted(rng.choice(len(path), size=2, replace=False))
        if j - i < 2:
            continue
        if pl.segment_ok(path[i].as_tuple(), path[j].as_tuple()):
            path = path[: i + 1] + path[j:]
    return path
