"""Candidate place/final pose sampling and action assembly.

Pose sources per object, in priority order: direct-to-goal, around current
and goal poses, grid tiles of the rotated bounding box, uniform random.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import NamedTuple, Optional

import numpy as np

from .geometry import CollisionChecker, ConvexPolygon, Pose2, inside_workspace
from .motion import InvalidEndpoint, MotionConfig, rrt_connect
from .world import (
    Action,
    CostModel,
    GoalTolerance,
    PickPlace,
    Push,
    Scenario,
    WorldState,
    obstacles_for,
    poses_match,
)


class Stage(enum.Enum):
    EXPANSION = "expansion"
    SIMULATION = "simulation"


@dataclass(frozen=True)
class SamplerConfig:
    n_random: int = 8
    n_near: int = 8
    n_grid: int = 8
    near_sigma_xy: float = 0.08
    near_sigma_theta: float = math.radians(30.0)
    grid_enabled: bool = True
    n_expansion_cap: int = 24
    n_simulation_cap: int = 6
    rng_seed: int = 0
    attempts_per_pose: int = 50
    push_liftable: bool = True
    grid_only: bool = False   # restrict every pose source to grid tiles (plus direct goal)
    tol: GoalTolerance = GoalTolerance()

    def __post_init__(self):
        if min(self.n_random, self.n_near, self.n_grid, self.n_expansion_cap, self.n_simulation_cap) < 0:
            raise ValueError("sample counts must be nonnegative")
        if self.n_simulation_cap > self.n_expansion_cap:
            raise ValueError("n_simulation_cap must not exceed n_expansion_cap")


@dataclass(frozen=True)
class PlanningDeps:
    """Everything a planner needs besides the scenario."""

    sampler: SamplerConfig = field(default_factory=SamplerConfig)
    motion: MotionConfig = field(default_factory=MotionConfig)
    cost: CostModel = field(default_factory=CostModel)
    tol: GoalTolerance = field(default_factory=GoalTolerance)


def _checker(state: WorldState, scenario: Scenario, oid: int) -> CollisionChecker:
    return CollisionChecker(scenario.objects[oid].footprint, obstacles_for(state, scenario, oid), scenario.ws)


def _draw_valid(chk: CollisionChecker, P: np.ndarray, n: int) -> list[Pose2]:
    ok = chk.poses_free(P)
    return [Pose2(*row) for row in P[ok][:n]]


def sample_random_poses(state: WorldState, scenario: Scenario, oid: int, n: int,
                        rng: np.random.Generator, attempts_per_pose: int = 50) -> list[Pose2]:
    if n <= 0:
        return []
    ws = scenario.ws
    m = n * attempts_per_pose
    P = np.column_stack([rng.uniform(0.0, ws.width, m), rng.uniform(0.0, ws.height, m),
                         rng.uniform(-math.pi, math.pi, m)])
    return _draw_valid(_checker(state, scenario, oid), P, n)


def sample_around(state: WorldState, scenario: Scenario, oid: int, center: Pose2, n: int,
                  rng: np.random.Generator, sigma_xy: float = 0.08,
                  sigma_theta: float = math.radians(30.0), attempts: int = 25 * 8) -> list[Pose2]:
    """Up to ``n`` free poses drawn from a Gaussian around ``center``."""
    if n <= 0:
        return []
    P = np.column_stack([rng.normal(center.x, sigma_xy, attempts), rng.normal(center.y, sigma_xy, attempts),
                         rng.normal(center.theta, sigma_theta, attempts)])
    return _draw_valid(_checker(state, scenario, oid), P, n)


def sample_near_poses(state: WorldState, scenario: Scenario, oid: int, n: int,
                      rng: np.random.Generator, sigma_xy: float = 0.08,
                      sigma_theta: float = math.radians(30.0), attempts_per_pose: int = 50) -> list[Pose2]:
    """Gaussian draws alternating between the current and the goal pose."""
    if n <= 0:
        return []
    m = n * attempts_per_pose // 2 + 1
    pools = [sample_around(state, scenario, oid, c, n, rng, sigma_xy, sigma_theta, m)
             for c in (state[oid], scenario.goal[oid])]
    out: list[Pose2] = []
    i = 0
    while len(out) < n and (i < len(pools[0]) or i < len(pools[1])):
        for pool in pools:
            if i < len(pool) and len(out) < n:
                out.append(pool[i])
        i += 1
    return out


def min_area_box(poly: ConvexPolygon) -> tuple[float, float, float, tuple[float, float]]:
    """Minimum-area enclosing rectangle: (angle, width, height, centre in the rotated frame).

    ``angle`` is the body-frame direction of the box's width axis; rotating
    the body by ``-angle`` makes the box axis aligned.
    """
    v = poly.array
    best = None
    for i in range(len(v)):
        e = v[(i + 1) % len(v)] - v[i]
        phi = math.atan2(e[1], e[0])
        c, s = math.cos(-phi), math.sin(-phi)
        r = v @ np.array([[c, s], [-s, c]])
        lo, hi = r.min(axis=0), r.max(axis=0)
        area = float(np.prod(hi - lo))
        if best is None or area < best[0] - 1e-15:
            best = (area, phi, float(hi[0] - lo[0]), float(hi[1] - lo[1]),
                    (float(lo[0] + hi[0]) / 2, float(lo[1] + hi[1]) / 2))
    _, phi, w, h, ctr = best
    return phi, w, h, ctr


def grid_poses(scenario: Scenario, oid: int) -> list[Pose2]:
    """Object poses tiling the workspace with its minimum-area bounding box."""
    poly = scenario.objects[oid].footprint
    ws = scenario.ws
    phi, w, h, (cx, cy) = min_area_box(poly)
    nx = int(math.floor(ws.width / w + 1e-9))
    ny = int(math.floor(ws.height / h + 1e-9))
    out = []
    for j in range(ny):
        for i in range(nx):
            tx, ty = w / 2 + i * w, h / 2 + j * h
            pose = Pose2(tx - cx, ty - cy, -phi)
            if inside_workspace(poly, pose, ws):
                out.append(pose)
    return out


def direct_goal_pose(state: WorldState, scenario: Scenario, oid: int) -> Optional[Pose2]:
    g = scenario.goal[oid]
    return g if _checker(state, scenario, oid).pose_free(g) else None


class Candidate(NamedTuple):
    """A sampled place/final pose with the primitive to reach it."""

    obj: int
    pose: Pose2
    kind: str            # "pick_place" | "push"
    direct: bool = False


def candidate_poses(state: WorldState, scenario: Scenario, oid: int, config: SamplerConfig,
                    stage: Stage, rng: np.random.Generator) -> list[tuple[Pose2, bool]]:
    """Deduplicated, capped pose list for one object, direct-goal first."""
    tol = config.tol
    cap = config.n_expansion_cap if stage is Stage.EXPANSION else config.n_simulation_cap
    cur = state[oid]
    out: list[tuple[Pose2, bool]] = []

    def push(p: Pose2, direct=False):
        if len(out) >= cap or poses_match(p, cur, tol):
            return
        if any(poses_match(p, q, tol) for q, _ in out):
            return
        out.append((p, direct))

    if not poses_match(cur, scenario.goal[oid], tol):
        g = direct_goal_pose(state, scenario, oid)
        if g is not None:
            push(g, True)
    chk = None
    if config.grid_only:
        tiles = grid_poses(scenario, oid)
        if tiles:
            chk = _checker(state, scenario, oid)
            free = [p for p, ok in zip(tiles, chk.poses_free(tiles)) if ok]
            for k in rng.permutation(len(free)):
                push(free[k])
        return out
    if stage is Stage.EXPANSION:
        n_near, n_rand = config.n_near, config.n_random
    else:
        n_near = min(config.n_near, cap // 2)
        n_rand = min(config.n_random, cap - n_near)
    for p in sample_near_poses(state, scenario, oid, n_near, rng, config.near_sigma_xy,
                               config.near_sigma_theta, config.attempts_per_pose):
        push(p)
    if stage is Stage.EXPANSION and config.grid_enabled and config.n_grid > 0:
        tiles = grid_poses(scenario, oid)
        if tiles:
            chk = _checker(state, scenario, oid)
            free = [p for p, ok in zip(tiles, chk.poses_free(tiles)) if ok]
            for k in rng.permutation(len(free))[: config.n_grid]:
                push(free[k])
    for p in sample_random_poses(state, scenario, oid, n_rand, rng, config.attempts_per_pose):
        push(p)
    return out


def candidates(state: WorldState, scenario: Scenario, config: SamplerConfig, stage: Stage,
               rng: np.random.Generator, objects=None) -> list[Candidate]:
    """Unrealized candidates in emission order (object id, then pose order,
    pick-n-place before push)."""
    out = []
    ids = range(scenario.n) if objects is None else objects
    for oid in ids:
        liftable = scenario.objects[oid].liftable
        for pose, direct in candidate_poses(state, scenario, oid, config, stage, rng):
            if liftable:
                out.append(Candidate(oid, pose, "pick_place", direct))
            if not liftable or config.push_liftable:
                out.append(Candidate(oid, pose, "push", direct))
    return out


def realize(cand: Candidate, state: WorldState, scenario: Scenario, motion: MotionConfig,
            rng: np.random.Generator) -> Optional[Action]:
    """Turn a candidate into an action; None if no push path was found."""
    cur = state[cand.obj]
    if cand.kind == "pick_place":
        return PickPlace(cand.obj, cur, cand.pose)
    obj = scenario.objects[cand.obj].footprint
    try:
        path = rrt_connect(obj, cur, cand.pose, obstacles_for(state, scenario, cand.obj),
                           scenario.ws, motion, rng)
    except InvalidEndpoint:
        return None
    return None if path is None else Push(cand.obj, tuple(path))


def enumerate_actions(state: WorldState, scenario: Scenario, config: SamplerConfig, stage: Stage,
                      rng: np.random.Generator, motion: Optional[MotionConfig] = None) -> list[Action]:
    motion = motion or MotionConfig()
    acts = []
    for c in candidates(state, scenario, config, stage, rng):
        a = realize(c, state, scenario, motion, rng)
        if a is not None:
            acts.append(a)
    return acts
