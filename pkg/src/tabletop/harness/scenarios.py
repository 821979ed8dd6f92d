"""Random benchmark scenarios with a constructive feasibility certificate.

The goal arrangement is sampled first; the start arrangement is produced by
applying random legal actions to it. Reversing that action sequence gives a
witness plan from start to goal.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Optional

import numpy as np

from ..geometry import CollisionChecker, ConvexPolygon, Pose2, WorkspaceRect
from ..motion import InvalidEndpoint, MotionConfig, rrt_connect
from ..world import (
    Action,
    GoalTolerance,
    ObjectClass,
    ObjectSpec,
    PickPlace,
    Push,
    Scenario,
    WorldState,
    apply_action,
    is_goal,
    obstacles_for,
    poses_match,
)


class GenerationTimeout(RuntimeError):
    pass


@dataclass(frozen=True)
class GenConfig:
    ws: WorkspaceRect = field(default_factory=WorkspaceRect)
    min_vertices: int = 3
    max_vertices: int = 8
    min_radius: float = 0.04
    max_radius: float = 0.12
    max_aspect: float = 2.0
    p_push: float = 0.4
    moves_per_object: tuple[int, int] = (1, 2)
    p_block: float = 0.75          # share of reverse moves aimed at another object's goal
    max_attempts: int = 200
    placement_tries: int = 400
    motion: MotionConfig = field(default_factory=lambda: MotionConfig(time_limit=None, max_nodes=1500))

    def to_dict(self) -> dict:
        d = asdict(self)
        d["moves_per_object"] = list(self.moves_per_object)
        return d


def random_polygon(rng: np.random.Generator, cfg: GenConfig) -> ConvexPolygon:
    """Convex polygon with 3..8 vertices and circumradius in the configured range."""
    while True:
        n = int(rng.integers(cfg.min_vertices, cfg.max_vertices + 1))
        ang = np.sort(rng.uniform(0.0, 2 * math.pi, n))
        rad = rng.uniform(0.75, 1.0, n)
        aspect = rng.uniform(1.0, cfg.max_aspect)
        pts = np.column_stack([aspect * rad * np.cos(ang), rad * np.sin(ang)])
        try:
            poly = ConvexPolygon.from_points(pts)
        except ValueError:
            continue
        if len(poly) < cfg.min_vertices:
            continue
        target = rng.uniform(cfg.min_radius, cfg.max_radius)
        scale = target / poly.circumradius
        try:
            poly = ConvexPolygon.from_points([(x * scale, y * scale) for x, y in poly.vertices])
        except ValueError:
            continue
        # a skinny sliver is not a useful tabletop object
        if poly.area < 0.25 * poly.circumradius ** 2:
            continue
        return poly


def _free_uniform(chk: CollisionChecker, ws: WorkspaceRect, rng, tries: int) -> Optional[Pose2]:
    P = np.column_stack([rng.uniform(0, ws.width, tries), rng.uniform(0, ws.height, tries),
                         rng.uniform(-math.pi, math.pi, tries)])
    ok = np.nonzero(chk.poses_free(P))[0]
    return Pose2(*P[ok[0]]) if len(ok) else None


def _free_near(chk: CollisionChecker, center: Pose2, sigma: float, rng, tries: int) -> Optional[Pose2]:
    P = np.column_stack([rng.normal(center.x, sigma, tries), rng.normal(center.y, sigma, tries),
                         rng.uniform(-math.pi, math.pi, tries)])
    ok = np.nonzero(chk.poses_free(P))[0]
    return Pose2(*P[ok[0]]) if len(ok) else None


def _place_all(objects, ws, rng, tries) -> Optional[WorldState]:
    # biggest first packs more reliably
    order = sorted(range(len(objects)), key=lambda i: -objects[i].footprint.area)
    placed: dict[int, Pose2] = {}
    for i in order:
        obs = [(objects[j].footprint, placed[j]) for j in placed]
        p = _free_uniform(CollisionChecker(objects[i].footprint, obs, ws), ws, rng, tries)
        if p is None:
            return None
        placed[i] = p
    return WorldState(tuple(placed[i] for i in range(len(objects))))


def _move(state: WorldState, sc: Scenario, oid: int, target: Pose2, motion: MotionConfig, rng) -> Optional[Action]:
    spec = sc.objects[oid]
    if spec.liftable:
        return PickPlace(oid, state[oid], target)
    try:
        path = rrt_connect(spec.footprint, state[oid], target, obstacles_for(state, sc, oid), sc.ws, motion, rng)
    except InvalidEndpoint:
        return None
    return None if path is None else Push(oid, tuple(path))


def invert(action: Action) -> Action:
    if isinstance(action, PickPlace):
        return PickPlace(action.obj, action.place, action.pick)
    return Push(action.obj, tuple(reversed(action.waypoints)))


def greedy_direct_solvable(sc: Scenario, motion: MotionConfig, rng, tol: GoalTolerance = GoalTolerance()) -> bool:
    """True if repeatedly moving any object straight to a free goal solves the case."""
    state = sc.start
    progress = True
    while progress and not is_goal(state, sc, tol):
        progress = False
        for o in sc.objects:
            if poses_match(state[o.id], sc.goal[o.id], tol):
                continue
            chk = CollisionChecker(o.footprint, obstacles_for(state, sc, o.id), sc.ws)
            if not chk.pose_free(sc.goal[o.id]):
                continue
            a = _move(state, sc, o.id, sc.goal[o.id], motion, rng)
            if a is None:
                continue
            state = state.moved(o.id, sc.goal[o.id])
            progress = True
    return is_goal(state, sc, tol)


def generate_scenario(n_objects: int, cfg: GenConfig = GenConfig(), rng: Optional[np.random.Generator] = None,
                      name: str = "") -> tuple[Scenario, list[Action]]:
    """Return a non-trivial scenario and a witness plan that solves it."""
    if n_objects < 1:
        raise ValueError("n_objects must be >= 1")
    rng = rng if rng is not None else np.random.default_rng()
    ws = cfg.ws
    tol = GoalTolerance()
    for _ in range(cfg.max_attempts):
        objects = tuple(ObjectSpec(i, random_polygon(rng, cfg),
                                   ObjectClass.PUSH_ONLY if rng.random() < cfg.p_push else ObjectClass.LIFTABLE)
                        for i in range(n_objects))
        goal = _place_all(objects, ws, rng, cfg.placement_tries)
        if goal is None:
            continue
        sc = Scenario(objects, goal, goal, ws, name)
        lo, hi = cfg.moves_per_object
        moves = [i for i in range(n_objects) for _ in range(int(rng.integers(lo, hi + 1)))]
        rng.shuffle(moves)
        state = goal
        forward: list[Action] = []
        for oid in moves:
            spec = objects[oid]
            chk = CollisionChecker(spec.footprint, obstacles_for(state, sc, oid), ws)
            for _try in range(6):
                target = None
                others = [j for j in range(n_objects) if j != oid]
                if others and rng.random() < cfg.p_block:
                    j = others[int(rng.integers(len(others)))]
                    target = _free_near(chk, goal[j], 0.5 * objects[j].footprint.circumradius, rng, 200)
                if target is None:
                    target = _free_uniform(chk, ws, rng, 400)
                if target is None:
                    continue
                a = _move(state, sc, oid, target, cfg.motion, rng)
                if a is not None:
                    state = apply_action(state, sc, a)
                    forward.append(a)
                    break
        start = state
        if any(poses_match(start[i], goal[i], tol) for i in range(n_objects)):
            continue
        sc = Scenario(objects, start, goal, ws, name)
        witness = [invert(a) for a in reversed(forward)]
        if greedy_direct_solvable(sc, cfg.motion, np.random.default_rng(0), tol):
            continue
        return sc, witness
    raise GenerationTimeout(f"no non-trivial {n_objects}-object scenario after {cfg.max_attempts} attempts")


def generate_suite(counts=(4, 5, 6, 7, 8), cases: int = 5, seed: int = 0,
                   cfg: GenConfig = GenConfig()) -> list[tuple[Scenario, list[Action]]]:
    """``cases`` scenarios per object count, named ``n{N}_c{k}``; each case
    has its own rng stream so suites are stable under reordering."""
    out = []
    for n in counts:
        for k in range(cases):
            rng = np.random.default_rng([seed, n, k])
            out.append(generate_scenario(n, cfg, rng, name=f"n{n}_c{k}"))
    return out
