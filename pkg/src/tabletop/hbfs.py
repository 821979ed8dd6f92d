"""Hierarchical best-first search with parallel randomized restarts.

Each step applies the first level that yields an action:

1. move some object straight to its goal (cheapest such action);
2. displace objects sitting on another object's goal, toward their own goal
   if possible, otherwise to a random spot (cheapest collected action);
3. a uniformly random sampled action.
"""
from __future__ import annotations

import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .geometry import overlap
from .plan import PlanResult, progress_key
from .sampler import (
    Candidate,
    PlanningDeps,
    Stage,
    direct_goal_pose,
    enumerate_actions,
    realize,
    sample_around,
    sample_random_poses,
)
from .world import (
    Action,
    PickPlace,
    Scenario,
    WorldState,
    action_cost,
    apply_action,
    goal_blockers,
    is_goal,
    objects_at_goal,
    poses_match,
)


class DeadEnd(RuntimeError):
    pass


@dataclass(frozen=True)
class HbfsConfig:
    max_actions: int = 20
    parallel_width: int = 1
    rng_seed: int = 0
    workers: int = 1
    toward_goal_tries: int = 4   # push planning attempts per blocker before falling back

    def __post_init__(self):
        if self.max_actions < 1 or self.parallel_width < 1 or self.workers < 1:
            raise ValueError("invalid HBFS configuration")


def _rank(a: Action) -> tuple:
    return (a.obj, 0 if isinstance(a, PickPlace) else 1)


def _cheapest(actions: list[Action], deps: PlanningDeps) -> Action:
    return min(actions, key=lambda a: (action_cost(a, deps.cost),) + _rank(a))


def _to_pose(state, scenario, oid, pose, deps, rng, kinds=("pick_place", "push")) -> list[Action]:
    spec = scenario.objects[oid]
    out = []
    for kind in kinds:
        if kind == "pick_place" and not spec.liftable:
            continue
        if kind == "push" and spec.liftable and not deps.sampler.push_liftable:
            continue
        a = realize(Candidate(oid, pose, kind), state, scenario, deps.motion, rng)
        if a is not None:
            out.append(a)
    return out


def _clears(scenario, oid_goal: int, oid: int, pose) -> bool:
    o = scenario.objects
    return not overlap(o[oid].footprint, pose, o[oid_goal].footprint, scenario.goal[oid_goal])


def _toward_goal(state, scenario, j: int, freeing: int, deps, rng, tries: int = 4) -> Optional[Action]:
    """Move blocker ``j`` off ``freeing``'s goal to the legal pose nearest its own goal."""
    goal = scenario.goal[j]
    cur_d = state[j].xy_distance(goal)
    g = direct_goal_pose(state, scenario, j)
    if g is not None and not poses_match(state[j], goal, deps.tol):
        acts = _to_pose(state, scenario, j, g, deps, rng)
        if acts:
            return _cheapest(acts, deps)
    cfg = deps.sampler
    poses = sample_around(state, scenario, j, goal, 2 * cfg.n_near, rng,
                          cfg.near_sigma_xy, cfg.near_sigma_theta, 50 * cfg.n_near)
    poses = [p for p in poses if p.xy_distance(goal) < cur_d and _clears(scenario, freeing, j, p)]
    poses.sort(key=lambda p: p.xy_distance(goal))
    for p in poses[:tries]:
        acts = _to_pose(state, scenario, j, p, deps, rng)
        if acts:
            return _cheapest(acts, deps)
    return None


def _random_move(state, scenario, j: int, freeing: int, deps, rng) -> Optional[Action]:
    cfg = deps.sampler
    poses = sample_random_poses(state, scenario, j, cfg.n_random, rng, cfg.attempts_per_pose)
    clearing = [p for p in poses if _clears(scenario, freeing, j, p)]
    poses = clearing or poses
    for k in rng.permutation(len(poses)):
        kinds = ["pick_place", "push"]
        rng.shuffle(kinds)
        acts = _to_pose(state, scenario, j, poses[k], deps, rng, kinds=kinds[:1])
        if not acts:
            acts = _to_pose(state, scenario, j, poses[k], deps, rng, kinds=kinds[1:])
        if acts:
            return acts[0]
    return None


def hbfs_step(state: WorldState, scenario: Scenario, deps: PlanningDeps = PlanningDeps(),
              rng: Optional[np.random.Generator] = None, info: Optional[dict] = None,
              toward_goal_tries: int = 4) -> Action:
    """One HBFS decision. ``info['level']`` records which level fired."""
    rng = rng if rng is not None else np.random.default_rng(deps.sampler.rng_seed)
    tol = deps.tol
    pending = [o.id for o in scenario.objects if not poses_match(state[o.id], scenario.goal[o.id], tol)]

    acts: list[Action] = []
    for oid in pending:
        g = direct_goal_pose(state, scenario, oid)
        if g is not None:
            acts.extend(_to_pose(state, scenario, oid, g, deps, rng))
    if acts:
        if info is not None:
            info["level"] = 1
        return _cheapest(acts, deps)

    for oid in pending:
        for j in sorted(goal_blockers(state, scenario, oid)):
            a = _toward_goal(state, scenario, j, oid, deps, rng, toward_goal_tries)
            if a is None:
                a = _random_move(state, scenario, j, oid, deps, rng)
            if a is not None:
                acts.append(a)
    if acts:
        if info is not None:
            info["level"] = 2
        return _cheapest(acts, deps)

    acts = enumerate_actions(state, scenario, deps.sampler, Stage.EXPANSION, rng, deps.motion)
    if not acts:
        raise DeadEnd("no sampled action is legal")
    if info is not None:
        info["level"] = 3
    return acts[int(rng.integers(len(acts)))]


def _rollout(scenario: Scenario, config: HbfsConfig, deps: PlanningDeps, lane: int) -> PlanResult:
    t0 = time.perf_counter()
    rng = np.random.default_rng([config.rng_seed, lane])
    state = scenario.start
    plan: list[Action] = []
    levels = []
    for _ in range(config.max_actions):
        if is_goal(state, scenario, deps.tol):
            break
        info: dict = {}
        try:
            a = hbfs_step(state, scenario, deps, rng, info, config.toward_goal_tries)
        except DeadEnd:
            break
        state = apply_action(state, scenario, a)
        plan.append(a)
        levels.append(info.get("level"))
    solved = is_goal(state, scenario, deps.tol)
    stats = {"lane": lane, "plan_time": time.perf_counter() - t0, "levels": levels,
             "objects_at_goal": len(objects_at_goal(state, scenario, deps.tol))}
    return PlanResult(plan, solved, stats)


def _rollout_args(args):
    return _rollout(*args)


def hbfs_plan(scenario: Scenario, config: HbfsConfig = HbfsConfig(),
              deps: PlanningDeps = PlanningDeps()) -> PlanResult:
    """Run ``parallel_width`` independent rollouts and keep the best one."""
    t0 = time.perf_counter()
    args = [(scenario, config, deps, lane) for lane in range(config.parallel_width)]
    if config.workers > 1 and config.parallel_width > 1:
        with ProcessPoolExecutor(min(config.workers, config.parallel_width)) as ex:
            lanes = list(ex.map(_rollout_args, args))
    else:
        lanes = [_rollout(*a) for a in args]

    def key(r: PlanResult):
        state = scenario.start
        for a in r.plan:
            state = state.moved(a.obj, a.final)
        return (not r.solved,) + progress_key(scenario, state, r.plan, deps.cost, deps.tol) + (r.stats["lane"],)

    best = min(lanes, key=key)
    stats = dict(best.stats)
    stats["plan_time"] = time.perf_counter() - t0
    stats["lanes_solved"] = sum(r.solved for r in lanes)
    stats["lanes"] = len(lanes)
    return PlanResult(best.plan, best.solved, stats)
