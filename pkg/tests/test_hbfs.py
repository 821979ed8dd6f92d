from dataclasses import replace

import numpy as np
import pytest
import shapely

from conftest import make_scenario, square
from tabletop.geometry import ConvexPolygon, transform
from tabletop.harness.scenarios import GenConfig, generate_scenario
from tabletop.harness.validate import validate_plan
from tabletop.hbfs import DeadEnd, HbfsConfig, hbfs_plan, hbfs_step
from tabletop.plan import replay
from tabletop.sampler import PlanningDeps, direct_goal_pose
from tabletop.world import PickPlace, apply_action, is_goal, poses_match


def overlap_area(a_poly, a_pose, b_poly, b_pose):
    return shapely.Polygon(transform(a_poly, a_pose)).intersection(shapely.Polygon(transform(b_poly, b_pose))).area


def test_single_object_direct_goal():
    sc = make_scenario([(square(0.06), True)], [(0.15, 0.15, 0)], [(0.6, 0.35, 0.5)])
    info = {}
    a = hbfs_step(sc.start, sc, rng=np.random.default_rng(0), info=info)
    assert info["level"] == 1 and a == PickPlace(0, sc.start[0], sc.goal[0])


def test_l1_tie_goes_to_lowest_id():
    s = square(0.06)
    sc = make_scenario([(s, True), (s, True)], [(0.1, 0.1, 0), (0.1, 0.4, 0)], [(0.4, 0.1, 0), (0.4, 0.4, 0)])
    a = hbfs_step(sc.start, sc, rng=np.random.default_rng(0))
    assert a.obj == 0 and a.final == sc.goal[0]


def test_l1_returns_cheapest():
    s = square(0.06)
    sc = make_scenario([(s, True), (s, True)], [(0.1, 0.1, 0), (0.1, 0.4, 0)], [(0.6, 0.1, 0), (0.3, 0.4, 0)])
    a = hbfs_step(sc.start, sc, rng=np.random.default_rng(0))
    assert a.obj == 1


def test_swap_l2_reduces_blocker_overlap(swap_scenario):
    sc = swap_scenario
    info = {}
    a = hbfs_step(sc.start, sc, rng=np.random.default_rng(0), info=info)
    assert info["level"] == 2
    other = 1 - a.obj
    fp_goal = sc.objects[other].footprint
    before = overlap_area(fp_goal, sc.goal[other], sc.objects[a.obj].footprint, sc.start[a.obj])
    after = overlap_area(fp_goal, sc.goal[other], sc.objects[a.obj].footprint, a.final)
    assert after < before


def test_l1_priority_property():
    """A liftable object with a clear goal forces level 1, which lands some object exactly on its goal."""
    rng = np.random.default_rng(5)
    tol = PlanningDeps().tol
    for k in range(3):
        sc, _ = generate_scenario(4, GenConfig(), np.random.default_rng([9, k]))
        state = sc.start
        for _ in range(6):
            if is_goal(state, sc):
                break
            liftable_clear = any(sc.objects[i].liftable and not poses_match(state[i], sc.goal[i], tol)
                                 and direct_goal_pose(state, sc, i) is not None for i in range(sc.n))
            info = {}
            a = hbfs_step(state, sc, rng=rng, info=info)
            if liftable_clear:
                assert info["level"] == 1
            if info["level"] == 1:
                assert a.final == sc.goal[a.obj]
            state = apply_action(state, sc, a)


def test_dead_end():
    s = square(0.06)
    wall_v = ConvexPolygon.rectangle(0.02, 0.1)
    wall_h = ConvexPolygon.rectangle(0.1, 0.02)
    sc = make_scenario([(s, False), (wall_v, False), (wall_v, False), (wall_h, False), (wall_h, False)],
                       [(0.4, 0.26, 0), (0.36, 0.26, 0), (0.44, 0.26, 0), (0.4, 0.22, 0), (0.4, 0.30, 0)],
                       [(0.1, 0.1, 0), (0.36, 0.26, 0), (0.44, 0.26, 0), (0.4, 0.22, 0), (0.4, 0.30, 0)])
    with pytest.raises(DeadEnd):
        hbfs_step(sc.start, sc, rng=np.random.default_rng(0))
    res = hbfs_plan(sc)
    assert not res.solved and res.plan == []


def test_already_solved():
    sc = make_scenario([(square(0.06), True)], [(0.15, 0.15, 0)], [(0.15, 0.15, 0)])
    res = hbfs_plan(sc)
    assert res.solved and res.plan == []


def test_generated_case_solved_and_valid():
    sc, _ = generate_scenario(4, GenConfig(), np.random.default_rng([0, 4, 0]))
    res = hbfs_plan(sc, HbfsConfig(parallel_width=4))
    assert res.solved and len(res.plan) <= 20
    assert is_goal(replay(sc, res.plan), sc)
    assert validate_plan(sc, res.plan).goal_reached


def test_deterministic_width_one():
    sc, _ = generate_scenario(4, GenConfig(), np.random.default_rng([0, 4, 1]))
    deps = PlanningDeps()
    deps = replace(deps, motion=replace(deps.motion, time_limit=None, max_nodes=1000))
    a = hbfs_plan(sc, HbfsConfig(rng_seed=4), deps)
    b = hbfs_plan(sc, HbfsConfig(rng_seed=4), deps)
    assert a.plan == b.plan and a.solved == b.solved


def test_forced_chain_exceeds_action_budget():
    """A line of boxes each parked on the next one's goal needs more moves than allowed."""
    s = square(0.06)
    n = 6
    start = [(0.08 + 0.1 * i, 0.26, 0) for i in range(n)]
    goal = [(0.08 + 0.1 * (i + 1), 0.26, 0) for i in range(n - 1)] + [(0.08, 0.26, 0)]
    sc = make_scenario([(s, True)] * n, start, goal)
    res = hbfs_plan(sc, HbfsConfig(max_actions=3))
    assert not res.solved and len(res.plan) == 3
    assert "objects_at_goal" in res.stats and "levels" in res.stats


def test_config_validation():
    with pytest.raises(ValueError):
        HbfsConfig(max_actions=0)
    with pytest.raises(ValueError):
        HbfsConfig(parallel_width=0)
