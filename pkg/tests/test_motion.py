import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import random_convex, square
from tabletop.geometry import CollisionChecker, ConvexPolygon, Pose2, WorkspaceRect, path_clear
from tabletop.motion import InvalidEndpoint, MotionConfig, _Planner, path_length, rrt_connect, se2_distance, shortcut

WS = WorkspaceRect()


def u_corridor():
    """A cup open to the left with the object inside; the goal lies behind its back wall."""
    wall = ConvexPolygon.rectangle(0.02, 0.30)
    lid = ConvexPolygon.rectangle(0.20, 0.02)
    obstacles = [(wall, Pose2(0.45, 0.26, 0)), (lid, Pose2(0.36, 0.40, 0)), (lid, Pose2(0.36, 0.12, 0))]
    return obstacles


def test_se2_distance_examples():
    a = Pose2(0.1, 0.2, 0.3)
    assert se2_distance(a, a) == 0
    assert se2_distance(Pose2(0, 0, 0), Pose2(0.3, 0.4, 0)) == pytest.approx(0.5)
    assert se2_distance(Pose2(0, 0, 0), Pose2(0, 0, math.pi), 0.05) == pytest.approx(0.05 * math.pi)


def test_path_length_examples():
    assert path_length([Pose2(0, 0, 0)]) == 0
    w = [Pose2(0, 0, 0), Pose2(0.3, 0, 0), Pose2(0.3, 0.4, 0)]
    assert path_length(w, 0.0) == pytest.approx(0.7)
    assert path_length(w[::-1], 0.0) == pytest.approx(0.7)


def test_straight_line_in_empty_workspace():
    obj = square(0.05)
    s, g = Pose2(0.1, 0.1, 0), Pose2(0.6, 0.4, 1.0)
    assert rrt_connect(obj, s, g, [], WS) == [s, g]


def test_invalid_endpoint():
    obj = square(0.05)
    obs = [(square(0.1), Pose2(0.5, 0.3, 0))]
    with pytest.raises(InvalidEndpoint):
        rrt_connect(obj, Pose2(0.1, 0.1, 0), Pose2(0.5, 0.3, 0), obs, WS)
    with pytest.raises(InvalidEndpoint):
        rrt_connect(obj, Pose2(0.5, 0.3, 0), Pose2(0.1, 0.1, 0), obs, WS)


def test_detour_around_u_corridor():
    obj = square(0.05)
    obs = u_corridor()
    s, g = Pose2(0.38, 0.26, 0), Pose2(0.6, 0.26, 0)
    path = rrt_connect(obj, s, g, obs, WS, MotionConfig(time_limit=2.0, max_nodes=20000),
                       np.random.default_rng(0))
    assert path is not None
    assert path[0] == s and path[-1] == g
    assert path_clear(obj, path, obs, WS, step=0.0005)
    assert path_length(path, 0.0) > s.xy_distance(g) + 1e-6


def test_deterministic_with_seed():
    obj = square(0.05)
    obs = u_corridor()
    cfg = MotionConfig(time_limit=None, max_nodes=5000)
    s, g = Pose2(0.38, 0.26, 0), Pose2(0.6, 0.26, 0)
    a = rrt_connect(obj, s, g, obs, WS, cfg, np.random.default_rng(9))
    b = rrt_connect(obj, s, g, obs, WS, cfg, np.random.default_rng(9))
    assert a == b and a is not None


def test_shortcut_never_lengthens():
    rng = np.random.default_rng(4)
    obj = square(0.04)
    pl = _Planner(obj, [], WS, MotionConfig())
    for _ in range(30):
        pts = [Pose2(*rng.uniform([0.05, 0.05, -3], [0.73, 0.47, 3])) for _ in range(6)]
        out = shortcut(pts, pl, rng, 20)
        assert out[0] == pts[0] and out[-1] == pts[-1]
        assert path_length(out) <= path_length(pts) + 1e-12


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**31))
def test_random_queries_pass_fine_oracle(seed):
    rng = np.random.default_rng(seed)
    obj = random_convex(rng, (0.03, 0.06))
    obs = [(random_convex(rng), Pose2(*rng.uniform([0.1, 0.1, -3], [0.68, 0.42, 3]))) for _ in range(4)]
    chk = CollisionChecker(obj, obs, WS)
    P = rng.uniform([0, 0, -3], [0.78, 0.52, 3], size=(500, 3))
    free = P[chk.poses_free(P)]
    if len(free) < 2:
        return
    s, g = Pose2(*free[0]), Pose2(*free[1])
    path = rrt_connect(obj, s, g, obs, WS, MotionConfig(time_limit=None, max_nodes=3000), rng)
    if path is not None:
        assert path[0] == s and path[-1] == g
        assert path_clear(obj, path, obs, WS, step=0.0005)


def test_completeness_probe_on_gap_walls():
    """A wall with a gap splits the table; start and goal lie on opposite sides."""
    rng = np.random.default_rng(21)
    ok = 0
    for _ in range(100):
        obj = random_convex(rng, (0.03, 0.06))
        r = obj.circumradius
        gap = 2 * r + rng.uniform(0.02, 0.06)
        wx = rng.uniform(0.3, 0.48)
        gy = rng.uniform(gap / 2, 0.52 - gap / 2)
        obs = []
        lo, hi = gy - gap / 2, gy + gap / 2
        if lo > 1e-3:
            obs.append((ConvexPolygon.rectangle(0.02, lo), Pose2(wx, lo / 2, 0)))
        if 0.52 - hi > 1e-3:
            obs.append((ConvexPolygon.rectangle(0.02, 0.52 - hi), Pose2(wx, (0.52 + hi) / 2, 0)))
        s = Pose2(rng.uniform(r, wx - 0.01 - r), rng.uniform(r, 0.52 - r), rng.uniform(-3, 3))
        g = Pose2(rng.uniform(wx + 0.01 + r, 0.78 - r), rng.uniform(r, 0.52 - r), rng.uniform(-3, 3))
        path = rrt_connect(obj, s, g, obs, WS, MotionConfig(time_limit=1.0, max_nodes=100000), rng)
        if path is not None:
            assert path_clear(obj, path, obs, WS, step=0.0005)
            ok += 1
    assert ok >= 95
