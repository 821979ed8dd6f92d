import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import random_convex, square
from tabletop.geometry import (
    CollisionChecker,
    ConvexPolygon,
    MalformedPath,
    Pose2,
    WorkspaceRect,
    convex_hull,
    inside_workspace,
    interpolate,
    overlap,
    path_clear,
    separation,
    sweep_clear,
    transform,
    wrap_angle,
)

WS = WorkspaceRect()


# oracles ----------------------------------------------------------------------

def rot_oracle(poly, pose):
    """Per-vertex 2x2 rotation matrix, then translation."""
    R = np.array([[math.cos(pose.theta), -math.sin(pose.theta)],
                  [math.sin(pose.theta), math.cos(pose.theta)]])
    return np.array([R @ np.array(v) + np.array([pose.x, pose.y]) for v in poly.vertices])


def inside_pts(W, pts):
    """Strict point membership in a CCW convex polygon by half-planes."""
    ok = np.ones(len(pts), dtype=bool)
    for i in range(len(W)):
        a, b = W[i], W[(i + 1) % len(W)]
        cross = (b[0] - a[0]) * (pts[:, 1] - a[1]) - (b[1] - a[1]) * (pts[:, 0] - a[0])
        ok &= cross > 0
    return ok


def mc_overlap(pa, qa, pb, qb, rng, n=20000):
    A, B = transform(pa, qa), transform(pb, qb)
    lo = np.maximum(A.min(axis=0), B.min(axis=0))
    hi = np.minimum(A.max(axis=0), B.max(axis=0))
    if (hi <= lo).any():
        return False
    pts = rng.uniform(lo, hi, size=(n, 2))
    return bool((inside_pts(A, pts) & inside_pts(B, pts)).any())


# poses and polygons ------------------------------------------------------------

def test_pose_wraps_theta():
    assert Pose2(0, 0, 3 * math.pi).theta == pytest.approx(math.pi)
    assert Pose2(0, 0, -math.pi).theta == pytest.approx(math.pi)
    assert -math.pi < wrap_angle(-math.pi + 1e-12) <= math.pi


def test_pose_rejects_nonfinite():
    with pytest.raises(ValueError):
        Pose2(math.nan, 0, 0)


def test_polygon_validation():
    with pytest.raises(ValueError):
        ConvexPolygon(((0.1, 0), (-0.1, 0), (0, 0.1)))  # clockwise and off-centre
    with pytest.raises(ValueError):
        ConvexPolygon(((-1, 0), (0, 0), (1, 0)))
    with pytest.raises(ValueError):
        ConvexPolygon(((0, 0), (1, 0), (1, 1), (0, 1)))  # centroid not at origin
    sq = square(0.1)
    assert len(sq) == 4 and sq.area == pytest.approx(0.01)


def test_from_points_hulls_and_centres():
    pts = [(0, 0), (2, 0), (2, 2), (0, 2), (1, 1), (1, 0)]
    poly = ConvexPolygon.from_points(pts)
    assert len(poly) == 4
    assert np.allclose(poly.array.mean(axis=0), 0)
    assert len(convex_hull(pts)) == 4


def test_transform_identity_and_pi():
    sq = square(1.0)
    assert np.allclose(transform(sq, Pose2(0, 0, 0)), sq.array)
    assert np.allclose(transform(sq, Pose2(0, 0, math.pi)), -sq.array)


def test_transform_matches_matrix_oracle():
    tri = ConvexPolygon(((-0.1, -0.05), (0.1, -0.05), (0.0, 0.1)))
    pose = Pose2(0.2, 0.1, math.pi / 2)
    assert np.allclose(transform(tri, pose), rot_oracle(tri, pose), atol=1e-12)
    # rotate-then-translate by hand for one vertex: (0.1, -0.05) -> (0.05, 0.1) + (0.2, 0.1)
    assert np.allclose(transform(tri, pose)[1], [0.25, 0.2])


@given(st.floats(-1, 1), st.floats(-1, 1), st.floats(-10, 10))
def test_transform_inverse_roundtrip(x, y, th):
    poly = ConvexPolygon.regular(5, 0.1, 0.3)
    pose = Pose2(x, y, th)
    W = transform(poly, pose)
    inv = pose.inverse()
    back = np.array([[math.cos(inv.theta) * p[0] - math.sin(inv.theta) * p[1] + inv.x,
                      math.sin(inv.theta) * p[0] + math.cos(inv.theta) * p[1] + inv.y] for p in W])
    assert np.allclose(back, poly.array, atol=1e-9)


# overlap ------------------------------------------------------------------------

def test_overlap_examples(rng):
    sq = square(1.0)
    assert not overlap(sq, Pose2(0, 0, 0), sq, Pose2(2, 0, 0))
    assert overlap(sq, Pose2(0, 0, 0), sq, Pose2(0, 0, 0))
    b = Pose2(0.5, 0.5, math.pi / 4)
    assert overlap(sq, Pose2(0, 0, 0), sq, b) == mc_overlap(sq, Pose2(0, 0, 0), sq, b, rng, 100000)
    assert overlap(sq, Pose2(0, 0, 0), sq, b)


def test_touching_is_not_overlap():
    sq = square(1.0)
    assert not overlap(sq, Pose2(0, 0, 0), sq, Pose2(1.0, 0, 0))
    assert not overlap(sq, Pose2(0, 0, 0), sq, Pose2(1.0 - 5e-10, 0, 0))
    assert overlap(sq, Pose2(0, 0, 0), sq, Pose2(1.0 - 1e-6, 0, 0))


def test_sat_agrees_with_point_sampling_oracle():
    rng = np.random.default_rng(7)
    disagreements = 0
    checked = 0
    for _ in range(1000):
        pa, pb = random_convex(rng), random_convex(rng)
        qa = Pose2(0.3, 0.3, rng.uniform(-math.pi, math.pi))
        d = rng.uniform(0, pa.circumradius + pb.circumradius)
        phi = rng.uniform(0, 2 * math.pi)
        qb = Pose2(0.3 + d * math.cos(phi), 0.3 + d * math.sin(phi), rng.uniform(-math.pi, math.pi))
        if abs(separation(pa, qa, pb, qb)) < 1e-6:
            continue
        checked += 1
        disagreements += overlap(pa, qa, pb, qb) != mc_overlap(pa, qa, pb, qb, rng)
    assert checked > 950
    assert disagreements == 0


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 2**31), st.floats(-0.3, 0.3), st.floats(-0.3, 0.3), st.floats(-4, 4),
       st.floats(-1, 1), st.floats(-1, 1), st.floats(-4, 4))
def test_overlap_symmetric_and_rigid_invariant(seed, x, y, th, tx, ty, tth):
    rng = np.random.default_rng(seed)
    pa, pb = random_convex(rng), random_convex(rng)
    qa, qb = Pose2(0, 0, 0.2), Pose2(x, y, th)
    res = overlap(pa, qa, pb, qb)
    assert res == overlap(pb, qb, pa, qa)
    if abs(separation(pa, qa, pb, qb)) > 1e-7:
        g = Pose2(tx, ty, tth)
        assert res == overlap(pa, g.compose(qa), pb, g.compose(qb))


# workspace and paths ------------------------------------------------------------------

def test_inside_workspace_examples():
    sq = square(0.1)
    assert inside_workspace(sq, Pose2(0.39, 0.26, 0), WS)
    assert not inside_workspace(sq, Pose2(0.04, 0.26, 0), WS)
    assert inside_workspace(sq, Pose2(0.05, 0.26, 0), WS)


def test_path_clear_examples():
    sq = square(0.05)
    path = [Pose2(0.2, 0.26, 0), Pose2(0.5, 0.26, 0)]
    assert path_clear(sq, path, [], WS)
    assert not path_clear(sq, path, [(square(0.05), Pose2(0.35, 0.26, 0))], WS)
    with pytest.raises(MalformedPath):
        path_clear(sq, path[:1], [], WS)


def test_grazing_pass_matches_fine_oracle():
    sq = square(0.05)
    obs = [(square(0.05), Pose2(0.35, 0.26 + 0.05 + 0.002, 0))]
    path = [Pose2(0.2, 0.26, 0), Pose2(0.5, 0.26, 0.02)]
    coarse = path_clear(sq, path, obs, WS, step=0.001)
    fine = path_clear(sq, path, obs, WS, step=0.0001)
    assert coarse == fine


def test_interpolation_spacing_and_endpoints():
    a, b = Pose2(0.1, 0.1, 3.0), Pose2(0.4, 0.3, -3.0)
    P = interpolate([a, b], 0.005, 0.1)
    assert np.allclose(P[0], a.as_tuple()) and np.allclose(P[-1], b.as_tuple())
    d = np.diff(P, axis=0)
    assert np.hypot(d[:, 0], d[:, 1]).max() <= 0.005 + 1e-12
    dth = np.abs((d[:, 2] + math.pi) % (2 * math.pi) - math.pi)
    assert dth.max() <= 0.005 / 0.1 + 1e-12
    # shortest arc through +-pi, not the long way round
    assert dth.sum() == pytest.approx(2 * math.pi - 6.0)


def test_resolution_monotonicity():
    """Poses checked at a coarse step are a subset of those at a finer one."""
    rng = np.random.default_rng(3)
    for _ in range(20):
        pts = [Pose2(*rng.uniform([0, 0, -3], [0.78, 0.52, 3])) for _ in range(3)]
        fine = {tuple(np.round(p, 12)) for p in interpolate(pts, 0.001, 0.08)}
        coarse = {tuple(np.round(p, 12)) for p in interpolate(pts, 0.004, 0.08)}
        assert coarse <= fine


def test_path_clear_monotone_in_resolution():
    rng = np.random.default_rng(11)
    obj = ConvexPolygon.regular(4, 0.04)
    for _ in range(50):
        obs = [(random_convex(rng), Pose2(*rng.uniform([0.1, 0.1, -3], [0.68, 0.42, 3]))) for _ in range(3)]
        path = [Pose2(*rng.uniform([0.05, 0.05, -3], [0.73, 0.47, 3])) for _ in range(2)]
        if path_clear(obj, path, obs, WS, step=0.0025):
            assert path_clear(obj, path, obs, WS, step=0.005)


def test_sweep_clear_implies_fine_path_clear():
    rng = np.random.default_rng(5)
    obj = ConvexPolygon.regular(3, 0.05)
    hits = 0
    for _ in range(150):
        obs = [(random_convex(rng), Pose2(*rng.uniform([0.1, 0.1, -3], [0.68, 0.42, 3]))) for _ in range(3)]
        path = [Pose2(*rng.uniform([0.06, 0.06, -3], [0.72, 0.46, 3])) for _ in range(2)]
        try:
            ok = sweep_clear(obj, path, obs, WS)
        except MalformedPath:
            continue
        if ok:
            hits += 1
            assert path_clear(obj, path, obs, WS, step=0.0005)
    assert hits > 10


def test_checker_batch_matches_scalar():
    rng = np.random.default_rng(2)
    obj = random_convex(rng)
    obs = [(random_convex(rng), Pose2(*rng.uniform([0, 0, -3], [0.78, 0.52, 3]))) for _ in range(5)]
    chk = CollisionChecker(obj, obs, WS)
    P = rng.uniform([0, 0, -3], [0.78, 0.52, 3], size=(400, 3))
    batch = chk.poses_free(P)
    for row, ok in zip(P, batch):
        pose = Pose2(*row)
        ref = inside_workspace(obj, pose, WS) and not any(overlap(obj, pose, p, q) for p, q in obs)
        assert ok == ref
