import math

import numpy as np
import pytest

from tabletop.geometry import ConvexPolygon, Pose2, WorkspaceRect
from tabletop.world import ObjectClass, ObjectSpec, Scenario, WorldState


def square(side: float) -> ConvexPolygon:
    return ConvexPolygon.rectangle(side, side)


def make_scenario(specs, start, goal, ws=None, name="test") -> Scenario:
    """specs: list of (polygon, liftable) pairs; start/goal: lists of (x, y, theta)."""
    objects = tuple(ObjectSpec(i, poly, ObjectClass.LIFTABLE if lift else ObjectClass.PUSH_ONLY)
                    for i, (poly, lift) in enumerate(specs))
    return Scenario(objects, WorldState(tuple(Pose2(*p) for p in start)),
                    WorldState(tuple(Pose2(*p) for p in goal)), ws or WorkspaceRect(), name)


def random_convex(rng, radius=(0.03, 0.12)) -> ConvexPolygon:
    while True:
        n = int(rng.integers(3, 9))
        ang = np.sort(rng.uniform(0, 2 * math.pi, n))
        r = rng.uniform(*radius)
        pts = np.column_stack([r * np.cos(ang), r * rng.uniform(0.5, 1.0) * np.sin(ang)])
        try:
            poly = ConvexPolygon.from_points(pts)
        except ValueError:
            continue
        if poly.area > 1e-5:
            return poly


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def swap_scenario():
    """Two liftable boxes sitting on each other's goals."""
    s = square(0.1)
    return make_scenario([(s, True), (s, True)], [(0.2, 0.26, 0), (0.5, 0.26, 0)],
                         [(0.5, 0.26, 0), (0.2, 0.26, 0)])


def pytest_terminal_summary(terminalreporter):
    import sys
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
