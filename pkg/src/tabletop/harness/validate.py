"""Independent plan checker.

Re-simulates a plan from the start state with its own pose interpolation
and shapely polygon intersection (not the SAT kernel the planners use), at
a resolution ten times finer than planning.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
import shapely

from ..geometry import DEFAULT_STEP
from ..world import CostModel, GoalTolerance, PickPlace, Push, Scenario, action_cost

AREA_TOL = 1e-9          # m^2; intersections below this are numerical contact
WS_TOL = 1e-9
START_TOL = 1e-6


@dataclass
class ValidationReport:
    goal_reached: bool = False
    violation_index: Optional[int] = None
    violation: Optional[str] = None
    costs: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.violation is None

    def __str__(self):
        if self.violation is not None:
            where = "start state" if self.violation_index is None else f"action {self.violation_index}"
            return f"violation at {where}: {self.violation}"
        return "goal reached" if self.goal_reached else "valid, goal not reached"


def _world(verts: np.ndarray, x, y, th) -> np.ndarray:
    x, y, th = np.atleast_1d(x), np.atleast_1d(y), np.atleast_1d(th)
    c, s = np.cos(th)[:, None], np.sin(th)[:, None]
    return np.stack([c * verts[None, :, 0] - s * verts[None, :, 1] + x[:, None],
                     s * verts[None, :, 0] + c * verts[None, :, 1] + y[:, None]], axis=-1)


def _wrap(a: float) -> float:
    return (a + math.pi) % (2 * math.pi) - math.pi


def _dense(waypoints, step: float, radius: float) -> np.ndarray:
    rows = [np.array([[waypoints[0].x, waypoints[0].y, waypoints[0].theta]])]
    for a, b in zip(waypoints[:-1], waypoints[1:]):
        dth = _wrap(b.theta - a.theta)
        n = max(1, math.ceil(max(math.hypot(b.x - a.x, b.y - a.y), abs(dth) * radius) / step))
        t = np.linspace(0.0, 1.0, n + 1)[1:]
        rows.append(np.column_stack([a.x + t * (b.x - a.x), a.y + t * (b.y - a.y), a.theta + t * dth]))
    return np.concatenate(rows)


class _Checker:
    def __init__(self, scenario: Scenario, ws_tol=WS_TOL, area_tol=AREA_TOL):
        self.sc = scenario
        self.verts = [np.asarray(o.footprint.vertices, dtype=float) for o in scenario.objects]
        self.radius = [float(np.linalg.norm(v, axis=1).max()) for v in self.verts]
        self.ws_tol, self.area_tol = ws_tol, area_tol

    def polys(self, oid: int, P: np.ndarray):
        return shapely.polygons(_world(self.verts[oid], P[:, 0], P[:, 1], P[:, 2]))

    def outside(self, oid: int, P: np.ndarray) -> np.ndarray:
        W = _world(self.verts[oid], P[:, 0], P[:, 1], P[:, 2])
        t, ws = self.ws_tol, self.sc.ws
        return ~((W[..., 0] >= -t) & (W[..., 0] <= ws.width + t)
                 & (W[..., 1] >= -t) & (W[..., 1] <= ws.height + t)).all(axis=1)

    def hits(self, oid: int, P: np.ndarray, poses: dict) -> Optional[int]:
        """Id of an object overlapped by ``oid`` at some pose in ``P``, else None."""
        moving = self.polys(oid, P)
        for j, q in poses.items():
            if j == oid:
                continue
            other = self.polys(j, np.array([q]))[0]
            area = shapely.area(shapely.intersection(moving, other))
            if (area > self.area_tol).any():
                return j
        return None


def validate_plan(scenario: Scenario, plan: list, tol: GoalTolerance = GoalTolerance(),
                  step: float = DEFAULT_STEP / 10, cost: CostModel = CostModel(),
                  allow_push_liftable: bool = True) -> ValidationReport:
    chk = _Checker(scenario)
    rep = ValidationReport()
    poses = {i: (p.x, p.y, p.theta) for i, p in enumerate(scenario.start.poses)}
    for i in poses:
        P = np.array([poses[i]])
        if chk.outside(i, P).any():
            rep.violation = f"object {i} starts outside the workspace"
            return rep
        j = chk.hits(i, P, {k: v for k, v in poses.items() if k > i})
        if j is not None:
            rep.violation = f"objects {i} and {j} overlap in the start state"
            return rep

    for idx, a in enumerate(plan):
        rep.violation_index = idx
        if not 0 <= a.obj < scenario.n:
            rep.violation = f"unknown object {a.obj}"
            return rep
        spec = scenario.objects[a.obj]
        cx, cy, ct = poses[a.obj]
        if math.hypot(a.pick.x - cx, a.pick.y - cy) > START_TOL or abs(_wrap(a.pick.theta - ct)) > START_TOL:
            rep.violation = f"action starts away from object {a.obj}'s current pose"
            return rep
        if isinstance(a, PickPlace):
            if not spec.liftable:
                rep.violation = f"illegal primitive: pick-n-place on push-only object {a.obj}"
                return rep
            P = np.array([[a.place.x, a.place.y, a.place.theta]])
        elif isinstance(a, Push):
            if spec.liftable and not allow_push_liftable:
                rep.violation = f"illegal primitive: push on liftable object {a.obj}"
                return rep
            P = _dense(a.waypoints, step, chk.radius[a.obj])
        else:
            rep.violation = f"unknown action type {type(a).__name__}"
            return rep
        if chk.outside(a.obj, P).any():
            rep.violation = f"object {a.obj} leaves the workspace"
            return rep
        j = chk.hits(a.obj, P, poses)
        if j is not None:
            rep.violation = f"object {a.obj} collides with object {j}"
            return rep
        f = a.final
        poses[a.obj] = (f.x, f.y, f.theta)
        rep.costs.append(action_cost(a, cost))
    rep.violation_index = None

    g = scenario.goal
    rep.goal_reached = all(
        math.hypot(poses[i][0] - g[i].x, poses[i][1] - g[i].y) <= tol.xy
        and abs(_wrap(poses[i][2] - g[i].theta)) <= tol.theta
        for i in range(scenario.n))
    return rep
