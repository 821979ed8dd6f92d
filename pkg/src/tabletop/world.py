"""Kinematic tabletop world: objects, scenarios, the two primitives, costs and
goal predicates."""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence, Union

from .geometry import (
    DEFAULT_STEP,
    ConvexPolygon,
    MalformedPath,
    Pose2,
    WorkspaceRect,
    angle_diff,
    inside_workspace,
    overlap,
    sweep_clear,
)


class ObjectClass(enum.Enum):
    LIFTABLE = "liftable"
    PUSH_ONLY = "push_only"


@dataclass(frozen=True)
class ObjectSpec:
    id: int
    footprint: ConvexPolygon
    cls: ObjectClass = ObjectClass.LIFTABLE

    @property
    def liftable(self) -> bool:
        return self.cls is ObjectClass.LIFTABLE


@dataclass(frozen=True)
class WorldState:
    """Poses indexed by object id (ids are contiguous from 0)."""

    poses: tuple[Pose2, ...]

    def __getitem__(self, oid: int) -> Pose2:
        return self.poses[oid]

    def __len__(self):
        return len(self.poses)

    def moved(self, oid: int, pose: Pose2) -> "WorldState":
        p = list(self.poses)
        p[oid] = pose
        return WorldState(tuple(p))

    @classmethod
    def from_mapping(cls, poses: Mapping[int, Pose2]) -> "WorldState":
        ids = sorted(poses)
        if ids != list(range(len(ids))):
            raise ValueError("object ids must be contiguous from 0")
        return cls(tuple(poses[i] for i in ids))


@dataclass(frozen=True)
class GoalTolerance:
    xy: float = 0.005
    theta: float = math.radians(2.0)


@dataclass(frozen=True)
class Scenario:
    objects: tuple[ObjectSpec, ...]
    start: WorldState
    goal: WorldState
    ws: WorkspaceRect = field(default_factory=WorkspaceRect)
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "objects", tuple(self.objects))
        if [o.id for o in self.objects] != list(range(len(self.objects))):
            raise ValueError("object ids must be unique and contiguous from 0")
        if len(self.start) != len(self.objects) or len(self.goal) != len(self.objects):
            raise ValueError("start and goal must give one pose per object")

    @property
    def n(self) -> int:
        return len(self.objects)

    def validate(self) -> None:
        """Raise ValueError if start or goal is not collision-free and contained."""
        for label, st in (("start", self.start), ("goal", self.goal)):
            bad = state_violations(st, self)
            if bad:
                raise ValueError(f"{label} state invalid: {bad[0]}")


# Actions ---------------------------------------------------------------------

@dataclass(frozen=True)
class PickPlace:
    obj: int
    pick: Pose2
    place: Pose2

    kind = "pick_place"

    @property
    def final(self) -> Pose2:
        return self.place


@dataclass(frozen=True)
class Push:
    obj: int
    waypoints: tuple[Pose2, ...]

    kind = "push"

    def __post_init__(self):
        object.__setattr__(self, "waypoints", tuple(self.waypoints))
        if len(self.waypoints) < 2:
            raise MalformedPath("a push needs at least two waypoints")

    @property
    def pick(self) -> Pose2:
        return self.waypoints[0]

    @property
    def final(self) -> Pose2:
        return self.waypoints[-1]


Action = Union[PickPlace, Push]


class ActionError(ValueError):
    pass


class InvalidPrimitive(ActionError):
    pass


class CollisionAtPlace(ActionError):
    pass


class PathBlocked(ActionError):
    pass


class OutOfWorkspace(ActionError):
    pass


class StaleAction(ActionError):
    """The action's start pose does not match the object's current pose."""


def poses_match(a: Pose2, b: Pose2, tol: GoalTolerance) -> bool:
    return a.xy_distance(b) <= tol.xy and abs(angle_diff(a.theta, b.theta)) <= tol.theta


def obstacles_for(state: WorldState, scenario: Scenario, exclude: int) -> list[tuple[ConvexPolygon, Pose2]]:
    return [(o.footprint, state[o.id]) for o in scenario.objects if o.id != exclude]


def apply_action(state: WorldState, scenario: Scenario, action: Action, *,
                 step: float = DEFAULT_STEP, allow_push_liftable: bool = True,
                 start_tol: GoalTolerance = GoalTolerance(1e-6, 1e-6)) -> WorldState:
    """Return the successor state or raise an ActionError subclass."""
    if not 0 <= action.obj < scenario.n:
        raise InvalidPrimitive(f"unknown object {action.obj}")
    spec = scenario.objects[action.obj]
    if not poses_match(action.pick, state[action.obj], start_tol):
        raise StaleAction(f"object {action.obj} is not at the action's start pose")
    final = action.final
    if isinstance(action, PickPlace):
        if not spec.liftable:
            raise InvalidPrimitive(f"object {action.obj} cannot be lifted")
        if not inside_workspace(spec.footprint, final, scenario.ws):
            raise OutOfWorkspace(f"place pose of object {action.obj} leaves the workspace")
        for o in scenario.objects:
            if o.id != action.obj and overlap(spec.footprint, final, o.footprint, state[o.id]):
                raise CollisionAtPlace(f"object {action.obj} placed onto object {o.id}")
    elif isinstance(action, Push):
        if spec.liftable and not allow_push_liftable:
            raise InvalidPrimitive(f"pushing liftable object {action.obj} is disabled")
        for w in action.waypoints:
            if not inside_workspace(spec.footprint, w, scenario.ws):
                raise OutOfWorkspace(f"push waypoint of object {action.obj} leaves the workspace")
        obstacles = obstacles_for(state, scenario, action.obj)
        if not sweep_clear(spec.footprint, action.waypoints, obstacles, scenario.ws, step):
            raise PathBlocked(f"push path of object {action.obj} is obstructed")
    else:
        raise InvalidPrimitive(f"unknown action type {type(action).__name__}")
    return state.moved(action.obj, final)


# Costs -----------------------------------------------------------------------

@dataclass(frozen=True)
class CostModel:
    fixed_pp: float = 0.5
    fixed_pt: float = 0.3
    dist_weight_pp: float = 1.0
    dist_weight_pt: float = 1.5
    rot_weight: float = 0.1

    def __post_init__(self):
        if min(self.fixed_pp, self.fixed_pt, self.dist_weight_pp, self.dist_weight_pt, self.rot_weight) < 0:
            raise ValueError("cost constants must be nonnegative")


def push_translation(waypoints: Sequence[Pose2]) -> float:
    return sum(a.xy_distance(b) for a, b in zip(waypoints[:-1], waypoints[1:]))


def push_rotation(waypoints: Sequence[Pose2]) -> float:
    return sum(abs(angle_diff(a.theta, b.theta)) for a, b in zip(waypoints[:-1], waypoints[1:]))


def action_cost(action: Action, model: CostModel = CostModel()) -> float:
    if isinstance(action, PickPlace):
        return model.fixed_pp + model.dist_weight_pp * action.pick.xy_distance(action.place)
    return (model.fixed_pt + model.dist_weight_pt * push_translation(action.waypoints)
            + model.rot_weight * push_rotation(action.waypoints))


def plan_cost(plan: Iterable[Action], model: CostModel = CostModel()) -> float:
    return sum(action_cost(a, model) for a in plan)


@dataclass(frozen=True)
class ExecTimeModel:
    """Modeled robot execution time; overhead in seconds, speed in m/s."""

    overhead_pp: float = 2.0
    speed_pp: float = 0.25
    overhead_pt: float = 1.5
    speed_pt: float = 0.1


def estimate_execution_time(plan: Iterable[Action], model: ExecTimeModel = ExecTimeModel()) -> float:
    total = 0.0
    for a in plan:
        if isinstance(a, PickPlace):
            total += model.overhead_pp + a.pick.xy_distance(a.place) / model.speed_pp
        else:
            total += model.overhead_pt + push_translation(a.waypoints) / model.speed_pt
    return total


# Goal predicates ---------------------------------------------------------------

def objects_at_goal(state: WorldState, scenario: Scenario, tol: GoalTolerance = GoalTolerance()) -> set[int]:
    return {o.id for o in scenario.objects if poses_match(state[o.id], scenario.goal[o.id], tol)}


def is_goal(state: WorldState, scenario: Scenario, tol: GoalTolerance = GoalTolerance()) -> bool:
    return all(poses_match(state[o.id], scenario.goal[o.id], tol) for o in scenario.objects)


def goal_blockers(state: WorldState, scenario: Scenario, oid: int) -> set[int]:
    fp, g = scenario.objects[oid].footprint, scenario.goal[oid]
    return {o.id for o in scenario.objects
            if o.id != oid and overlap(fp, g, o.footprint, state[o.id])}


def state_violations(state: WorldState, scenario: Scenario) -> list[str]:
    """Pairwise overlaps and workspace exits in a state (empty list if valid)."""
    out = []
    objs = scenario.objects
    for o in objs:
        if not inside_workspace(o.footprint, state[o.id], scenario.ws):
            out.append(f"object {o.id} outside workspace")
    for i in range(len(objs)):
        for j in range(i + 1, len(objs)):
            if overlap(objs[i].footprint, state[i], objs[j].footprint, state[j]):
                out.append(f"objects {i} and {j} overlap")
    return out
