"""Tabletop rearrangement with pick-n-place and push.

Geometry and world model, RRT-connect push paths, an action sampler, and
two planners: the PMMR tree search and the HBFS greedy baseline.
"""
from .geometry import ConvexPolygon, Pose2, WorkspaceRect, inside_workspace, overlap, path_clear, transform
from .hbfs import DeadEnd, HbfsConfig, hbfs_plan, hbfs_step
from .motion import MotionConfig, rrt_connect
from .plan import PlanResult, replay
from .pmmr import NoCandidates, PmmrConfig, RewardParams, pmmr_plan, pmmr_search
from .sampler import PlanningDeps, SamplerConfig
from .world import (
    ActionError,
    CostModel,
    GoalTolerance,
    ObjectClass,
    ObjectSpec,
    PickPlace,
    Push,
    Scenario,
    WorldState,
    action_cost,
    apply_action,
    estimate_execution_time,
    is_goal,
    objects_at_goal,
)

__version__ = "0.1.0"

__all__ = [
    "ActionError", "ConvexPolygon", "CostModel", "DeadEnd", "GoalTolerance", "HbfsConfig", "MotionConfig",
    "NoCandidates", "ObjectClass", "ObjectSpec", "PickPlace", "PlanResult", "PlanningDeps", "PmmrConfig",
    "Pose2", "Push", "RewardParams", "SamplerConfig", "Scenario", "WorkspaceRect", "WorldState",
    "action_cost", "apply_action", "estimate_execution_time", "hbfs_plan", "hbfs_step", "inside_workspace",
    "is_goal", "objects_at_goal", "overlap", "path_clear", "pmmr_plan", "pmmr_search", "replay",
    "rrt_connect", "transform",
]
