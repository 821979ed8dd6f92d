"""Planner results and helpers shared by both planners."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .motion import MotionConfig, path_length, rrt_connect
from .world import (
    ActionError,
    CostModel,
    Push,
    Scenario,
    WorldState,
    action_cost,
    apply_action,
    objects_at_goal,
    obstacles_for,
)


@dataclass
class PlanResult:
    plan: list
    solved: bool
    stats: dict[str, Any] = field(default_factory=dict)

    def cost(self, model: CostModel = CostModel()) -> float:
        return sum(action_cost(a, model) for a in self.plan)


def replay(scenario: Scenario, plan, **kw) -> WorldState:
    """Apply ``plan`` from the start state; raises ActionError on the first illegal action."""
    state = scenario.start
    for a in plan:
        state = apply_action(state, scenario, a, **kw)
    return state


def polish_plan(scenario: Scenario, plan: list, motion: MotionConfig = MotionConfig(),
                factor: float = 10.0, seed: int = 0) -> list:
    """Re-plan every push with a ``factor``-times larger budget, keeping the
    new path when it is shorter. Stands in for execution-time replanning."""
    cfg = motion.scaled(factor)
    rng = np.random.default_rng(seed)
    state = scenario.start
    out = []
    for a in plan:
        if isinstance(a, Push):
            obj = scenario.objects[a.obj].footprint
            path = rrt_connect(obj, a.pick, a.final, obstacles_for(state, scenario, a.obj),
                               scenario.ws, cfg, rng)
            if path is not None and path_length(path, cfg.theta_weight) < path_length(a.waypoints, cfg.theta_weight):
                cand = Push(a.obj, tuple(path))
                try:
                    apply_action(state, scenario, cand)
                    a = cand
                except ActionError:
                    pass
        state = apply_action(state, scenario, a)
        out.append(a)
    return out


def progress_key(scenario: Scenario, state: WorldState, plan, cost: CostModel, tol) -> tuple:
    """Ordering for partial results: more objects at goal, then cheaper."""
    return (-len(objects_at_goal(state, scenario, tol)), sum(action_cost(a, cost) for a in plan))
