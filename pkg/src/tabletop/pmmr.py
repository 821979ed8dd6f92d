"""Parallel Monte Carlo tree search over pick-n-place and push actions.

One coordinator owns the tree (selection, expansion bookkeeping,
backpropagation). The expensive part of an iteration, realizing the
expanded action (push motion planning) and the biased rollout, runs in a
worker process when ``workers > 1``. Virtual loss is added to every node on
the descent path before the work is handed out and removed on return.
"""
from __future__ import annotations

import heapq
import math
import time
from concurrent.futures import FIRST_COMPLETED, ProcessPoolExecutor, wait
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .plan import PlanResult
from .sampler import Candidate, PlanningDeps, Stage, candidates, direct_goal_pose, realize
from .world import (
    Action,
    ObjectClass,
    Scenario,
    WorldState,
    action_cost,
    apply_action,
    is_goal,
    objects_at_goal,
    poses_match,
)


class NoCandidates(RuntimeError):
    pass


@dataclass(frozen=True)
class RewardParams:
    r_o: float = 0.7
    push_mult: float = 1.1
    beta: float = 0.5
    gamma: float = 0.9
    k_top: int = 100
    c_ucb: float = 1.5
    use_base_reward: bool = True
    count_tree_cost: bool = True    # rollout cost starts at the root, not the leaf

    def __post_init__(self):
        if self.r_o <= 0 or not 0 < self.beta <= 1 or not 0 < self.gamma <= 1 or self.k_top < 1:
            raise ValueError("invalid reward parameters")

    def goal_reward(self, n_objects: int) -> float:
        return 2.0 * self.r_o * n_objects


@dataclass(frozen=True)
class PmmrConfig:
    step_budget: float = 40.0
    workers: int = 1
    max_actions: int = 20
    max_depth: Optional[int] = None         # None: 2 * n_objects + 2
    rng_seed: int = 0
    max_iterations: Optional[int] = None    # iteration cap; with time_limit=None in motion, bit-reproducible

    def __post_init__(self):
        if self.step_budget <= 0 or self.workers < 1 or self.max_actions < 1:
            raise ValueError("invalid PMMR configuration")

    def depth_cap(self, n_objects: int) -> int:
        return self.max_depth if self.max_depth is not None else 2 * n_objects + 2


class TopK:
    """Min-heap holding the k largest values pushed so far."""

    __slots__ = ("k", "heap")

    def __init__(self, k: int):
        self.k = k
        self.heap: list[float] = []

    def push(self, value: float) -> None:
        if len(self.heap) < self.k:
            heapq.heappush(self.heap, value)
        elif value > self.heap[0]:
            heapq.heapreplace(self.heap, value)

    def __len__(self):
        return len(self.heap)

    def values(self) -> list[float]:
        return sorted(self.heap, reverse=True)

    @property
    def sum(self) -> float:
        return math.fsum(self.heap)

    def mean(self) -> float:
        return self.sum / len(self.heap) if self.heap else 0.0


class SearchNode:
    __slots__ = ("state", "incoming", "parent", "depth", "cost", "N", "N_hat", "Q",
                 "children", "untried", "terminal", "order")

    def __init__(self, state: WorldState, *, incoming: Optional[Action] = None, parent=None,
                 depth: int = 0, cost: float = 0.0, k_top: int = 100, terminal: bool = False,
                 untried: Optional[list] = None, order: int = 0):
        self.state = state
        self.incoming = incoming
        self.parent = parent
        self.depth = depth
        self.cost = cost
        self.N = 0
        self.N_hat = 0
        self.Q = TopK(k_top)
        self.children: list[SearchNode] = []
        self.untried = list(untried or [])
        self.terminal = terminal
        self.order = order

    def __repr__(self):
        return f"SearchNode(depth={self.depth}, N={self.N}, N_hat={self.N_hat}, children={len(self.children)})"

    def mean_reward(self) -> float:
        return self.Q.mean()

    def size(self) -> int:
        return 1 + sum(c.size() for c in self.children)


# Formulas --------------------------------------------------------------------

def ucb_score(child: SearchNode, parent: SearchNode, c: float) -> float:
    n = child.N + child.N_hat
    if n <= 0:
        return math.inf
    return child.Q.sum / n + c * math.sqrt(2.0 * math.log(parent.N + parent.N_hat) / n)


def theta_sim(d: float) -> float:
    return min(1.0, max(-0.106 + 0.231 * d - 0.013 * d * d, 0.2))


def state_reward(state: WorldState, scenario: Scenario, params: RewardParams, tol) -> float:
    total = 0.0
    for oid in objects_at_goal(state, scenario, tol):
        push_only = scenario.objects[oid].cls is ObjectClass.PUSH_ONLY
        total += params.r_o * (params.push_mult if push_only else 1.0)
    return total


def step_reward(state: WorldState, scenario: Scenario, cost: float, base: float,
                params: RewardParams, tol) -> float:
    if is_goal(state, scenario, tol):
        return max(0.0, params.goal_reward(scenario.n) - cost - base)
    return max(0.0, state_reward(state, scenario, params, tol) - cost - base)


def rollout_return(rewards: Sequence[float], beta: float, gamma: float) -> float:
    """``max(beta * max(R_1..R_{m-1}), R_m) * gamma**m`` for ``rewards = R_1..R_m``."""
    m = len(rewards)
    if m == 0:
        raise ValueError("empty reward trace")
    head = beta * max(rewards[:-1]) if m > 1 else -math.inf
    return max(head, rewards[-1]) * gamma ** m


# Rollouts --------------------------------------------------------------------

@dataclass
class RolloutContext:
    scenario: Scenario
    deps: PlanningDeps
    params: RewardParams
    d_max: int


def _first_realized(cands: list[Candidate], state, ctx: RolloutContext, rng) -> Optional[Action]:
    for k in rng.permutation(len(cands)):
        a = realize(cands[k], state, ctx.scenario, ctx.deps.motion, rng)
        if a is not None:
            return a
    return None


def rollout_action(state: WorldState, depth: int, ctx: RolloutContext, rng) -> Optional[Action]:
    """Biased rollout policy: random with probability theta_sim(depth), else
    an action placing some object at its goal when one exists."""
    sc, cfg, tol = ctx.scenario, ctx.deps.sampler, ctx.deps.tol
    if rng.random() >= theta_sim(depth):
        direct = []
        for o in sc.objects:
            if poses_match(state[o.id], sc.goal[o.id], tol):
                continue
            g = direct_goal_pose(state, sc, o.id)
            if g is None:
                continue
            if o.liftable:
                direct.append(Candidate(o.id, g, "pick_place", True))
            if not o.liftable or cfg.push_liftable:
                direct.append(Candidate(o.id, g, "push", True))
        a = _first_realized(direct, state, ctx, rng)
        if a is not None:
            return a
    return _first_realized(candidates(state, sc, cfg, Stage.SIMULATION, rng), state, ctx, rng)


def simulate(state: WorldState, depth: int, cost: float, ctx: RolloutContext, base: float,
             rng: np.random.Generator) -> float:
    """Biased rollout from ``state``; returns the shaped, discounted reward."""
    sc, params, tol = ctx.scenario, ctx.params, ctx.deps.tol
    if is_goal(state, sc, tol) or depth >= ctx.d_max:
        return step_reward(state, sc, cost, base, params, tol)
    rewards = []
    for t in range(ctx.d_max - depth):
        a = rollout_action(state, depth + t, ctx, rng)
        if a is None:
            break
        state = state.moved(a.obj, a.final)
        cost += action_cost(a, ctx.deps.cost)
        rewards.append(step_reward(state, sc, cost, base, params, tol))
        if is_goal(state, sc, tol):
            break
    if not rewards:
        return step_reward(state, sc, cost, base, params, tol)
    return rollout_return(rewards, params.beta, params.gamma)


@dataclass
class _Task:
    state: WorldState
    depth: int
    cost: float
    cand: Optional[Candidate]
    base: float
    seed: tuple


@dataclass
class _Outcome:
    action: Optional[Action]
    child_state: Optional[WorldState]
    child_cost: float
    child_terminal: bool
    child_untried: list
    reward: float


def run_task(task: _Task, ctx: RolloutContext) -> _Outcome:
    rng = np.random.default_rng(list(task.seed))
    sc, deps = ctx.scenario, ctx.deps
    if task.cand is not None:
        a = realize(task.cand, task.state, sc, deps.motion, rng)
        if a is not None:
            child = task.state.moved(a.obj, a.final)
            cost = task.cost + action_cost(a, deps.cost)
            depth = task.depth + 1
            terminal = is_goal(child, sc, deps.tol)
            untried = [] if terminal or depth >= ctx.d_max else candidates(
                child, sc, deps.sampler, Stage.EXPANSION, rng)
            reward = simulate(child, depth, cost, ctx, task.base, rng)
            return _Outcome(a, child, cost, terminal, untried, reward)
    reward = simulate(task.state, task.depth, task.cost, ctx, task.base, rng)
    return _Outcome(None, None, 0.0, False, [], reward)


_WORKER_CTX: Optional[RolloutContext] = None


def _init_worker(ctx: RolloutContext) -> None:
    global _WORKER_CTX
    _WORKER_CTX = ctx


def _run_in_worker(task: _Task) -> _Outcome:
    return run_task(task, _WORKER_CTX)


# Tree operations ---------------------------------------------------------------

def select_and_expand(root: SearchNode, d_max: int, c: float) -> tuple[list[SearchNode], Optional[Candidate]]:
    """Descend by UCB and reserve the next untried candidate, if any.

    Returns the descent path (virtual loss already applied to every node on
    it) and the candidate to expand from the last node, or None when the last
    node is a leaf to simulate directly (terminal, at the depth cap, or with
    nothing left to try).
    """
    node = root
    path = [root]
    cand = None
    while True:
        if node.terminal or node.depth >= d_max:
            break
        if node.untried:
            cand = node.untried.pop(0)
            break
        if not node.children:
            break
        best, best_score = None, -math.inf
        for ch in node.children:
            s = ucb_score(ch, node, c)
            if s > best_score:
                best, best_score = ch, s
        node = best
        path.append(node)
    for n in path:
        n.N_hat += 1
    return path, cand


def backpropagate(path: Sequence[SearchNode], reward: float) -> None:
    for n in path:
        n.Q.push(reward)
        n.N += 1
        n.N_hat -= 1


def _revert(path: Sequence[SearchNode]) -> None:
    for n in path:
        n.N_hat -= 1


def _attach(path: list[SearchNode], out: _Outcome, k_top: int) -> list[SearchNode]:
    parent = path[-1]
    if out.action is None:
        return path
    child = SearchNode(out.child_state, incoming=out.action, parent=parent, depth=parent.depth + 1,
                       cost=out.child_cost, k_top=k_top, terminal=out.child_terminal,
                       untried=out.child_untried, order=len(parent.children))
    child.N_hat = 1
    parent.children.append(child)
    return path + [child]


def best_root_child(root: SearchNode) -> Optional[SearchNode]:
    """Highest mean retained reward; ties by visits, then creation order."""
    best = None
    for ch in root.children:
        key = (ch.mean_reward(), ch.N, -ch.order)
        if best is None or key > best[0]:
            best = (key, ch)
    return None if best is None else best[1]


@dataclass
class SearchInfo:
    iterations: int = 0
    tree_size: int = 0
    elapsed: float = 0.0
    root_children: int = 0


def pmmr_search(state: WorldState, scenario: Scenario, config: PmmrConfig = PmmrConfig(),
                params: RewardParams = RewardParams(), deps: PlanningDeps = PlanningDeps(), *,
                step_index: int = 0, executor: Optional[ProcessPoolExecutor] = None,
                info: Optional[SearchInfo] = None) -> Action:
    """One percept-plan-act decision: grow a fresh tree for ``step_budget``
    seconds (or ``max_iterations``) and return the best root action."""
    t0 = time.perf_counter()
    d_max = config.depth_cap(scenario.n)
    tol = deps.tol
    base = state_reward(state, scenario, params, tol) if params.use_base_reward else 0.0
    ctx = RolloutContext(scenario, deps, params, d_max)
    root_rng = np.random.default_rng([config.rng_seed, step_index, 0])
    root = SearchNode(state, k_top=params.k_top, terminal=is_goal(state, scenario, tol),
                      untried=candidates(state, scenario, deps.sampler, Stage.EXPANSION, root_rng))
    if not root.untried:
        raise NoCandidates("no candidate actions at the root")
    deadline = t0 + config.step_budget
    cap = config.max_iterations
    submitted = 0
    done = 0

    def make_task(path, cand):
        leaf = path[-1]
        cost = leaf.cost if params.count_tree_cost else 0.0
        return _Task(leaf.state, leaf.depth, cost, cand, base, (config.rng_seed, step_index, 1, submitted))

    def integrate(path, out):
        backpropagate(_attach(path, out, params.k_top), out.reward)

    if executor is None or config.workers <= 1:
        while time.perf_counter() < deadline and (cap is None or submitted < cap):
            path, cand = select_and_expand(root, d_max, params.c_ucb)
            task = make_task(path, cand)
            submitted += 1
            integrate(path, run_task(task, ctx))
            done += 1
    else:
        inflight = {}
        while True:
            while (len(inflight) < config.workers and time.perf_counter() < deadline
                   and (cap is None or submitted < cap)):
                path, cand = select_and_expand(root, d_max, params.c_ucb)
                fut = executor.submit(_run_in_worker, make_task(path, cand))
                submitted += 1
                inflight[fut] = path
            if not inflight:
                break
            remaining = deadline - time.perf_counter()
            finished, _ = wait(list(inflight), timeout=max(remaining, 0.0) if remaining > 0 else 0.5,
                               return_when=FIRST_COMPLETED)
            if not finished and remaining <= 0:
                for fut, path in inflight.items():
                    fut.cancel()
                    _revert(path)
                inflight.clear()
                break
            for fut in finished:
                path = inflight.pop(fut)
                integrate(path, fut.result())
                done += 1

    best = best_root_child(root)
    if info is not None:
        info.iterations = done
        info.tree_size = root.size()
        info.elapsed = time.perf_counter() - t0
        info.root_children = len(root.children)
    if best is not None:
        return best.incoming
    rng = np.random.default_rng([config.rng_seed, step_index, 2])
    for cand in root.untried:
        a = realize(cand, state, scenario, deps.motion, rng)
        if a is not None:
            return a
    raise NoCandidates("no legal action found at the root")


def pmmr_plan(scenario: Scenario, config: PmmrConfig = PmmrConfig(), params: RewardParams = RewardParams(),
              deps: PlanningDeps = PlanningDeps()) -> PlanResult:
    """Percept-plan-act loop until the goal is reached or ``max_actions`` is used up."""
    t0 = time.perf_counter()
    state = scenario.start
    plan: list[Action] = []
    steps = []
    executor = None
    if config.workers > 1:
        ctx = RolloutContext(scenario, deps, params, config.depth_cap(scenario.n))
        executor = ProcessPoolExecutor(config.workers, initializer=_init_worker, initargs=(ctx,))
    try:
        for k in range(config.max_actions):
            if is_goal(state, scenario, deps.tol):
                break
            info = SearchInfo()
            try:
                a = pmmr_search(state, scenario, config, params, deps, step_index=k,
                                executor=executor, info=info)
            except NoCandidates:
                break
            state = apply_action(state, scenario, a)
            plan.append(a)
            steps.append({"plan_time": info.elapsed, "iterations": info.iterations,
                          "tree_size": info.tree_size, "root_children": info.root_children})
    finally:
        if executor is not None:
            executor.shutdown(cancel_futures=True)
    solved = is_goal(state, scenario, deps.tol)
    stats = {"plan_time": time.perf_counter() - t0, "steps": steps,
             "objects_at_goal": len(objects_at_goal(state, scenario, deps.tol))}
    return PlanResult(plan, solved, stats)
