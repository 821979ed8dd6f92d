"""Benchmark runner: (scenario, trial) cells, validation, aggregate tables."""
from __future__ import annotations

import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path
from typing import Optional, Sequence

from ..hbfs import HbfsConfig, hbfs_plan
from ..plan import polish_plan
from ..pmmr import PmmrConfig, RewardParams, pmmr_plan
from ..sampler import PlanningDeps
from ..world import Scenario, estimate_execution_time
from .validate import validate_plan

WORKERS_ENV = "TABLETOP_WORKERS"


def env_workers(default: int) -> int:
    """Worker count, overridden by the TABLETOP_WORKERS environment variable."""
    v = os.environ.get(WORKERS_ENV)
    if not v:
        return default
    n = int(v)
    if n < 1:
        raise ValueError(f"{WORKERS_ENV} must be >= 1")
    return n


@dataclass(frozen=True)
class PlannerSpec:
    """Named planner configuration. ``budget`` is the PMMR per-step time
    budget in seconds; HBFS ignores it."""
    name: str
    kind: str                               # "pmmr" or "hbfs"
    budget: float = 40.0
    workers: int = 1
    max_actions: int = 20
    max_depth: Optional[int] = None
    use_base_reward: bool = True
    max_iterations: Optional[int] = None
    parallel_width: int = 1
    deps: PlanningDeps = field(default_factory=PlanningDeps)
    params: RewardParams = field(default_factory=RewardParams)
    polish: bool = True                     # re-plan pushes with 10x budget after planning

    def __post_init__(self):
        if self.kind not in ("pmmr", "hbfs"):
            raise ValueError(f"unknown planner kind {self.kind!r}")

    def run(self, scenario: Scenario, seed: int):
        deps = replace(self.deps, sampler=replace(self.deps.sampler, rng_seed=seed),
                       motion=replace(self.deps.motion, rng_seed=seed))
        if self.kind == "hbfs":
            cfg = HbfsConfig(max_actions=self.max_actions, parallel_width=self.parallel_width,
                             rng_seed=seed, workers=self.workers)
            res = hbfs_plan(scenario, cfg, deps)
        else:
            cfg = PmmrConfig(step_budget=self.budget, workers=self.workers, max_actions=self.max_actions,
                             max_depth=self.max_depth, rng_seed=seed, max_iterations=self.max_iterations)
            params = replace(self.params, use_base_reward=self.use_base_reward)
            res = pmmr_plan(scenario, cfg, params, deps)
        res.stats["polished"] = self.polish
        if self.polish and res.plan:
            res.plan = polish_plan(scenario, res.plan, deps.motion, seed=seed)
        return res


def pmmr_spec(budget: float = 40.0, **kw) -> PlannerSpec:
    """PMMR-<budget> with optional ablation switches in the name."""
    name = f"pmmr-{budget:g}"
    if kw.get("max_depth") is not None:
        name += f"-d{kw['max_depth']}"
    if kw.get("use_base_reward") is False:
        name += "-norb"
    return PlannerSpec(kw.pop("name", name), "pmmr", budget, **kw)


def hbfs_spec(**kw) -> PlannerSpec:
    return PlannerSpec(kw.pop("name", "hbfs"), "hbfs", **kw)


@dataclass
class BenchmarkRecord:
    scenario_id: str
    planner: str
    trial: int
    seed: int
    n_objects: int
    solved: bool                 # claimed by the planner and accepted by the validator
    claimed: bool
    violation: Optional[str]
    num_actions: int
    plan_time: float
    robot_time: Optional[float]  # only for solved runs
    steps: list = field(default_factory=list)

    def __post_init__(self):
        if not self.solved and self.robot_time is not None:
            raise ValueError("robot_time is recorded only for solved runs")

    def to_dict(self, timing: bool = True) -> dict:
        d = asdict(self)
        if not timing:
            d.pop("plan_time")
            d["steps"] = [{k: v for k, v in s.items() if k not in ("plan_time", "elapsed")}
                          for s in d["steps"]]
        return d


def trial_seed(base: int, trial: int) -> int:
    return base * 1000 + trial


def run_cell(scenario: Scenario, spec: PlannerSpec, trial: int, seed: int) -> BenchmarkRecord:
    res = spec.run(scenario, seed)
    rep = validate_plan(scenario, res.plan, spec.deps.tol)
    solved = bool(res.solved and rep.ok and rep.goal_reached)
    violation = rep.violation if not rep.ok else (None if rep.goal_reached or not res.solved else "goal not reached")
    steps = res.stats.get("steps")
    if steps is None:
        steps = [{"level": lv} for lv in res.stats.get("levels", [])]
    return BenchmarkRecord(scenario.name, spec.name, trial, seed, scenario.n, solved, bool(res.solved),
                           violation, len(res.plan), float(res.stats.get("plan_time", 0.0)),
                           estimate_execution_time(res.plan) if solved else None, steps)


def _cell_args(args):
    return run_cell(*args)


def run_benchmark(scenarios: Sequence[Scenario], spec: PlannerSpec, trials: int = 5, seed: int = 0,
                  cell_workers: int = 1, out: Optional[str] = None,
                  timing: bool = True) -> tuple[list[BenchmarkRecord], dict]:
    """Run every (scenario, trial) cell and return records in (scenario, trial) order."""
    if not scenarios:
        raise ValueError("no scenarios")
    cells = [(sc, spec, t, trial_seed(seed, t)) for sc in scenarios for t in range(trials)]
    if cell_workers > 1:
        with ProcessPoolExecutor(cell_workers) as ex:
            records = list(ex.map(_cell_args, cells))
    else:
        records = [run_cell(*c) for c in cells]
    table = aggregate(records)
    if out is not None:
        write_results(records, out, timing)
    return records, table


def _mean(xs) -> Optional[float]:
    xs = list(xs)
    return math.fsum(xs) / len(xs) if xs else None


def aggregate(records: Sequence[BenchmarkRecord]) -> dict:
    """Per-planner summary. Robot time and action counts average over
    solved runs; plan time over all runs."""
    out: dict = {}
    for name in sorted({r.planner for r in records}):
        rs = [r for r in records if r.planner == name]
        ok = [r for r in rs if r.solved]
        out[name] = {
            "runs": len(rs),
            "completion": _mean(r.solved for r in rs),
            "num_actions": _mean(r.num_actions for r in ok),
            "robot_time": _mean(r.robot_time for r in ok),
            "plan_time": _mean(r.plan_time for r in rs),
            "invalid_claims": sum(r.claimed and not r.solved for r in rs),
        }
    return out


def format_table(table: dict) -> str:
    def f(v, fmt):
        return "-" if v is None else format(v, fmt)
    rows = [f"{'planner':<16} {'robot time':>10} {'completion':>10} {'actions':>8} {'plan time':>10}"]
    for name, t in table.items():
        rows.append(f"{name:<16} {f(t['robot_time'], '9.2f')}s {f(100 * t['completion'], '9.2f')}% "
                    f"{f(t['num_actions'], '8.2f')} {f(t['plan_time'], '9.2f')}s")
    return "\n".join(rows)


def write_results(records: Sequence[BenchmarkRecord], path, timing: bool = True) -> None:
    """JSON lines, one record per line, keys sorted."""
    with open(path, "w") as fh:
        for r in records:
            fh.write(json.dumps(r.to_dict(timing), sort_keys=True) + "\n")


def read_results(path) -> list[dict]:
    return [json.loads(line) for line in Path(path).read_text().splitlines() if line.strip()]
