"""Command-line entry point: gen, solve, bench, validate, render."""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from .harness import bench, io
from .harness.render import IoFailure, render_svg
from .harness.scenarios import GenConfig, GenerationTimeout, generate_scenario
from .harness.validate import validate_plan
from .plan import replay


def _spec(args, workers: int) -> bench.PlannerSpec:
    if args.planner == "hbfs":
        return bench.hbfs_spec(workers=workers, parallel_width=args.width or workers,
                               max_actions=args.max_actions, polish=not args.no_polish)
    return bench.pmmr_spec(args.budget, workers=workers, max_actions=args.max_actions, max_depth=args.depth,
                           use_base_reward=not args.no_base_reward, max_iterations=args.iterations,
                           polish=not args.no_polish)


def cmd_gen(args) -> int:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    cfg = GenConfig(p_push=args.p_push)
    for k in range(args.cases):
        name = f"n{args.objects}_c{k}"
        try:
            sc, witness = generate_scenario(args.objects, cfg, np.random.default_rng([args.seed, args.objects, k]),
                                            name=name)
        except GenerationTimeout as e:
            print(f"{name}: {e}", file=sys.stderr)
            return 1
        io.save_scenario(sc, out / f"{name}.json", {"generator": {"seed": args.seed, **cfg.to_dict()}})
        io.save_plan(witness, out / f"{name}.witness.json", name, True, {"witness": True})
        print(out / f"{name}.json")
    return 0


def cmd_solve(args) -> int:
    sc = io.load_scenario(args.scenario)
    spec = _spec(args, bench.env_workers(args.workers))
    res = spec.run(sc, args.seed)
    io.save_plan(res.plan, args.out, sc.name, res.solved, res.stats)
    print(f"{sc.name}: solved={res.solved} actions={len(res.plan)} plan_time={res.stats.get('plan_time', 0):.2f}s")
    return 0 if res.solved else 2


def cmd_bench(args) -> int:
    scenarios = [io.load_scenario(p) for p in io.suite_files(args.suite)]
    if not scenarios:
        print(f"no scenarios in {args.suite}", file=sys.stderr)
        return 1
    spec = _spec(args, bench.env_workers(args.workers))
    records, table = bench.run_benchmark(scenarios, spec, args.trials, args.seed, args.cells, args.out,
                                         timing=not args.no_timing)
    print(bench.format_table(table))
    return 0 if all(not r.claimed or r.solved for r in records) else 3


def cmd_validate(args) -> int:
    sc = io.load_scenario(args.scenario)
    plan, meta = io.load_plan(args.plan)
    rep = validate_plan(sc, plan)
    print(rep)
    if not rep.ok:
        return 1
    return 0 if rep.goal_reached or not meta.get("solved", True) else 1


def cmd_render(args) -> int:
    sc = io.load_scenario(args.scenario)
    plan, state = None, None
    if args.plan:
        plan, _ = io.load_plan(args.plan)
        if args.final:
            state = replay(sc, plan)
    try:
        render_svg(sc, args.out, state, plan)
    except IoFailure as e:
        print(e, file=sys.stderr)
        return 1
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="tabletop", description=__doc__)
    sub = p.add_subparsers(dest="cmd", required=True)

    g = sub.add_parser("gen", help="generate a scenario suite")
    g.add_argument("--objects", type=int, required=True)
    g.add_argument("--cases", type=int, default=5)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--p-push", type=float, default=0.4)
    g.add_argument("--out", required=True)
    g.set_defaults(fn=cmd_gen)

    def planner_args(q):
        q.add_argument("--planner", choices=["hbfs", "pmmr"], default="pmmr")
        q.add_argument("--budget", type=float, default=40.0, help="PMMR seconds per action")
        q.add_argument("--workers", type=int, default=1, help=f"overridden by ${bench.WORKERS_ENV}")
        q.add_argument("--width", type=int, default=None, help="HBFS restarts (default: workers)")
        q.add_argument("--depth", type=int, default=None, help="PMMR tree depth cap")
        q.add_argument("--iterations", type=int, default=None, help="PMMR iteration cap per action")
        q.add_argument("--no-base-reward", action="store_true")
        q.add_argument("--no-polish", action="store_true", help="skip the 10x-budget push re-planning pass")
        q.add_argument("--max-actions", type=int, default=20)
        q.add_argument("--seed", type=int, default=0)

    s = sub.add_parser("solve", help="plan one scenario")
    planner_args(s)
    s.add_argument("--scenario", required=True)
    s.add_argument("--out", required=True)
    s.set_defaults(fn=cmd_solve)

    b = sub.add_parser("bench", help="benchmark a planner on a suite")
    planner_args(b)
    b.add_argument("--suite", required=True)
    b.add_argument("--trials", type=int, default=5)
    b.add_argument("--cells", type=int, default=1, help="concurrent (scenario, trial) cells")
    b.add_argument("--no-timing", action="store_true", help="omit wall-clock fields from the results")
    b.add_argument("--out", required=True)
    b.set_defaults(fn=cmd_bench)

    v = sub.add_parser("validate", help="check a plan against a scenario")
    v.add_argument("--scenario", required=True)
    v.add_argument("--plan", required=True)
    v.set_defaults(fn=cmd_validate)

    r = sub.add_parser("render", help="draw a scenario as SVG")
    r.add_argument("--scenario", required=True)
    r.add_argument("--plan")
    r.add_argument("--final", action="store_true", help="draw objects at the plan's final state")
    r.add_argument("--out", required=True)
    r.set_defaults(fn=cmd_render)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())
