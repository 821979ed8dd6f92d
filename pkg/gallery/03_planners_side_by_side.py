"""HBFS and PMMR on one generated scenario.

HBFS is greedy: put something on its goal if possible, otherwise move
whatever blocks a goal. PMMR grows a search tree per action. Both plans go
through the independent validator, and the final states are drawn as SVG.

A PMMR step here is capped at 150 iterations so the demo runs in a
minute or two on one core; the benchmark default is a 40 s budget.

Run: python3 gallery/03_planners_side_by_side.py
"""
from pathlib import Path

import numpy as np

from tabletop import HbfsConfig, PmmrConfig, estimate_execution_time, hbfs_plan, pmmr_plan, replay
from tabletop.harness import GenConfig, generate_scenario, render_svg, validate_plan

out = Path("gallery_out")
out.mkdir(exist_ok=True)

sc, witness = generate_scenario(4, GenConfig(), np.random.default_rng([0, 4, 1]), name="n4_c1")
print(sc.name, [o.cls.value for o in sc.objects])
print("generator witness:", len(witness), "actions")
render_svg(sc, out / "start.svg")

runs = {
    "hbfs": hbfs_plan(sc, HbfsConfig(parallel_width=4)),
    "pmmr": pmmr_plan(sc, PmmrConfig(step_budget=60.0, max_iterations=150)),
}
for name, res in runs.items():
    rep = validate_plan(sc, res.plan)
    kinds = "".join("P" if type(a).__name__ == "Push" else "L" for a in res.plan)
    print(f"{name}: solved={res.solved} actions={len(res.plan)} ({kinds}) "
          f"robot time {estimate_execution_time(res.plan):.1f}s, "
          f"planning {res.stats['plan_time']:.1f}s; validator: {rep}")
    render_svg(sc, out / f"{name}_final.svg", state=replay(sc, res.plan), plan=res.plan)
print("SVGs in", out.resolve())
