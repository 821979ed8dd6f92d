"""A miniature benchmark: a few generated scenarios, several trials each.

Every run is re-checked by the validator; completion only counts plans the
validator accepts. PMMR is capped at 60 iterations per action here, far
below its usual 40 s budget, so expect it to miss some cases. Results land
in gallery_out/mini.jsonl, one JSON record per (scenario, trial) cell.

Run: python3 gallery/04_mini_benchmark.py
"""
from pathlib import Path

from tabletop.harness import format_table, generate_suite, hbfs_spec, pmmr_spec, run_benchmark, write_results

out = Path("gallery_out")
out.mkdir(exist_ok=True)

suite = [sc for sc, _ in generate_suite(counts=(3,), cases=2, seed=5)]
print("scenarios:", ", ".join(sc.name for sc in suite))

records = []
tables = {}
for spec in (hbfs_spec(parallel_width=4), pmmr_spec(40, max_iterations=60, max_actions=10, name="pmmr-60it")):
    recs, table = run_benchmark(suite, spec, trials=2, seed=1)
    records += recs
    tables.update(table)
    for r in recs:
        print(f"  {r.planner:10s} {r.scenario_id} trial {r.trial}: solved={r.solved} actions={r.num_actions}")

print()
print(format_table(tables))
write_results(records, out / "mini.jsonl")
