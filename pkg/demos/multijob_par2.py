# Run a hybrid portfolio and a multijob portfolio over the demo benchmarks,
# then score both with PAR-2.
from pathlib import Path

from partsmt.frontend import parse_file
from partsmt.harness import par2_score, run_plan
from partsmt.portfolio import hybrid_plan, multijob_plan

TIMEOUT = 20.0
# these benchmarks solve in well under the default 3s wait, so split them
# after a fixed number of decisions instead
SPLIT_EARLY = {"timing": "CHECK", "t1": 30, "t2": 10}
files = sorted((Path(__file__).parent / "benchmarks").glob("*.smt2"))

for plan, cores in ((hybrid_plan(4), 4), (multijob_plan(sizes=(2, 4, 8)), 4)):
    print(f"== {plan.kind}, {cores} cores")
    results = []
    for f in files:
        res = run_plan(plan, parse_file(f), benchmark=f.name, timeout=TIMEOUT, cores=cores,
                       strategy_overrides=SPLIT_EARLY)
        results.append((res.verdict, res.time))
        best = min(res.jobs, key=lambda j: j.time)
        print(f"  {f.name:28} {res.verdict:7} {res.time:6.2f}s  fastest job {best.job}")
        if res.schedule is not None:
            print(f"    makespan {res.schedule.makespan:.2f}s, {len(res.schedule.dropped)} dropped")
    print(f"  PAR-2 {par2_score(results, TIMEOUT):.2f}\n")
