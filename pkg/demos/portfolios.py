# What the portfolio builders hand to the harness.
from partsmt.portfolio import (graduated_plan, hybrid_plan, multijob_plan, plan_to_json,
                               portfolio_plan, scramble_plan)

grad = graduated_plan(32)
print("graduated, 32 partitions:")
for job in grad.jobs:
    print(f"  {job.name:24} cores={job.cores}")
print("  total", grad.partition_count)

print("\none family, 16:", graduated_plan(16, ("decision-scatter",)).sizes())
print("two halves:", [j.name for j in portfolio_plan(16).jobs])
print("half, quarter, quarter:",
      [j.name for j in portfolio_plan(16, ("decision-cube", "cl-cube", "heap-cube"),
                                       shares=[0.5, 0.25, 0.25]).jobs])
print("scrambles:", [j.name for j in scramble_plan(4).jobs])
print("hybrid on 8 cores:", [j.name for j in hybrid_plan(8).jobs])

mj = multijob_plan()
print(f"\nmultijob: {len(mj.jobs)} jobs, {mj.partition_count} partitions")
print(plan_to_json(hybrid_plan(4)))
