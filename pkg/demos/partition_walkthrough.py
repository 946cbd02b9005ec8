# Walk through partitioning one problem, cube style then scatter style,
# and check that the pieces together say the same thing as the whole.
import random
import tempfile
from pathlib import Path

from partsmt import partition, solve, StrategyConfig
from partsmt.frontend import print_script, subproblem, write_partitions
from partsmt.generate import pigeonhole_script, random_uf_script

script = pigeonhole_script(6, 5)
print(print_script(script)[:400], "...\n")

whole = solve(script)
print("sequential:", whole.status, f"{whole.elapsed:.2f}s", whole.stats["conflicts"], "conflicts")

# CHECK timing counts solver callbacks, so these runs are reproducible.
cube = partition(script, StrategyConfig(4, source="DECISION", ptype="CUBE", timing="CHECK", t1=20, t2=1))
print("\ncube partitions:")
for p in cube.partitions:
    print(f"  {p.index}: {p.formula}")

scatter = partition(script, StrategyConfig(4, source="DECISION", ptype="SCATTER", timing="CHECK",
                                           t1=20, t2=20))
print("\nscatter partitions (residual: %s):" % scatter.residual)
for p in scatter.partitions:
    print(f"  {p.index}: {p.formula}")

# every piece of an unsat problem is unsat
for name, res in (("cube", cube), ("scatter", scatter)):
    verdicts = [solve(subproblem(script, p.formula)).status for p in res.partitions]
    print(name, verdicts)

# a satisfiable instance: exactly one cube holds in any model
rng = random.Random(7)
sat = random_uf_script(rng, 20, ratio=1.5)
res = partition(sat, StrategyConfig(8, timing="CHECK", t1=1, t2=1))
print("\nsatisfiable instance:", res.status, len(res.partitions), "partitions")
verdicts = [solve(subproblem(sat, p.formula)).status for p in res.partitions]
print(verdicts)

with tempfile.TemporaryDirectory() as d:
    paths = write_partitions(sat, res.partitions, Path(d) / "uf20")
    print("\nwritten:", *(p.name for p in paths))
    print((Path(d) / "uf20.manifest").read_text())
