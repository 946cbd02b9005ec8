"""Portfolio composition: which partitioning runs and scrambles to launch.

Plans are plain data.  A plan is a list of jobs, each either a
partitioning run of some strategy, a run of a scrambled copy of the input,
or a plain sequential run, together with the partition budget the plan
was built for.
"""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field

from .partitioner import CUBE, SCATTER, SOURCES, SPEC, StrategyConfig, _is_pow2

FAMILIES = ("decision-cube", "cl-cube", "decision-scatter",
            "heap-cube", "heap-scatter", "cl-scatter")
DEFAULT_RANK = ("decision-scatter", "decision-cube", "cl-cube")
RECOMMENDED = ("decision-scatter", "decision-cube")
MULTIJOB_SIZES = (2, 4, 8, 16, 32, 64, 128)

PARTITION = "partition"
SCRAMBLE = "scramble"
SEQUENTIAL = "sequential"


def _split_family(family: str) -> tuple[str, str]:
    source, _, ptype = family.partition("-")
    source, ptype = source.upper(), ptype.upper()
    if source not in SOURCES or ptype not in (CUBE, SCATTER):
        raise ValueError(f"unknown strategy family {family!r}; expected one of {FAMILIES}")
    return source, ptype


@dataclass(frozen=True, order=True)
class StrategyId:
    family: str
    n: int
    heur: str = SPEC

    def __post_init__(self):
        _split_family(self.family)
        if not isinstance(self.n, int) or not _is_pow2(self.n):
            raise ValueError(f"partition count must be a power of two >= 2, got {self.n!r}")

    @property
    def name(self) -> str:
        suffix = "" if self.heur == SPEC else f"-{self.heur.lower()}"
        return f"{self.family}{suffix}-{self.n}"

    def config(self, **overrides) -> StrategyConfig:
        source, ptype = _split_family(self.family)
        return StrategyConfig(self.n, source=source, heur=self.heur, ptype=ptype, **overrides)


@dataclass(frozen=True)
class Job:
    kind: str
    strategy: StrategyId | None = None
    seed: int = 0
    cores: int = 1
    order: tuple = ()  # multijob sort key: (n, family rank)

    @property
    def name(self) -> str:
        if self.kind == PARTITION:
            return self.strategy.name
        if self.kind == SCRAMBLE:
            return f"scramble-{self.seed}"
        return "sequential"

    @property
    def partitions(self) -> int:
        return self.strategy.n if self.kind == PARTITION else 0


@dataclass(frozen=True)
class PortfolioPlan:
    kind: str
    jobs: tuple = ()
    budget: int = 0
    multijob: bool = False

    @property
    def partition_count(self) -> int:
        return sum(j.partitions for j in self.jobs)

    @property
    def cores(self) -> int:
        return sum(j.cores for j in self.jobs)

    def sizes(self) -> list[int]:
        return sorted(j.partitions for j in self.jobs if j.kind == PARTITION)


def _partition_job(family: str, n: int, rank: int = 0, heur: str = SPEC) -> Job:
    return Job(PARTITION, StrategyId(family, n, heur), cores=n, order=(n, rank))


def _check_families(families) -> tuple:
    families = tuple(families)
    if not families:
        raise ValueError("at least one strategy family is required")
    if len(set(families)) != len(families):
        raise ValueError("strategy families must be distinct")
    for f in families:
        _split_family(f)
    return families


# ------------------------------------------------------------------ plans

def single_plan(strategy: StrategyId) -> PortfolioPlan:
    return PortfolioPlan("single", (Job(PARTITION, strategy, cores=strategy.n,
                                        order=(strategy.n, 0)),), strategy.n)


def sequential_plan() -> PortfolioPlan:
    return PortfolioPlan("sequential", (Job(SEQUENTIAL),), 0)


def graduated_plan(budget: int, families=DEFAULT_RANK) -> PortfolioPlan:
    """Take strategies by (size, family rank) until the next would overflow."""
    families = _check_families(families)
    if budget < 2:
        raise ValueError(f"partition budget {budget} is below the smallest strategy (2)")
    jobs = []
    used = 0
    n = 2
    while n <= budget:
        for rank, fam in enumerate(families):
            if used + n > budget:
                return PortfolioPlan("graduated", tuple(jobs), budget)
            jobs.append(_partition_job(fam, n, rank))
            used += n
        n *= 2
    return PortfolioPlan("graduated", tuple(jobs), budget)


def portfolio_plan(budget: int, families=("decision-cube", "cl-cube"),
                   shares=None) -> PortfolioPlan:
    """Split ``budget`` among strategies; ``shares`` are fractions of the
    budget (default: equal).  Each share must come out a power of two."""
    families = _check_families(families)
    shares = shares or [1 / len(families)] * len(families)
    if len(shares) != len(families):
        raise ValueError("one share per family is required")
    jobs = []
    for rank, (fam, share) in enumerate(zip(families, shares)):
        n = budget * share
        if n != int(n) or not _is_pow2(int(n)):
            raise ValueError(f"share {share} of budget {budget} is not a power of two >= 2")
        jobs.append(_partition_job(fam, int(n), rank))
    if sum(j.partitions for j in jobs) > budget:
        raise ValueError("shares exceed the partition budget")
    return PortfolioPlan("portfolio", tuple(jobs), budget)


def scramble_plan(n: int) -> PortfolioPlan:
    """The original (seed 0) plus n - 1 scrambled copies."""
    if n < 1:
        raise ValueError("a scrambling portfolio needs at least one member")
    return PortfolioPlan("scramble", tuple(Job(SCRAMBLE, seed=s) for s in range(n)), 0)


def hybrid_plan(n: int, families=RECOMMENDED) -> PortfolioPlan:
    """n/2 scrambles next to a graduated portfolio over n/2 partitions."""
    if n < 4 or n % 2:
        raise ValueError(f"hybrid portfolios need an even core count >= 4, got {n}")
    half = n // 2
    grad = graduated_plan(half, families)
    return PortfolioPlan("hybrid", scramble_plan(half).jobs + grad.jobs, half)


def multijob_plan(families=RECOMMENDED, sizes=MULTIJOB_SIZES) -> PortfolioPlan:
    """Every family at every size; partitions are list-scheduled by the
    harness rather than given a core each."""
    families = _check_families(families)
    jobs = tuple(_partition_job(fam, n, rank) for n in sizes for rank, fam in enumerate(families))
    jobs = tuple(sorted(jobs, key=lambda j: j.order))
    return PortfolioPlan("multijob", jobs, sum(j.partitions for j in jobs), multijob=True)


# ---------------------------------------------------------- serialization

def plan_to_dict(plan: PortfolioPlan) -> dict:
    jobs = []
    for j in plan.jobs:
        d = {"kind": j.kind, "cores": j.cores}
        if j.kind == PARTITION:
            d["strategy"] = {"family": j.strategy.family, "n": j.strategy.n,
                             "heur": j.strategy.heur}
            d["order"] = list(j.order)
        if j.kind == SCRAMBLE:
            d["seed"] = j.seed
        jobs.append(d)
    return {"kind": plan.kind, "budget": plan.budget, "multijob": plan.multijob, "jobs": jobs}


def plan_from_dict(d: dict) -> PortfolioPlan:
    jobs = []
    for j in d["jobs"]:
        strategy = StrategyId(**j["strategy"]) if "strategy" in j else None
        jobs.append(Job(j["kind"], strategy, j.get("seed", 0), j.get("cores", 1),
                        tuple(j.get("order", ()))))
    return PortfolioPlan(d["kind"], tuple(jobs), d.get("budget", 0), d.get("multijob", False))


def plan_to_json(plan: PortfolioPlan) -> str:
    return json.dumps(plan_to_dict(plan), indent=2, sort_keys=True) + "\n"


def plan_from_json(text: str) -> PortfolioPlan:
    return plan_from_dict(json.loads(text))


__all__ = ["FAMILIES", "DEFAULT_RANK", "RECOMMENDED", "MULTIJOB_SIZES", "StrategyId", "Job",
           "PortfolioPlan", "single_plan", "sequential_plan", "graduated_plan",
           "portfolio_plan", "scramble_plan", "hybrid_plan", "multijob_plan",
           "plan_to_json", "plan_from_json", "plan_to_dict", "plan_from_dict",
           "PARTITION", "SCRAMBLE", "SEQUENTIAL"]
