"""Partitioning strategies run from inside the CDCL(T) search.

A :class:`Partitioner` is handed to :meth:`Solver.solve`.  After every
SAT decision the solver calls :meth:`Partitioner.step`, which

1. asks the timing gate whether it is time to partition,
2. collects atoms from the configured source (activity heap, decision
   trail or theory conflict clauses) ordered by the configured heuristic,
3. gives up for this call if fewer than ``cube_size`` atoms are available,
4. otherwise builds partitions from the first ``cube_size`` atoms.

Cube partitioning emits all ``2**cube_size`` cubes at once and finishes.
Scattering emits one partition per successful call and hands the solver
the negated cube as a blocking lemma; once ``n - 1`` cubes exist the final
partition (the conjunction of all negated cubes) is emitted as well.
"""
from __future__ import annotations

import random
import time
from dataclasses import dataclass, field

from . import terms as T
from .solver.cdcl import CL, DECISION, HEAP, RAND, SPEC, UNKNOWN, UNSAT
from .terms import Term

CUBE = "CUBE"
SCATTER = "SCATTER"
CHECK = "CHECK"
TIME = "TIME"

SOURCES = (HEAP, DECISION, CL)
HEURISTICS = (RAND, SPEC)
PTYPES = (CUBE, SCATTER)
TIMINGS = (CHECK, TIME)


def _is_pow2(n: int) -> bool:
    return n >= 2 and n & (n - 1) == 0


@dataclass(frozen=True)
class StrategyConfig:
    n: int
    source: str = DECISION
    heur: str = SPEC
    ptype: str = CUBE
    timing: str = TIME
    t1: float = 3.0
    t2: float = 0.1
    seed: int = 0
    reuse_atoms: bool = False
    reset_cl_counters: bool = True
    # Scatter may use a different cube size; None keeps log2(n).
    scatter_cube_size: int | None = None

    def __post_init__(self):
        if isinstance(self.n, bool) or not isinstance(self.n, int) or not _is_pow2(self.n):
            raise ValueError(f"partition count must be a power of two >= 2, got {self.n!r}")
        for value, allowed, what in ((self.source, SOURCES, "atom source"),
                                     (self.heur, HEURISTICS, "selection heuristic"),
                                     (self.ptype, PTYPES, "partition type"),
                                     (self.timing, TIMINGS, "timing heuristic")):
            if value not in allowed:
                raise ValueError(f"unknown {what} {value!r}; expected one of {allowed}")
        if self.t1 < 0 or self.t2 < 0:
            raise ValueError("t1 and t2 must be non-negative")
        if self.scatter_cube_size is not None and self.scatter_cube_size < 1:
            raise ValueError("scatter_cube_size must be positive")

    @property
    def cube_size(self) -> int:
        if self.ptype == SCATTER and self.scatter_cube_size is not None:
            return self.scatter_cube_size
        return self.n.bit_length() - 1

    @property
    def tag(self) -> str:
        return f"{self.timing}-{self.source}-{self.ptype}-{self.heur}-{self.n}"


@dataclass(frozen=True)
class Partition:
    index: int  # 1-based
    formula: Term
    cube: tuple = ()  # literals of C_i; empty for the final scatter partition
    tag: str = ""
    emitted_at: float = 0.0  # seconds since the solver started


@dataclass
class Step:
    done: bool = False
    block: Term | None = None
    partitions: list = field(default_factory=list)


NONE = Step()


def literal(atom: Term, positive: bool) -> Term:
    return atom if positive else T.not_(atom)


def make_cubes(atoms) -> list[tuple]:
    """All sign patterns over ``atoms``; atom j is negated in cube i
    (1-based) iff bit j of i - 1 is set."""
    k = len(atoms)
    return [tuple(literal(a, not (i >> j) & 1) for j, a in enumerate(atoms))
            for i in range(1 << k)]


def scatter_formula(cube, previous) -> Term:
    """C_i conjoined with the negations of the earlier cubes."""
    return T.conj([T.conj(cube)] + [T.negate(T.conj(c)) for c in previous])


def final_formula(cubes) -> Term:
    return T.conj([T.negate(T.conj(c)) for c in cubes])


class Partitioner:
    """Partitioning state for one solver run."""

    def __init__(self, config: StrategyConfig, clock=None):
        self.config = config
        self.clock = clock
        self.rng = random.Random(config.seed)
        self.emitted: list[Partition] = []
        self.used_cubes: list[tuple] = []
        self.used_atoms: set[Term] = set()
        self.start_time = 0.0
        self.last_emit_time = 0.0
        self.call_count = 0
        self.last_emit_call = 0
        self.done = False

    # ----------------------------------------------------------- protocol

    def start(self, solver, now: float):
        if self.clock is None:
            self.clock = getattr(solver, "clock", time.monotonic)
        self.start_time = now
        self.last_emit_time = now

    def is_time_to_partition(self, now: float) -> bool:
        self.call_count += 1
        cfg = self.config
        if cfg.timing == TIME:
            if not self.emitted:
                return now - self.start_time >= cfg.t1
            return now - self.last_emit_time >= cfg.t2
        if not self.emitted:
            return self.call_count >= cfg.t1
        return self.call_count - self.last_emit_call >= cfg.t2

    def collect_atoms(self, solver) -> list[Term]:
        cfg = self.config
        exclude = () if cfg.reuse_atoms else self.used_atoms
        return solver.snapshot_atoms(cfg.source, cfg.heur, self.config.cube_size,
                                     exclude=exclude, rng=self.rng)

    def step(self, solver) -> Step:
        if self.done:
            return Step(done=True)
        now = self.clock()
        if not self.is_time_to_partition(now):
            return NONE
        atoms = self.collect_atoms(solver)
        k = self.config.cube_size
        if len(atoms) < k:
            return NONE
        atoms = atoms[:k]
        if self.config.ptype == CUBE:
            return self._cube(atoms, now)
        return self._scatter(solver, atoms, now)

    def finish(self, status: str) -> list[Partition]:
        """Partitions to report when the search stopped on its own.

        An unsat search means the region left after the blocking lemmas is
        empty, so only the emitted partitions need solving.  When the budget
        ran out, the uncovered remainder becomes one last partition."""
        if (not self.done and status == UNKNOWN and self.config.ptype == SCATTER
                and self.used_cubes):
            self._emit(final_formula(self.used_cubes), (), self.clock())
            self.done = True
        return list(self.emitted)

    def abandon(self):
        """The solver found a model; nothing needs to be solved."""
        self.emitted.clear()

    # ------------------------------------------------------- construction

    def _emit(self, formula: Term, cube: tuple, now: float) -> Partition:
        p = Partition(len(self.emitted) + 1, formula, cube, self.config.tag,
                      now - self.start_time)
        self.emitted.append(p)
        self.last_emit_time = now
        self.last_emit_call = self.call_count
        return p

    def _cube(self, atoms, now: float) -> Step:
        for cube in make_cubes(atoms):
            self._emit(T.conj(cube), cube, now)
        self.done = True
        return Step(done=True, partitions=list(self.emitted))

    def _scatter(self, solver, atoms, now: float) -> Step:
        cube = tuple(literal(a, solver.polarity(solver.var_of(a))) for a in atoms)
        p = self._emit(scatter_formula(cube, self.used_cubes), cube, now)
        self.used_cubes.append(cube)
        self.used_atoms.update(atoms)
        if self.config.reset_cl_counters:
            solver.lemma_log.reset()
        new = [p]
        if len(self.used_cubes) == self.config.n - 1:
            new.append(self._emit(final_formula(self.used_cubes), (), now))
            self.done = True
            return Step(done=True, partitions=new)
        return Step(block=T.negate(T.conj(cube)), partitions=new)


def partition(script, config: StrategyConfig, budget: float | None = None, clock=None):
    """Run the partitioning solver on ``script``; returns the SolveResult."""
    from .solver.cdcl import Solver
    kw = {} if clock is None else {"clock": clock}
    solver = Solver(script, seed=config.seed, **kw)
    return solver.solve(Partitioner(config, clock=clock), budget)


__all__ = ["StrategyConfig", "Partition", "Partitioner", "Step", "make_cubes",
           "scatter_formula", "final_formula", "partition", "CUBE", "SCATTER",
           "CHECK", "TIME", "HEAP", "DECISION", "CL", "RAND", "SPEC", "UNSAT"]
