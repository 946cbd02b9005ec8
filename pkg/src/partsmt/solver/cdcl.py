"""CDCL(T) search over the Boolean abstraction built by :mod:`.encoder`.

The solver keeps its internals inspectable because partitioning reads
them: the activity heap (HEAP atoms), the decision trail (DECISION atoms)
and the stream of theory conflict clauses (CL atoms).  A partitioner, if
given, is called after every decision and may hand back a blocking lemma.
"""
from __future__ import annotations

import random
import time
from dataclasses import dataclass, field

from .. import terms as T
from ..model import Model
from ..terms import BOOL, INT, Term
from . import idl
from .encoder import ZERO, Encoder
from .euf import FALSE_NODE, TRUE_NODE, CongruenceClosure
from .heap import ActivityHeap

SAT = "sat"
UNSAT = "unsat"
UNKNOWN = "unknown"
PARTITIONED = "partitioned"

HEAP = "HEAP"
DECISION = "DECISION"
CL = "CL"
RAND = "RAND"
SPEC = "SPEC"


def luby(i: int) -> int:
    """i-th element (0-based) of the Luby sequence 1 1 2 1 1 2 4 ..."""
    size, seq = 1, 0
    while size < i + 1:
        seq += 1
        size = 2 * size + 1
    while size - 1 != i:
        size = (size - 1) >> 1
        seq -= 1
        i = i % size
    return 1 << seq


class TheoryLemmaLog:
    """Occurrence counts of atoms in theory-produced clauses."""

    def __init__(self):
        self.counts: dict[int, int] = {}
        self.order: list[int] = []
        self._rank: dict[int, int] = {}

    def record(self, clause):
        for v in {lit >> 1 for lit in clause}:
            if v not in self._rank:
                self._rank[v] = len(self.order)
                self.order.append(v)
            self.counts[v] = self.counts.get(v, 0) + 1

    def reset(self):
        self.counts.clear()

    def ranked(self) -> list[int]:
        """Atoms seen since the last reset, most frequent first."""
        return sorted(self.counts, key=lambda v: (-self.counts[v], self._rank[v]))

    def candidates(self) -> list[int]:
        return [v for v in self.order if self.counts.get(v)]


@dataclass
class SolveResult:
    status: str
    model: Model | None = None
    partitions: list = field(default_factory=list)
    residual: str | None = None
    stats: dict = field(default_factory=dict)
    elapsed: float = 0.0


class Solver:
    def __init__(self, script, seed: int = 0, restart_base: int = 100,
                 clock=time.monotonic, debug: bool = False):
        self.script = script
        self.enc = Encoder(script)
        self.clock = clock
        self.debug = debug
        self.rng = random.Random(seed)
        self.restart_base = restart_base
        self.declared = script.declared_names()

        n = self.enc.nvars
        self.nvars = 0
        self.lval: list[int] = []  # per literal: 1 true, -1 false, 0 unassigned
        self.level: list[int] = []
        self.reason: list = []
        self.phase: list[bool] = []
        self.watches: list[list[int]] = []
        self.heap = ActivityHeap()
        self.clauses: list[list[int]] = []
        self.trail: list[int] = []
        self.trail_lim: list[int] = []
        self.qhead = 0
        self.lemma_log = TheoryLemmaLog()
        self.stats = {"decisions": 0, "conflicts": 0, "theory_conflicts": 0,
                      "propagations": 0, "restarts": 0, "check_count": 0,
                      "theory_checks": 0, "blocking_lemmas": 0}
        self.unsat = False
        self._grow(n)

        self.euf = CongruenceClosure()
        self.theory_kind: list = [None] * n
        for v, atom in self.enc.atoms.items():
            if atom.kind in ("eq", "pred"):
                for t in atom.data:
                    self.euf.register(t)
                self.theory_kind[v] = atom.kind
            elif atom.kind == "diff":
                self.theory_kind[v] = "diff"
        self.th_trail: list[int] = []
        self.th_ok = 0
        self._consumed = 0
        self._load_clauses()

    # ------------------------------------------------------------ plumbing

    def _grow(self, n: int):
        extra = n - self.nvars
        if extra <= 0:
            return
        self.lval.extend([0] * (2 * extra))
        self.level.extend([-1] * extra)
        self.reason.extend([None] * extra)
        self.phase.extend([False] * extra)
        self.watches.extend([] for _ in range(2 * extra))
        self.heap.grow(n)
        for v in range(self.nvars, n):
            self.heap.insert(v)
        if hasattr(self, "theory_kind"):
            self.theory_kind.extend([None] * extra)
        self.nvars = n

    def _load_clauses(self):
        """Move clauses produced by the encoder into the database."""
        self._grow(self.enc.nvars)
        new = self.enc.clauses[self._consumed:]
        self._consumed = len(self.enc.clauses)
        for c in new:
            self.add_clause(c)

    @property
    def decision_level(self) -> int:
        return len(self.trail_lim)

    def value(self, lit: int) -> int:
        return self.lval[lit]

    def add_clause(self, lits) -> bool:
        """Add a clause at decision level 0.  Returns False on conflict."""
        assert self.decision_level == 0
        seen = set()
        out = []
        for lit in lits:
            if self.lval[lit] == 1 or (lit ^ 1) in seen:
                return True
            if self.lval[lit] == -1 or lit in seen:
                continue
            seen.add(lit)
            out.append(lit)
        if not out:
            self.unsat = True
            return False
        if len(out) == 1:
            self._enqueue(out[0], None)
            return True
        self._attach(out)
        return True

    def _attach(self, clause: list[int]) -> int:
        ci = len(self.clauses)
        self.clauses.append(clause)
        self.watches[clause[0]].append(ci)
        self.watches[clause[1]].append(ci)
        return ci

    def _enqueue(self, lit: int, reason):
        v = lit >> 1
        self.lval[lit] = 1
        self.lval[lit ^ 1] = -1
        self.level[v] = self.decision_level
        self.reason[v] = reason
        self.trail.append(lit)
        if self.theory_kind[v] is not None:
            self.th_trail.append(lit)

    def _cancel_until(self, lvl: int):
        if self.decision_level <= lvl:
            return
        stop = self.trail_lim[lvl]
        lval, heap = self.lval, self.heap
        for i in range(len(self.trail) - 1, stop - 1, -1):
            lit = self.trail[i]
            v = lit >> 1
            lval[lit] = 0
            lval[lit ^ 1] = 0
            self.phase[v] = not (lit & 1)
            self.reason[v] = None
            self.level[v] = -1
            heap.insert(v)
        del self.trail[stop:]
        del self.trail_lim[lvl:]
        self.qhead = min(self.qhead, stop)
        th = self.th_trail
        while th and lval[th[-1]] == 0:
            th.pop()
        self.th_ok = min(self.th_ok, len(th))

    # ---------------------------------------------------------- propagation

    def _propagate(self):
        lval, clauses, watches, trail = self.lval, self.clauses, self.watches, self.trail
        props = 0
        while self.qhead < len(trail):
            p = trail[self.qhead]
            self.qhead += 1
            false_lit = p ^ 1
            ws = watches[false_lit]
            keep = []
            i, n = 0, len(ws)
            while i < n:
                ci = ws[i]
                i += 1
                c = clauses[ci]
                if c[0] == false_lit:
                    c[0], c[1] = c[1], false_lit
                first = c[0]
                if lval[first] == 1:
                    keep.append(ci)
                    continue
                for k in range(2, len(c)):
                    if lval[c[k]] != -1:
                        c[1], c[k] = c[k], false_lit
                        watches[c[1]].append(ci)
                        break
                else:
                    keep.append(ci)
                    if lval[first] == -1:
                        keep.extend(ws[i:])
                        watches[false_lit] = keep
                        self.qhead = len(trail)
                        self.stats["propagations"] += props
                        return ci
                    self._enqueue(first, ci)
                    props += 1
            watches[false_lit] = keep
        self.stats["propagations"] += props
        return None

    # --------------------------------------------------------------- theory

    def _theory_literals(self):
        eqs, diseqs, diffs = [], [], []
        atoms, node_of = self.enc.atoms, self.euf.node_of
        for lit in self.th_trail:
            atom = atoms[lit >> 1]
            positive = not (lit & 1)
            if atom.kind == "diff":
                x, y, c = atom.data
                if positive:
                    diffs.append((x, y, c, lit))
                else:
                    diffs.append((y, x, -c - 1, lit))
            elif atom.kind == "eq":
                a, b = (node_of[t] for t in atom.data)
                (eqs if positive else diseqs).append((a, b, lit))
            else:
                eqs.append((node_of[atom.data[0]], TRUE_NODE if positive else FALSE_NODE, lit))
        return eqs, diseqs, diffs

    def _theory_check(self):
        """Check the asserted theory literals; returns a conflict clause
        index or None."""
        if len(self.th_trail) <= self.th_ok:
            return None
        self.stats["theory_checks"] += 1
        eqs, diseqs, diffs = self._theory_literals()
        explanation = None
        if eqs or diseqs:
            explanation = self.euf.check(eqs, diseqs)
        if explanation is None and diffs:
            explanation, _ = idl.check(diffs)
        if explanation is None:
            self.th_ok = len(self.th_trail)
            return None
        clause = [lit ^ 1 for lit in explanation]
        self.stats["theory_conflicts"] += 1
        self.lemma_log.record(clause)
        clause.sort(key=lambda lit: -self.level[lit >> 1])
        if len(clause) == 1:
            return ("unit", clause)
        return self._attach(clause)

    # ------------------------------------------------------------- analysis

    def _analyze(self, clause: list[int]):
        level, reason, clauses = self.level, self.reason, self.clauses
        current = self.decision_level
        seen = [False] * self.nvars
        learnt = [0]
        counter = 0
        idx = len(self.trail) - 1
        p = None
        while True:
            for q in clause:
                v = q >> 1
                if p is not None and v == (p >> 1):
                    continue
                if not seen[v] and level[v] > 0:
                    seen[v] = True
                    self.heap.bump(v)
                    if level[v] >= current:
                        counter += 1
                    else:
                        learnt.append(q)
            while not seen[self.trail[idx] >> 1]:
                idx -= 1
            p = self.trail[idx]
            idx -= 1
            seen[p >> 1] = False
            counter -= 1
            if counter == 0:
                break
            clause = clauses[reason[p >> 1]]
        learnt[0] = p ^ 1
        if len(learnt) == 1:
            return learnt, 0
        best = max(range(1, len(learnt)), key=lambda i: level[learnt[i] >> 1])
        learnt[1], learnt[best] = learnt[best], learnt[1]
        return learnt, level[learnt[1] >> 1]

    def _resolve(self, confl) -> bool:
        """Learn from a conflict and backjump; False means unsat."""
        self.stats["conflicts"] += 1
        if isinstance(confl, tuple):
            clause = confl[1]
        else:
            clause = self.clauses[confl]
        top = max(self.level[lit >> 1] for lit in clause)
        if top <= 0:
            self.unsat = True
            return False
        if top < self.decision_level:
            self._cancel_until(top)
        learnt, back = self._analyze(clause)
        self._cancel_until(back)
        if len(learnt) == 1:
            self._enqueue(learnt[0], None)
        else:
            ci = self._attach(learnt)
            self._enqueue(learnt[0], ci)
        self.heap.decay()
        return True

    # ------------------------------------------------------------- blocking

    def add_blocking_lemma(self, formula: Term) -> bool:
        """Backtrack to level 0 and assert ``formula`` (normally the
        negation of an emitted cube).  Returns False if this makes the
        clause database unsatisfiable at level 0."""
        self._cancel_until(0)
        self.stats["blocking_lemmas"] += 1
        if formula.op == T.NOT and formula.args[0].op == T.AND:
            clause = [self.enc.lit(a) ^ 1 for a in formula.args[0].args]
        elif formula.op == T.OR:
            clause = [self.enc.lit(a) for a in formula.args]
        else:
            clause = [self.enc.lit(formula)]
        self._load_clauses()
        ok = self.add_clause(clause) and not self.unsat
        if ok and self._propagate() is not None:
            self.unsat = True
        return not self.unsat

    # ---------------------------------------------------------- atom access

    def atom_term(self, v: int) -> Term | None:
        atom = self.enc.atoms.get(v)
        return atom.term if atom is not None else None

    def var_of(self, atom: Term) -> int:
        return self.enc.lit(atom) >> 1

    def is_usable(self, v: int) -> bool:
        """Atom over input symbols only, not fixed at level 0."""
        atom = self.enc.atoms.get(v)
        if atom is None:
            return False
        if self.lval[2 * v] != 0 and self.level[v] == 0:
            return False
        return T.free_symbols(atom.term) <= self.declared

    def polarity(self, v: int) -> bool:
        """Current value if assigned, otherwise the saved phase."""
        val = self.lval[2 * v]
        return val == 1 if val != 0 else self.phase[v]

    def decisions(self) -> list[int]:
        return [self.trail[i] for i in self.trail_lim]

    def snapshot_atoms(self, source: str, heur: str, want: int,
                       exclude=(), rng: random.Random | None = None) -> list[Term]:
        """Up to ``want`` atoms from ``source`` after filtering."""
        excluded = set(exclude)
        if source == HEAP:
            pool = [v for v in self.heap.ranked()
                    if v in self.enc.atoms and self.lval[2 * v] == 0]
        elif source == DECISION:
            pool = [lit >> 1 for lit in self.decisions()]
        elif source == CL:
            pool = self.lemma_log.ranked() if heur == SPEC else self.lemma_log.candidates()
        else:
            raise ValueError(f"unknown atom source {source}")
        pool = [v for v in pool if self.is_usable(v) and self.enc.atoms[v].term not in excluded]
        if heur == RAND:
            rng = rng or self.rng
            pool = rng.sample(pool, min(want, len(pool)))
        return [self.enc.atoms[v].term for v in pool[:want]]

    # ---------------------------------------------------------------- model

    def _model(self) -> Model:
        m = Model()
        decls = self.script.functions()
        atoms = self.enc.atoms
        for v, atom in atoms.items():
            if atom.kind == "bool":
                m.constants[atom.term.name] = self.lval[2 * v] == 1
        eqs, diseqs, diffs = self._theory_literals()
        if diffs:
            _, potential = idl.check(diffs)
            base = potential.get(ZERO, 0)
            for name, d in potential.items():
                if name != ZERO:
                    m.constants[name] = d - base
        if len(self.euf.terms) > 2:
            self.euf.check(eqs, diseqs)
            rep = self.euf.classes()
            names: dict = {}
            true_rep = rep[TRUE_NODE]

            def element(node):
                t = self.euf.terms[node]
                if t.sort == BOOL:
                    return rep[node] == true_rep
                r = rep[node]
                if r not in names:
                    names[r] = f"{t.sort.name}!{sum(1 for k in names if self.euf.terms[k].sort == t.sort)}"
                return names[r]

            for node in range(2, len(self.euf.terms)):
                t = self.euf.terms[node]
                if t.op == T.VAR:
                    m.constants[t.name] = element(node)
                elif t.op == T.APP:
                    key = tuple(element(a) for a in self.euf.args[node])
                    m.functions.setdefault(t.name, {})[key] = element(node)
        for name, d in decls.items():
            if not d.arg_sorts and name not in m.constants:
                m.constants[name] = False if d.sort == BOOL else (0 if d.sort == INT else f"{d.sort.name}!fresh")
        return m

    # ----------------------------------------------------------------- main

    def solve(self, partitioner=None, budget: float | None = None) -> SolveResult:
        start = self.clock()
        deadline = None if budget is None else start + budget
        if partitioner is not None:
            partitioner.start(self, start)
        status = self._search(partitioner, deadline)
        res = SolveResult(status, stats=dict(self.stats))
        if status == SAT:
            res.model = self._model()
            if partitioner is not None:
                partitioner.abandon()
        elif partitioner is not None:
            emitted = partitioner.finish(status)
            if status != PARTITIONED and emitted:
                res.residual = status
                res.status = PARTITIONED
            res.partitions = emitted
        res.stats = dict(self.stats)
        res.elapsed = self.clock() - start
        return res

    def _search(self, partitioner, deadline) -> str:
        if self.unsat:
            return UNSAT
        conflicts_since_restart = 0
        restarts = 0
        limit = luby(0) * self.restart_base
        tick = 0
        while True:
            confl = self._propagate()
            if confl is None:
                confl = self._theory_check()
            if confl is not None:
                if not self._resolve(confl):
                    return UNSAT
                conflicts_since_restart += 1
                continue
            if self.debug:
                self.check_trail()
            tick += 1
            if deadline is not None and (tick & 31) == 0 and self.clock() >= deadline:
                return UNKNOWN
            if conflicts_since_restart >= limit:
                restarts += 1
                self.stats["restarts"] += 1
                conflicts_since_restart = 0
                limit = luby(restarts) * self.restart_base
                self._cancel_until(0)
                continue
            v = self._pick_branch()
            if v is None:
                return SAT
            self.trail_lim.append(len(self.trail))
            self._enqueue(2 * v + (0 if self.phase[v] else 1), None)
            self.stats["decisions"] += 1
            if partitioner is not None:
                self.stats["check_count"] += 1
                step = partitioner.step(self)
                if step.done:
                    return PARTITIONED
                if step.block is not None and not self.add_blocking_lemma(step.block):
                    return UNSAT

    def _pick_branch(self):
        heap, lval = self.heap, self.lval
        while len(heap):
            v = heap.pop()
            if lval[2 * v] == 0:
                return v
        return None

    def check_trail(self):
        """Debug invariant: level monotonicity and single assignment."""
        seen = set()
        last = 0
        lims = set(self.trail_lim)
        for i, lit in enumerate(self.trail):
            v = lit >> 1
            assert v not in seen, "variable assigned twice"
            seen.add(v)
            assert self.level[v] >= last, "levels decrease along trail"
            last = self.level[v]
            assert (i in lims) == (self.reason[v] is None and self.level[v] > 0), \
                "decision entries must be exactly the level boundaries"


def solve(script, partitioner=None, budget=None, seed: int = 0) -> SolveResult:
    return Solver(script, seed=seed).solve(partitioner, budget)
