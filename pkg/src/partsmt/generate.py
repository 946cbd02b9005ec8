"""Random and structured benchmark scripts.

The random generators draw a fixed-size pool of distinct atoms and build
clauses over it, with some non-clausal structure mixed in (implications,
Bool ``ite``/``=``, and non-Bool ``ite`` terms) so that every encoder path
gets exercised.
"""
from __future__ import annotations

import random

from . import terms as T
from .smtlib import Decl, Script
from .terms import BOOL, INT


def _clauses(rng: random.Random, atoms, n_clauses: int, width=(2, 3, 3, 3, 4)):
    out = []
    for _ in range(n_clauses):
        k = min(rng.choice(width), len(atoms))
        lits = [a if rng.random() < 0.5 else T.not_(a) for a in rng.sample(atoms, k)]
        shape = rng.random()
        if shape < 0.1 and k >= 2:
            # a -> (b or ...): same clause, implication form
            out.append(T.implies(T.negate(lits[0]), T.or_(*lits[1:]) if k > 2 else lits[1]))
        elif shape < 0.15 and k >= 3:
            out.append(T.ite(lits[0], T.or_(lits[1], lits[2]), T.or_(*lits[1:])))
        elif shape < 0.18 and k >= 2:
            out.append(T.or_(T.eq(lits[0], lits[1]), *lits[1:]))
        else:
            out.append(T.or_(*lits) if k > 1 else lits[0])
    return out


def random_uf_script(rng: random.Random, n_atoms: int, ratio: float = 2.5,
                     n_consts: int | None = None, ite_rate: float = 0.05) -> Script:
    sort = T.usort("U")
    n_consts = n_consts or rng.randint(3, 6)
    consts = [T.var(f"c{i}", sort) for i in range(n_consts)]
    n_bools = rng.randint(0, max(1, n_atoms // 6))
    bools = [T.var(f"b{i}", BOOL) for i in range(n_bools)]
    decls = [Decl("sort", "U")]
    decls += [Decl("fun", c.name, (), sort) for c in consts]
    decls += [Decl("fun", "f", (sort,), sort), Decl("fun", "g", (sort, sort), sort),
              Decl("fun", "p", (sort,), BOOL)]
    decls += [Decl("fun", b.name, (), BOOL) for b in bools]

    def uterm(depth):
        r = rng.random()
        if depth == 0 or r < 0.55:
            return rng.choice(consts)
        if r < 0.8:
            return T.app("f", [uterm(depth - 1)], sort)
        if r < 0.8 + ite_rate:
            return T.ite(rng.choice(bools) if bools else T.eq(rng.choice(consts), rng.choice(consts)),
                         uterm(depth - 1), uterm(depth - 1))
        return T.app("g", [uterm(depth - 1), uterm(depth - 1)], sort)

    pool: list = []
    seen = set()
    pool.extend(bools[:n_atoms])
    seen.update(bools)
    tries = 0
    while len(pool) < n_atoms and tries < 50 * n_atoms:
        tries += 1
        if rng.random() < 0.2:
            a = T.app("p", [uterm(1)], BOOL)
        else:
            lhs, rhs = uterm(2), uterm(2)
            if lhs == rhs:
                continue
            a = T.eq(lhs, rhs)
        if a not in seen:
            seen.add(a)
            pool.append(a)
    body = _clauses(rng, pool, max(1, int(ratio * len(pool))))
    return Script("QF_UF", tuple(decls), tuple(body))


def random_idl_script(rng: random.Random, n_atoms: int, ratio: float = 2.5,
                      n_vars: int | None = None, bound: int = 4, ite_rate: float = 0.03) -> Script:
    n_vars = n_vars or rng.randint(4, 7)
    xs = [T.var(f"x{i}", INT) for i in range(n_vars)]
    n_bools = rng.randint(0, max(1, n_atoms // 8))
    bools = [T.var(f"b{i}", BOOL) for i in range(n_bools)]
    decls = [Decl("fun", x.name, (), INT) for x in xs] + [Decl("fun", b.name, (), BOOL) for b in bools]

    def k():
        return T.intc(rng.randint(-bound, bound))

    def operand():
        if rng.random() < ite_rate and bools:
            return T.ite(rng.choice(bools), rng.choice(xs), rng.choice(xs))
        return rng.choice(xs)

    def atom():
        x, y = rng.sample(xs, 2)
        r = rng.random()
        if r < 0.35:
            return T.leq(T.minus(operand(), y), k())
        if r < 0.5:
            return T.lt(x, T.plus(y, k()))
        if r < 0.65:
            return T.geq(T.minus(x, y), k())
        if r < 0.75:
            return T.gt(x, y)
        if r < 0.87:
            return T.eq(x, T.plus(y, k()))
        return rng.choice((T.leq, T.geq))(x, k())

    pool: list = list(bools[:n_atoms])
    seen = set(pool)
    tries = 0
    while len(pool) < n_atoms and tries < 50 * n_atoms:
        tries += 1
        a = atom()
        if a not in seen:
            seen.add(a)
            pool.append(a)
    body = _clauses(rng, pool, max(1, int(ratio * len(pool))))
    return Script("QF_IDL", tuple(decls), tuple(body))


def random_script(rng: random.Random, n_atoms: int, **kw) -> Script:
    if rng.random() < 0.5:
        return random_uf_script(rng, n_atoms, **kw)
    return random_idl_script(rng, n_atoms, **kw)


def pigeonhole_script(pigeons: int, holes: int) -> Script:
    """Propositional pigeonhole principle; unsat whenever pigeons > holes."""
    v = [[T.var(f"p{i}_{j}", BOOL) for j in range(holes)] for i in range(pigeons)]
    decls = [Decl("fun", x.name, (), BOOL) for row in v for x in row]
    body = [T.or_(*row) if len(row) > 1 else row[0] for row in v]
    for j in range(holes):
        for i in range(pigeons):
            for k in range(i + 1, pigeons):
                body.append(T.or_(T.not_(v[i][j]), T.not_(v[k][j])))
    return Script("QF_UF", tuple(decls), tuple(body))


def idl_pigeonhole_script(pigeons: int, holes: int) -> Script:
    """Pigeons get integer slots in [1, holes] and must be pairwise distinct.

    Unsat when pigeons > holes.  Each disequality is a disjunction of two
    difference atoms, so theory conflicts drive the search.
    """
    xs = [T.var(f"x{i}", INT) for i in range(pigeons)]
    decls = [Decl("fun", x.name, (), INT) for x in xs]
    body = []
    for x in xs:
        body.append(T.geq(x, T.intc(1)))
        body.append(T.leq(x, T.intc(holes)))
    for i in range(pigeons):
        for j in range(i + 1, pigeons):
            body.append(T.or_(T.lt(xs[i], xs[j]), T.gt(xs[i], xs[j])))
    return Script("QF_IDL", tuple(decls), tuple(body))


def job_shop_script(rng: random.Random, jobs: int, machines: int, horizon: int,
                    max_duration: int = 5) -> Script:
    """Random job-shop scheduling instance in difference logic."""
    starts = {(j, m): T.var(f"s{j}_{m}", INT) for j in range(jobs) for m in range(machines)}
    decls = [Decl("fun", s.name, (), INT) for s in starts.values()]
    dur = {(j, m): rng.randint(1, max_duration) for j in range(jobs) for m in range(machines)}
    body = []
    for j in range(jobs):
        order = list(range(machines))
        rng.shuffle(order)
        first = starts[(j, order[0])]
        body.append(T.geq(first, T.intc(0)))
        for a, b in zip(order, order[1:]):
            body.append(T.geq(T.minus(starts[(j, b)], starts[(j, a)]), T.intc(dur[(j, a)])))
        last = order[-1]
        body.append(T.leq(starts[(j, last)], T.intc(horizon - dur[(j, last)])))
    for m in range(machines):
        for j in range(jobs):
            for k in range(j + 1, jobs):
                a, b = starts[(j, m)], starts[(k, m)]
                body.append(T.or_(T.geq(T.minus(b, a), T.intc(dur[(j, m)])),
                                  T.geq(T.minus(a, b), T.intc(dur[(k, m)]))))
    return Script("QF_IDL", tuple(decls), tuple(body))


def random_3sat_script(rng: random.Random, n_vars: int, ratio: float = 4.26) -> Script:
    """Uniform random 3-CNF over Bool constants; hardest near ratio 4.26."""
    xs = [T.var(f"v{i}", BOOL) for i in range(n_vars)]
    decls = [Decl("fun", x.name, (), BOOL) for x in xs]
    body = []
    for _ in range(int(round(ratio * n_vars))):
        lits = [x if rng.random() < 0.5 else T.not_(x) for x in rng.sample(xs, 3)]
        body.append(T.or_(*lits))
    return Script("QF_UF", tuple(decls), tuple(body))
