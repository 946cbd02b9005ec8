import random

import pytest
from hypothesis import given, settings, strategies as st

from oracle import bellman_ford_consistent, euf_consistent, idl_consistent
from partsmt import terms as T
from partsmt.solver import idl
from partsmt.solver.euf import CongruenceClosure

U = T.usort("U")
a, b, c = (T.var(n, U) for n in "abc")


def f(x):
    return T.app("f", [x], U)


def run_euf(eqs, diseqs):
    cc = CongruenceClosure()
    lits = {}
    triples = []
    for kind, pairs in (("eq", eqs), ("ne", diseqs)):
        out = []
        for x, y in pairs:
            lit = len(lits)
            lits[lit] = (kind, x, y)
            out.append((cc.register(x), cc.register(y), lit))
        triples.append(out)
    return cc.check(*triples), lits


def test_transitivity_conflict():
    expl, lits = run_euf([(a, b), (b, c)], [(a, c)])
    assert expl is not None and set(expl) <= set(lits)
    assert set(expl) == set(lits)


def test_congruence_conflict():
    expl, lits = run_euf([(a, b)], [(f(a), f(b))])
    assert expl is not None and set(expl) == set(lits)


def test_consistent_euf():
    expl, _ = run_euf([(a, b)], [(f(a), c)])
    assert expl is None


def _random_uterm(r, depth):
    consts = [T.var(f"k{i}", U) for i in range(4)]
    if depth == 0 or r.random() < 0.5:
        return r.choice(consts)
    if r.random() < 0.6:
        return T.app("f", [_random_uterm(r, depth - 1)], U)
    return T.app("g", [_random_uterm(r, depth - 1), _random_uterm(r, depth - 1)], U)


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 10**9))
def test_euf_against_naive_closure(seed):
    r = random.Random(seed)
    eqs, diseqs = [], []
    for _ in range(20):
        pair = (_random_uterm(r, 2), _random_uterm(r, 2))
        (eqs if r.random() < 0.75 else diseqs).append(pair)
    expl, lits = run_euf(eqs, diseqs)
    assert (expl is None) == euf_consistent(eqs, diseqs, [])
    if expl is not None:
        sub_eq = [(x, y) for k, x, y in (lits[i] for i in expl) if k == "eq"]
        sub_ne = [(x, y) for k, x, y in (lits[i] for i in expl) if k == "ne"]
        assert not euf_consistent(sub_eq, sub_ne, [])


def test_idl_two_cycle_conflict():
    cycle, pot = idl.check([("x", "y", -1, 0), ("y", "x", 0, 1)])
    assert pot is None and sorted(cycle) == [0, 1]


def test_idl_zero_cycle_is_consistent():
    cycle, pot = idl.check([("x", "y", 5, 0), ("y", "x", -5, 1)])
    assert cycle is None
    assert pot["x"] - pot["y"] <= 5 and pot["y"] - pot["x"] <= -5


def test_idl_constant_bound():
    idl.check_constant(idl.MAX_CONSTANT)
    with pytest.raises(idl.IDLRangeError):
        idl.check([("x", "y", idl.MAX_CONSTANT + 1, 0)])


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 10**9))
def test_idl_against_bellman_ford(seed):
    r = random.Random(seed)
    names = [f"x{i}" for i in range(6)] + [None]
    cons = []
    for i in range(30):
        x, y = r.sample(names, 2)
        cons.append((x, y, r.randint(-6, 8), i))
    cycle, pot = idl.check(cons)
    plain = [(x, y, k) for x, y, k, _ in cons]
    assert (cycle is None) == bellman_ford_consistent(plain) == idl_consistent(plain)
    if cycle is None:
        assert all(pot[x] - pot[y] <= k for x, y, k in plain)
    else:
        picked = [(x, y, k) for x, y, k, tag in cons if tag in set(cycle)]
        assert sum(k for _, _, k in picked) < 0
        assert not bellman_ford_consistent(picked)
