"""First-order models and a direct term evaluator.

The evaluator does not share code with the solver; it is what soundness
checks use to confirm that a reported model satisfies the input.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from . import terms as T
from .terms import BOOL, INT, Term


@dataclass
class Model:
    """Constants map to bool / int / str (elements of uninterpreted sorts are
    strings).  ``functions[f]`` maps argument tuples to values; missing
    entries fall back to ``default[f]``."""

    constants: dict = field(default_factory=dict)
    functions: dict = field(default_factory=dict)
    default: dict = field(default_factory=dict)

    def __getitem__(self, name):
        return self.constants[name]


def _default_for(sort):
    if sort == BOOL:
        return False
    if sort == INT:
        return 0
    return f"{sort.name}!0"


def evaluate(t: Term, m: Model):
    cache: dict = {}

    def ev(s: Term):
        r = cache.get(s)
        if r is None and s not in cache:
            r = _eval(s)
            cache[s] = r
        return r

    def _eval(s: Term):
        op = s.op
        if op == T.CONST:
            return s.value
        if op == T.VAR:
            return m.constants.get(s.name, _default_for(s.sort))
        if op == T.APP:
            key = tuple(ev(a) for a in s.args)
            table = m.functions.get(s.name, {})
            if key in table:
                return table[key]
            return m.default.get(s.name, _default_for(s.sort))
        if op == T.NOT:
            return not ev(s.args[0])
        if op == T.AND:
            return all(ev(a) for a in s.args)
        if op == T.OR:
            return any(ev(a) for a in s.args)
        if op == T.IMPLIES:
            return (not ev(s.args[0])) or ev(s.args[1])
        if op == T.ITE:
            return ev(s.args[1]) if ev(s.args[0]) else ev(s.args[2])
        if op == T.EQ:
            return ev(s.args[0]) == ev(s.args[1])
        a = [ev(x) for x in s.args]
        if op == T.LEQ:
            return a[0] <= a[1]
        if op == T.LT:
            return a[0] < a[1]
        if op == T.GEQ:
            return a[0] >= a[1]
        if op == T.GT:
            return a[0] > a[1]
        if op == T.PLUS:
            return a[0] + a[1]
        if op == T.MINUS:
            return a[0] - a[1]
        if op == T.NEG:
            return -a[0]
        raise ValueError(f"cannot evaluate {op}")

    return ev(t)


def satisfies(m: Model, script) -> bool:
    return all(evaluate(a, m) is True for a in script.assertions)
