"""Boolean abstraction of a Script.

Every theory atom gets exactly one Boolean variable.  Difference atoms are
normalised to ``x - y <= c`` over an orientation fixed by name order, so
``(<= x y)`` and ``(> x y)`` share a variable with opposite polarities.
Int equalities become the conjunction of two such atoms.  Non-Bool
``ite`` terms are replaced by fresh constants ``ite!k`` constrained by a
side assertion.

Literals are ints: ``2 * var`` for positive, ``2 * var + 1`` for negative.
"""
from __future__ import annotations

from dataclasses import dataclass

from .. import terms as T
from ..smtlib import format_term, linear_form
from ..terms import BOOL, INT, Term
from .idl import check_constant

ZERO = ""  # reference variable for single-variable bounds


@dataclass
class Atom:
    var: int
    kind: str  # "bool", "eq", "pred" or "diff"
    term: Term  # var is true exactly when this term is true
    data: tuple


def lit_var(lit: int) -> int:
    return lit >> 1


def lit_sign(lit: int) -> bool:
    """True for positive literals."""
    return not (lit & 1)


class Encoder:
    def __init__(self, script):
        self.script = script
        self.nvars = 0
        self.clauses: list[list[int]] = []
        self.atoms: dict[int, Atom] = {}
        self.atom_key: dict = {}
        self.cache: dict[Term, int] = {}
        self.lifted: dict[Term, Term] = {}
        self.ite_count = 0
        self.true_var = self.new_var()
        self.true_lit = 2 * self.true_var
        self.clauses.append([self.true_lit])
        for a in script.assertions:
            self.assert_term(a)

    def new_var(self) -> int:
        v = self.nvars
        self.nvars += 1
        return v

    # ---------------------------------------------------------------- lifting

    def lift(self, t: Term) -> Term:
        """Replace non-Bool ite subterms by fresh constants."""
        done = self.lifted.get(t)
        if done is not None:
            return done
        if not t.args:
            out = t
        else:
            args = tuple(self.lift(a) for a in t.args)
            if t.op == T.ITE and t.sort != BOOL:
                k = T.var(f"ite!{self.ite_count}", t.sort)
                self.ite_count += 1
                c, a, b = args
                self.assert_lifted(T.ite(c, T.eq(k, a), T.eq(k, b)))
                out = k
            else:
                out = t if args == t.args else T.rebuild(t, args)
        self.lifted[t] = out
        return out

    def assert_term(self, t: Term):
        self.assert_lifted(self.lift(t))

    def assert_lifted(self, t: Term):
        if t.op == T.AND:
            for a in t.args:
                self.assert_lifted(a)
        elif t.op == T.OR:
            self.clauses.append([self.lit(a) for a in t.args])
        else:
            self.clauses.append([self.lit(t)])

    # -------------------------------------------------------------- encoding

    def lit(self, t: Term) -> int:
        cached = self.cache.get(t)
        if cached is not None:
            return cached
        out = self._encode(t)
        self.cache[t] = out
        return out

    def _gate(self) -> int:
        return 2 * self.new_var()

    def _encode(self, t: Term) -> int:
        op = t.op
        if op == T.CONST:
            return self.true_lit if t.value else self.true_lit ^ 1
        if op == T.NOT:
            return self.lit(t.args[0]) ^ 1
        if op in (T.AND, T.OR):
            xs = [self.lit(a) for a in t.args]
            g = self._gate()
            if op == T.OR:  # g <-> or(xs)  ==  ~g <-> and(~xs)
                xs = [x ^ 1 for x in xs]
                g ^= 1
            for x in xs:
                self.clauses.append([g ^ 1, x])
            self.clauses.append([g] + [x ^ 1 for x in xs])
            return g if op == T.AND else g ^ 1
        if op == T.IMPLIES:
            return self.lit(T.or_(T.not_(t.args[0]), t.args[1]))
        if op == T.ITE:  # Bool-sorted only after lifting
            c, a, b = (self.lit(x) for x in t.args)
            g = self._gate()
            self.clauses += [[g ^ 1, c ^ 1, a], [g ^ 1, c, b], [g, c ^ 1, a ^ 1], [g, c, b ^ 1]]
            return g
        if op == T.EQ:
            lhs, rhs = t.args
            if lhs.sort == BOOL:
                a, b = self.lit(lhs), self.lit(rhs)
                g = self._gate()
                self.clauses += [[g ^ 1, a ^ 1, b], [g ^ 1, a, b ^ 1], [g, a, b], [g, a ^ 1, b ^ 1]]
                return g
            if lhs.sort == INT:
                return self.lit(T.and_(T.leq(lhs, rhs), T.geq(lhs, rhs)))
            return self._eq_atom(t)
        if op in T.COMPARISONS:
            return self._diff_atom(t)
        if op == T.VAR and t.sort == BOOL:
            return self._atom(("bool", t.name), "bool", t, ())
        if op == T.APP and t.sort == BOOL:
            return self._atom(("pred", t), "pred", t, (t,))
        raise ValueError(f"cannot encode {op}")

    def _atom(self, key, kind: str, term: Term, data: tuple) -> int:
        v = self.atom_key.get(key)
        if v is None:
            v = self.new_var()
            self.atom_key[key] = v
            self.atoms[v] = Atom(v, kind, term, data)
        return 2 * v

    def _eq_atom(self, t: Term) -> int:
        a, b = t.args
        if a == b:
            return self.true_lit
        if format_term(a) > format_term(b):
            a, b = b, a
        return self._atom(("eq", a, b), "eq", T.eq(a, b), (a, b))

    def _diff_atom(self, t: Term) -> int:
        coeffs, k = linear_form(T.minus(t.args[0], t.args[1]))
        # t is  sum(coeffs) + k  <op>  0 ; rewrite as  s <= c
        if t.op in (T.GEQ, T.GT):
            coeffs = {v: -c for v, c in coeffs.items()}
            k = -k
        c = -k - (1 if t.op in (T.LT, T.GT) else 0)
        x = next((v for v, n in coeffs.items() if n == 1), ZERO)
        y = next((v for v, n in coeffs.items() if n == -1), ZERO)
        if len(coeffs) > 2 or any(n not in (1, -1) for n in coeffs.values()):
            raise ValueError(f"non-difference atom {format_term(t)}")
        return self.diff_lit(x, y, c)

    def diff_lit(self, x: str, y: str, c: int) -> int:
        """Literal for x - y <= c."""
        if x == y:
            return self.true_lit if 0 <= c else self.true_lit ^ 1
        check_constant(c)
        if x > y:  # not(y - x <= -c - 1)
            return self.diff_lit(y, x, -c - 1) ^ 1
        key = ("diff", x, y, c)
        v = self.atom_key.get(key)
        if v is None:
            lit = self._atom(key, "diff", _diff_term(x, y, c), (x, y, c))
            self.cache.setdefault(self.atoms[lit >> 1].term, lit)
            return lit
        return 2 * v


def _diff_term(x: str, y: str, c: int) -> Term:
    if y == ZERO:
        return T.leq(T.var(x, INT), T.intc(c))
    if x == ZERO:
        return T.geq(T.var(y, INT), T.intc(-c))
    return T.leq(T.minus(T.var(x, INT), T.var(y, INT)), T.intc(c))
