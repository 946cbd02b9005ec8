"""Sorted terms for the QF_UF / QF_IDL fragment of SMT-LIB.

Terms are immutable and hashable, so they can be used as dictionary keys
(atom tables, Tseitin caches).  Constructors perform no simplification:
whatever the parser builds is printed back verbatim.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator


@dataclass(frozen=True)
class Sort:
    kind: str  # "Bool", "Int" or "U"
    name: str = ""

    def __str__(self) -> str:
        return self.name if self.kind == "U" else self.kind

    @property
    def is_uninterpreted(self) -> bool:
        return self.kind == "U"


BOOL = Sort("Bool")
INT = Sort("Int")


def usort(name: str) -> Sort:
    return Sort("U", name)


# operator tags
VAR = "var"
CONST = "const"
APP = "app"
EQ = "="
NOT = "not"
AND = "and"
OR = "or"
IMPLIES = "=>"
ITE = "ite"
LEQ = "<="
LT = "<"
GEQ = ">="
GT = ">"
PLUS = "+"
MINUS = "-"
NEG = "neg"

COMPARISONS = (LEQ, LT, GEQ, GT)
CONNECTIVES = (NOT, AND, OR, IMPLIES)


class Term:
    """A node of the term DAG.

    ``name`` is set for variables and applications, ``value`` for constants.
    Equality is structural; the hash is computed once at construction.
    """

    __slots__ = ("op", "args", "sort", "name", "value", "_hash")

    def __init__(self, op: str, args: tuple = (), sort: Sort = BOOL,
                 name: str | None = None, value=None):
        self.op = op
        self.args = args
        self.sort = sort
        self.name = name
        self.value = value
        self._hash = hash((op, args, sort, name, value))

    def __hash__(self) -> int:
        return self._hash

    def __eq__(self, other) -> bool:
        if self is other:
            return True
        if not isinstance(other, Term) or self._hash != other._hash:
            return False
        return (self.op == other.op and self.name == other.name
                and self.value == other.value and self.sort == other.sort
                and self.args == other.args)

    def __setattr__(self, key, value):
        if hasattr(self, "_hash"):
            raise AttributeError("Term is immutable")
        object.__setattr__(self, key, value)

    def __reduce__(self):
        return (Term, (self.op, self.args, self.sort, self.name, self.value))

    def __repr__(self) -> str:
        from .smtlib import format_term
        return f"Term({format_term(self)})"

    def __str__(self) -> str:
        from .smtlib import format_term
        return format_term(self)

    def is_bool(self) -> bool:
        return self.sort == BOOL

    def is_atom(self) -> bool:
        """Bool-sorted with no proper Bool-sorted subterm."""
        if self.sort != BOOL or self.op in CONNECTIVES or self.op == ITE:
            return False
        if self.op == CONST:
            return False
        if self.op == EQ and self.args[0].sort == BOOL:
            return False
        return not any(_has_bool_subterm(a) for a in self.args)

    def subterms(self) -> Iterator["Term"]:
        """Pre-order walk over distinct subterms."""
        seen = set()
        stack = [self]
        while stack:
            t = stack.pop()
            if t in seen:
                continue
            seen.add(t)
            yield t
            stack.extend(reversed(t.args))


def _has_bool_subterm(t: Term) -> bool:
    return t.sort == BOOL or any(_has_bool_subterm(a) for a in t.args)


def var(name: str, sort: Sort) -> Term:
    return Term(VAR, (), sort, name=name)


def app(name: str, args, sort: Sort) -> Term:
    return Term(APP, tuple(args), sort, name=name)


def boolc(b: bool) -> Term:
    return Term(CONST, (), BOOL, value=bool(b))


TRUE = boolc(True)
FALSE = boolc(False)


def intc(k: int) -> Term:
    return Term(CONST, (), INT, value=int(k))


def eq(a: Term, b: Term) -> Term:
    return Term(EQ, (a, b), BOOL)


def not_(t: Term) -> Term:
    return Term(NOT, (t,), BOOL)


def and_(*ts: Term) -> Term:
    return Term(AND, tuple(ts), BOOL)


def or_(*ts: Term) -> Term:
    return Term(OR, tuple(ts), BOOL)


def implies(a: Term, b: Term) -> Term:
    return Term(IMPLIES, (a, b), BOOL)


def ite(c: Term, a: Term, b: Term) -> Term:
    return Term(ITE, (c, a, b), a.sort)


def leq(a: Term, b: Term) -> Term:
    return Term(LEQ, (a, b), BOOL)


def lt(a: Term, b: Term) -> Term:
    return Term(LT, (a, b), BOOL)


def geq(a: Term, b: Term) -> Term:
    return Term(GEQ, (a, b), BOOL)


def gt(a: Term, b: Term) -> Term:
    return Term(GT, (a, b), BOOL)


def plus(a: Term, b: Term) -> Term:
    return Term(PLUS, (a, b), INT)


def minus(a: Term, b: Term) -> Term:
    return Term(MINUS, (a, b), INT)


def neg(t: Term) -> Term:
    return Term(NEG, (t,), INT)


def conj(lits) -> Term:
    """Conjunction that collapses the one-element case to the element."""
    lits = tuple(lits)
    if not lits:
        return TRUE
    return lits[0] if len(lits) == 1 else and_(*lits)


def negate(t: Term) -> Term:
    """Negate a literal without stacking double negations."""
    return t.args[0] if t.op == NOT else not_(t)


def free_symbols(t: Term) -> set[str]:
    """Names of variables and function symbols occurring in ``t``."""
    return {s.name for s in t.subterms() if s.op in (VAR, APP)}


def rebuild(t: Term, args) -> Term:
    return Term(t.op, tuple(args), t.sort, name=t.name, value=t.value)
