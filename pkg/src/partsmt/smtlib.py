"""Reader and writer for the QF_UF / QF_IDL subset of SMT-LIB v2.

Supported commands: set-logic, declare-sort, declare-fun, declare-const,
assert, check-sat, exit.  set-info, set-option and get-* commands are
skipped.  ``let`` is expanded inline, ``distinct`` and chained
``=``/comparisons are expanded into binary form, ``(! t ...)`` annotations
are dropped.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field

from . import terms as T
from .terms import BOOL, INT, Sort, Term

LOGICS = ("QF_UF", "QF_IDL")


class SMTLibError(ValueError):
    """Base class for input errors; carries a 1-based line/column."""

    def __init__(self, msg: str, line: int = 0, col: int = 0):
        self.line = line
        self.col = col
        where = f"{line}:{col}: " if line else ""
        super().__init__(where + msg)


class ParseError(SMTLibError):
    pass


class SortError(SMTLibError):
    pass


class UnsupportedLogicError(SMTLibError):
    pass


class NonDifferenceError(SMTLibError):
    """Arithmetic outside the x - y <op> c shape of difference logic."""


@dataclass(frozen=True)
class Decl:
    kind: str  # "sort" or "fun"
    name: str
    arg_sorts: tuple = ()
    sort: Sort | None = None


@dataclass(frozen=True)
class Script:
    logic: str
    declarations: tuple = ()
    assertions: tuple = ()
    filename: str = field(default="", compare=False)

    def declared_names(self) -> set[str]:
        return {d.name for d in self.declarations if d.kind == "fun"}

    def functions(self) -> dict[str, Decl]:
        return {d.name: d for d in self.declarations if d.kind == "fun"}

    def with_assertions(self, assertions) -> "Script":
        return Script(self.logic, self.declarations, tuple(assertions), self.filename)


# --------------------------------------------------------------------------
# s-expressions

_TOKEN = re.compile(r"""
    (?P<ws>\s+)
  | (?P<comment>;[^\n]*)
  | (?P<lpar>\()
  | (?P<rpar>\))
  | (?P<string>"(?:[^"]|"")*")
  | (?P<quoted>\|[^|\\]*\|)
  | (?P<numeral>0|[1-9][0-9]*)(?![A-Za-z0-9~!@$%^&*_\-+=<>.?/])
  | (?P<keyword>:[A-Za-z0-9~!@$%^&*_\-+=<>.?/]+)
  | (?P<symbol>[A-Za-z~!@$%^&*_\-+=<>.?/][A-Za-z0-9~!@$%^&*_\-+=<>.?/]*)
""", re.VERBOSE)


@dataclass(frozen=True)
class Tok:
    kind: str
    text: str
    line: int
    col: int


def tokenize(text: str) -> list[Tok]:
    out = []
    pos, line, line_start = 0, 1, 0
    n = len(text)
    while pos < n:
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        s = m.group()
        if kind not in ("ws", "comment"):
            if kind == "quoted":
                s = s[1:-1]
                kind = "symbol"
            out.append(Tok(kind, s, line, pos - line_start + 1))
        raw = m.group()
        nl = raw.count("\n")
        if nl:
            line += nl
            line_start = pos + raw.rfind("\n") + 1
        pos = m.end()
    return out


def read_sexprs(text: str) -> list:
    """Nested lists of Tok; a list is represented as (open_tok, [items])."""
    toks = tokenize(text)
    stack: list = [(None, [])]
    for tok in toks:
        if tok.kind == "lpar":
            stack.append((tok, []))
        elif tok.kind == "rpar":
            if len(stack) == 1:
                raise ParseError("unbalanced ')'", tok.line, tok.col)
            done = stack.pop()
            stack[-1][1].append(done)
        else:
            stack[-1][1].append(tok)
    if len(stack) != 1:
        tok = stack[-1][0]
        raise ParseError("unbalanced '('", tok.line, tok.col)
    return stack[0][1]


def _pos(sx) -> tuple[int, int]:
    tok = sx[0] if isinstance(sx, tuple) else sx
    return (tok.line, tok.col) if tok is not None else (0, 0)


# --------------------------------------------------------------------------
# elaboration

class _Reader:
    def __init__(self, filename: str = ""):
        self.filename = filename
        self.logic: str | None = None
        self.sorts: dict[str, Sort] = {}
        self.funs: dict[str, Decl] = {}
        self.decls: list[Decl] = []
        self.assertions: list[Term] = []

    def err(self, cls, msg, sx):
        return cls(msg, *_pos(sx))

    def command(self, sx):
        if not isinstance(sx, tuple) or not sx[1] or not isinstance(sx[1][0], Tok):
            raise self.err(ParseError, "expected a command", sx)
        head, args = sx[1][0].text, sx[1][1:]
        if head == "set-logic":
            if self.logic is not None:
                raise self.err(ParseError, "logic already set", sx)
            name = self.symbol(args[0]) if len(args) == 1 else None
            if name not in LOGICS:
                raise self.err(UnsupportedLogicError, f"unsupported logic {name}", sx)
            self.logic = name
            return
        if head in ("set-info", "set-option", "get-model", "get-info",
                    "get-value", "get-assignment", "get-option", "check-sat", "exit"):
            return
        if self.logic is None:
            raise self.err(ParseError, f"{head} before set-logic", sx)
        if head == "declare-sort":
            if self.logic != "QF_UF":
                raise self.err(SortError, "declare-sort requires QF_UF", sx)
            name = self.symbol(args[0])
            if len(args) > 1 and self.symbol(args[1]) != "0":
                raise self.err(SortError, "only nullary sorts are supported", sx)
            if name in self.sorts:
                raise self.err(SortError, f"sort {name} redeclared", sx)
            self.sorts[name] = T.usort(name)
            self.decls.append(Decl("sort", name))
        elif head in ("declare-fun", "declare-const"):
            name = self.symbol(args[0])
            if head == "declare-fun":
                if len(args) != 3 or not isinstance(args[1], tuple):
                    raise self.err(ParseError, "malformed declare-fun", sx)
                arg_sorts = tuple(self.sort(a) for a in args[1][1])
                ret = self.sort(args[2])
            else:
                if len(args) != 2:
                    raise self.err(ParseError, "malformed declare-const", sx)
                arg_sorts, ret = (), self.sort(args[1])
            if name in self.funs or name in _RESERVED:
                raise self.err(SortError, f"symbol {name} redeclared", sx)
            if arg_sorts and self.logic == "QF_IDL":
                raise self.err(SortError, "function symbols are not allowed in QF_IDL", sx)
            if any(s == BOOL for s in arg_sorts):
                raise self.err(SortError, "Bool-sorted function arguments are not supported", sx)
            d = Decl("fun", name, arg_sorts, ret)
            self.funs[name] = d
            self.decls.append(d)
        elif head == "assert":
            if len(args) != 1:
                raise self.err(ParseError, "assert takes one term", sx)
            t = self.term(args[0], {})
            if t.sort != BOOL:
                raise self.err(SortError, "asserted term is not Bool", sx)
            self.assertions.append(t)
        else:
            raise self.err(ParseError, f"unsupported command {head}", sx)

    def symbol(self, sx) -> str:
        if not isinstance(sx, Tok) or sx.kind not in ("symbol", "numeral"):
            raise self.err(ParseError, "expected a symbol", sx)
        return sx.text

    def sort(self, sx) -> Sort:
        name = self.symbol(sx)
        if name == "Bool":
            return BOOL
        if name == "Int":
            if self.logic != "QF_IDL":
                raise self.err(SortError, "Int requires QF_IDL", sx)
            return INT
        if name not in self.sorts:
            raise self.err(SortError, f"undeclared sort {name}", sx)
        return self.sorts[name]

    # terms ---------------------------------------------------------------

    def term(self, sx, scope) -> Term:
        if isinstance(sx, Tok):
            return self.leaf(sx, scope)
        items = sx[1]
        if not items:
            raise self.err(ParseError, "empty application", sx)
        head = items[0]
        if not isinstance(head, Tok) or head.kind != "symbol":
            raise self.err(ParseError, "expected an operator symbol", sx)
        op, rest = head.text, items[1:]
        if op == "let":
            return self.let(sx, rest, scope)
        if op == "!":
            return self.term(rest[0], scope)
        if op == "*" or op in ("div", "mod", "abs", "/"):
            raise self.err(NonDifferenceError, f"'{op}' is not difference arithmetic", sx)
        if op == "-" and len(rest) == 1 and isinstance(rest[0], Tok) and rest[0].kind == "numeral":
            if self.logic != "QF_IDL":
                raise self.err(SortError, "numerals require QF_IDL", sx)
            return T.intc(-int(rest[0].text))
        args = [self.term(a, scope) for a in rest]
        return self.apply(op, args, sx)

    def leaf(self, tok: Tok, scope) -> Term:
        if tok.kind == "numeral":
            if self.logic != "QF_IDL":
                raise self.err(SortError, "numerals require QF_IDL", tok)
            return T.intc(int(tok.text))
        if tok.kind != "symbol":
            raise self.err(ParseError, f"unexpected {tok.kind}", tok)
        name = tok.text
        if name in scope:
            return scope[name]
        if name == "true":
            return T.TRUE
        if name == "false":
            return T.FALSE
        d = self.funs.get(name)
        if d is None:
            raise self.err(SortError, f"undeclared symbol {name}", tok)
        if d.arg_sorts:
            raise self.err(SortError, f"{name} expects {len(d.arg_sorts)} arguments", tok)
        return T.var(name, d.sort)

    def let(self, sx, rest, scope) -> Term:
        if len(rest) != 2 or not isinstance(rest[0], tuple):
            raise self.err(ParseError, "malformed let", sx)
        inner = dict(scope)
        for b in rest[0][1]:
            if not isinstance(b, tuple) or len(b[1]) != 2:
                raise self.err(ParseError, "malformed let binding", b)
            inner[self.symbol(b[1][0])] = self.term(b[1][1], scope)
        return self.term(rest[1], inner)

    def apply(self, op: str, args: list[Term], sx) -> Term:
        def need(cond, msg, cls=SortError):
            if not cond:
                raise self.err(cls, msg, sx)

        def all_bool():
            need(all(a.sort == BOOL for a in args), f"'{op}' expects Bool arguments")

        def all_int():
            need(all(a.sort == INT for a in args), f"'{op}' expects Int arguments")

        if op == "not":
            need(len(args) == 1, "'not' takes one argument")
            all_bool()
            return T.not_(args[0])
        if op in ("and", "or"):
            need(len(args) >= 1, f"'{op}' needs arguments")
            all_bool()
            return T.Term(op, tuple(args), BOOL)
        if op == "=>":
            need(len(args) >= 2, "'=>' needs two arguments")
            all_bool()
            out = args[-1]
            for a in reversed(args[:-1]):
                out = T.implies(a, out)
            return out
        if op == "xor":
            need(len(args) == 2, "'xor' takes two arguments")
            all_bool()
            return T.not_(T.eq(args[0], args[1]))
        if op in ("=", "distinct"):
            need(len(args) >= 2, f"'{op}' needs two arguments")
            need(all(a.sort == args[0].sort for a in args), f"'{op}' arguments differ in sort")
            if op == "=":
                pairs = list(zip(args, args[1:]))
            else:
                pairs = [(a, b) for i, a in enumerate(args) for b in args[i + 1:]]
            parts = [T.eq(a, b) for a, b in pairs]
            for p in parts:
                self.check_difference(p, sx)
            if op == "distinct":
                parts = [T.not_(p) for p in parts]
            return T.conj(parts)
        if op == "ite":
            need(len(args) == 3, "'ite' takes three arguments")
            need(args[0].sort == BOOL, "'ite' condition must be Bool")
            need(args[1].sort == args[2].sort, "'ite' branches differ in sort")
            return T.ite(*args)
        if op in T.COMPARISONS:
            need(len(args) >= 2, f"'{op}' needs two arguments")
            all_int()
            parts = [T.Term(op, (a, b), BOOL) for a, b in zip(args, args[1:])]
            for p in parts:
                self.check_difference(p, sx)
            return T.conj(parts)
        if op == "+":
            need(len(args) >= 2, "'+' needs two arguments")
            all_int()
            out = args[0]
            for a in args[1:]:
                out = T.plus(out, a)
            return out
        if op == "-":
            need(len(args) >= 1, "'-' needs arguments")
            all_int()
            if len(args) == 1:
                return T.neg(args[0])
            out = args[0]
            for a in args[1:]:
                out = T.minus(out, a)
            return out
        d = self.funs.get(op)
        if d is None:
            raise self.err(SortError, f"undeclared function {op}", sx)
        need(len(args) == len(d.arg_sorts), f"{op} expects {len(d.arg_sorts)} arguments")
        need(all(a.sort == s for a, s in zip(args, d.arg_sorts)), f"argument sort mismatch for {op}")
        if not d.arg_sorts:
            return T.var(op, d.sort)
        return T.app(op, args, d.sort)

    def check_difference(self, atom: Term, sx):
        if atom.args[0].sort != INT:
            return
        try:
            difference_form(atom.args[0], atom.args[1])
        except ValueError as e:
            raise self.err(NonDifferenceError, str(e), sx) from None


_RESERVED = {"true", "false", "not", "and", "or", "=>", "xor", "=", "distinct",
             "ite", "let", "<=", "<", ">=", ">", "+", "-", "*", "!"}


def linear_form(t: Term) -> tuple[dict, int]:
    """Coefficients of ``t`` as {key: coeff} plus a constant.

    Variables are keyed by name; Int-sorted ``ite`` subterms are treated as
    opaque unknowns keyed by the term itself.
    """
    coeffs: dict = {}
    const = 0
    stack = [(t, 1)]
    while stack:
        s, k = stack.pop()
        if s.op == T.CONST:
            const += k * s.value
        elif s.op == T.VAR:
            coeffs[s.name] = coeffs.get(s.name, 0) + k
        elif s.op == T.ITE:
            coeffs[s] = coeffs.get(s, 0) + k
        elif s.op == T.PLUS:
            stack.append((s.args[0], k))
            stack.append((s.args[1], k))
        elif s.op == T.MINUS:
            stack.append((s.args[0], k))
            stack.append((s.args[1], -k))
        elif s.op == T.NEG:
            stack.append((s.args[0], -k))
        else:
            raise ValueError(f"unsupported Int term {s.op}")
    return {v: c for v, c in coeffs.items() if c != 0}, const


def difference_form(lhs: Term, rhs: Term):
    """Return (x, y, k) with lhs - rhs == x - y + k; x or y may be None."""
    coeffs, k = linear_form(T.minus(lhs, rhs))
    pos = [v for v, c in coeffs.items() if c == 1]
    negs = [v for v, c in coeffs.items() if c == -1]
    if len(coeffs) > 2 or len(pos) + len(negs) != len(coeffs) or len(pos) > 1 or len(negs) > 1:
        raise ValueError("non-difference arithmetic")
    return (pos[0] if pos else None), (negs[0] if negs else None), k


def parse_script(text: str, filename: str = "") -> Script:
    r = _Reader(filename)
    for sx in read_sexprs(text):
        r.command(sx)
    if r.logic is None:
        raise ParseError("no set-logic command")
    return Script(r.logic, tuple(r.decls), tuple(r.assertions), filename)


def parse_file(path) -> Script:
    with open(path, encoding="utf-8") as f:
        return parse_script(f.read(), str(path))


def parse_term(text: str, script: Script) -> Term:
    """Elaborate one term against the declarations of ``script``."""
    r = _Reader()
    r.logic = script.logic
    for d in script.declarations:
        if d.kind == "sort":
            r.sorts[d.name] = T.usort(d.name)
        else:
            r.funs[d.name] = d
    sxs = read_sexprs(text)
    if len(sxs) != 1:
        raise ParseError("expected exactly one term")
    return r.term(sxs[0], {})


# --------------------------------------------------------------------------
# printing

_SIMPLE = re.compile(r"[A-Za-z~!@$%^&*_\-+=<>.?/][A-Za-z0-9~!@$%^&*_\-+=<>.?/]*\Z")


def format_symbol(name: str) -> str:
    return name if _SIMPLE.match(name) and name not in _RESERVED else f"|{name}|"


def format_sort(s: Sort) -> str:
    return format_symbol(s.name) if s.is_uninterpreted else s.kind


def format_term(t: Term) -> str:
    parts: list[str] = []
    _emit(t, parts)
    return "".join(parts)


def _emit(t: Term, out: list[str]):
    op = t.op
    if op == T.VAR:
        out.append(format_symbol(t.name))
    elif op == T.CONST:
        if t.sort == BOOL:
            out.append("true" if t.value else "false")
        elif t.value < 0:
            out.append(f"(- {-t.value})")
        else:
            out.append(str(t.value))
    else:
        head = {T.APP: None, T.NEG: "-"}.get(op, op)
        out.append("(" + (format_symbol(t.name) if head is None else head))
        for a in t.args:
            out.append(" ")
            _emit(a, out)
        out.append(")")


def print_script(s: Script) -> str:
    lines = [f"(set-logic {s.logic})"]
    for d in s.declarations:
        if d.kind == "sort":
            lines.append(f"(declare-sort {format_symbol(d.name)} 0)")
        else:
            args = " ".join(format_sort(a) for a in d.arg_sorts)
            lines.append(f"(declare-fun {format_symbol(d.name)} ({args}) {format_sort(d.sort)})")
    for a in s.assertions:
        lines.append(f"(assert {format_term(a)})")
    lines.append("(check-sat)")
    lines.append("(exit)")
    return "\n".join(lines) + "\n"
