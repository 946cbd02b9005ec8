"""Congruence closure with explanations for equality over uninterpreted
functions.

The closure is rebuilt from scratch on every check; the term registry
persists across checks.  Explanations come from a proof forest: each merge
records an edge labelled either by an input literal or by the pair of
applications whose congruence forced it.
"""
from __future__ import annotations

from ..terms import BOOL, Term
from .. import terms as T

TRUE_NODE = 0
FALSE_NODE = 1


class CongruenceClosure:
    def __init__(self):
        self.node_of: dict[Term, int] = {}
        self.terms: list = [T.TRUE, T.FALSE]
        self.fn: list = [None, None]
        self.args: list[tuple] = [(), ()]
        self.node_of[T.TRUE] = TRUE_NODE
        self.node_of[T.FALSE] = FALSE_NODE

    def register(self, t: Term) -> int:
        n = self.node_of.get(t)
        if n is not None:
            return n
        args = tuple(self.register(a) for a in t.args) if t.op == T.APP else ()
        n = len(self.terms)
        self.terms.append(t)
        self.fn.append(t.name if t.op == T.APP else None)
        self.args.append(args)
        self.node_of[t] = n
        return n

    def check(self, equalities, disequalities):
        """``equalities``/``disequalities`` are (node, node, lit) triples.

        Returns None when consistent, otherwise a list of lits whose
        conjunction is unsatisfiable.
        """
        state = _Closure(self)
        for a, b, lit in equalities:
            state.merge(a, b, lit)
        if state.find(TRUE_NODE) == state.find(FALSE_NODE):
            return state.explain(TRUE_NODE, FALSE_NODE)
        for a, b, lit in disequalities:
            if state.find(a) == state.find(b):
                return state.explain(a, b) + [lit]
        self.last = state
        return None

    def classes(self) -> list[int]:
        """Representative per node from the last consistent check."""
        return [self.last.find(n) for n in range(len(self.terms))]


class _Closure:
    def __init__(self, cc: CongruenceClosure):
        n = len(cc.terms)
        self.cc = cc
        self.parent = list(range(n))
        self.members = [[i] for i in range(n)]
        self.uses: list[list[int]] = [[] for _ in range(n)]
        self.table: dict = {}
        self.pf_parent: list = [None] * n
        self.pf_reason: list = [None] * n
        for node in range(n):
            args = cc.args[node]
            if args:
                for a in set(args):
                    self.uses[a].append(node)
                self.table[(cc.fn[node], args)] = node

    def find(self, a: int) -> int:
        parent = self.parent
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    def merge(self, a: int, b: int, reason):
        pending = [(a, b, reason)]
        cc = self.cc
        while pending:
            a, b, reason = pending.pop()
            ra, rb = self.find(a), self.find(b)
            if ra == rb:
                continue
            self._link_proof(a, b, reason)
            if len(self.members[ra]) > len(self.members[rb]):
                ra, rb = rb, ra
            self.parent[ra] = rb
            self.members[rb].extend(self.members[ra])
            for app in self.uses[ra]:
                sig = (cc.fn[app], tuple(self.find(x) for x in cc.args[app]))
                other = self.table.get(sig)
                if other is None:
                    self.table[sig] = app
                elif self.find(other) != self.find(app):
                    pending.append((app, other, ("cong", app, other)))
            self.uses[rb].extend(self.uses[ra])

    def _link_proof(self, a: int, b: int, reason):
        # make a the root of its proof tree, then hang it below b
        prev, prev_reason, node = None, None, a
        while node is not None:
            nxt, nxt_reason = self.pf_parent[node], self.pf_reason[node]
            self.pf_parent[node], self.pf_reason[node] = prev, prev_reason
            prev, prev_reason, node = node, nxt_reason, nxt
        self.pf_parent[a] = b
        self.pf_reason[a] = reason

    def _path(self, a: int, b: int):
        ancestors = {}
        node, depth = a, 0
        while node is not None:
            ancestors[node] = depth
            node, depth = self.pf_parent[node], depth + 1
        edges = []
        node = b
        while node not in ancestors:
            edges.append(self.pf_reason[node])
            node = self.pf_parent[node]
        lca = node
        node = a
        while node != lca:
            edges.append(self.pf_reason[node])
            node = self.pf_parent[node]
        return edges

    def explain(self, a: int, b: int) -> list:
        lits: list = []
        seen_lits = set()
        done = set()
        work = [(a, b)]
        args = self.cc.args
        while work:
            x, y = work.pop()
            if x == y or (x, y) in done:
                continue
            done.add((x, y))
            for reason in self._path(x, y):
                if isinstance(reason, tuple) and reason and reason[0] == "cong":
                    _, p, q = reason
                    work.extend(zip(args[p], args[q]))
                elif reason not in seen_lits:
                    seen_lits.add(reason)
                    lits.append(reason)
        return lits


def is_bool_app(t: Term) -> bool:
    return t.op == T.APP and t.sort == BOOL
