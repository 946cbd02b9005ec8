"""Reference decision procedures used as test oracles.

Nothing here imports from ``partsmt.solver``.  Satisfiability is decided by
enumerating polarities of the atoms in a fixed order, pruning a branch as
soon as some assertion evaluates to false under three-valued logic or the
assigned theory literals are inconsistent.  Theory consistency uses a
naive fixpoint congruence closure and Floyd-Warshall.  Scheduling is
checked against a discrete-event simulation.
"""
from __future__ import annotations

from partsmt import terms as T
from partsmt.terms import BOOL, INT


# ----------------------------------------------------------------- preprocessing

def _find_ite(t):
    for s in t.subterms():
        if s.op == T.ITE and s.sort != BOOL:
            return s
    return None


def _replace(t, old, new):
    if t == old:
        return new
    if not t.args:
        return t
    return T.rebuild(t, [_replace(a, old, new) for a in t.args])


def expand(t):
    """Push non-Bool ite out of atoms and split Int equalities."""
    if t.op in (T.NOT, T.AND, T.OR, T.IMPLIES) or (t.op == T.ITE and t.sort == BOOL) \
            or (t.op == T.EQ and t.args[0].sort == BOOL):
        return T.rebuild(t, [expand(a) for a in t.args])
    if t.sort != BOOL or t.op == T.CONST or t.op == T.VAR:
        return t
    it = _find_ite(t)
    if it is not None:
        c, a, b = it.args
        return T.or_(T.and_(expand(c), expand(_replace(t, it, a))),
                     T.and_(T.not_(expand(c)), expand(_replace(t, it, b))))
    if t.op == T.EQ and t.args[0].sort == INT:
        return T.and_(T.leq(*t.args), T.geq(*t.args))
    return t


def _lin(t, k=1, acc=None):
    acc = {} if acc is None else acc
    if t.op == T.CONST:
        acc[None] = acc.get(None, 0) + k * t.value
    elif t.op == T.VAR:
        acc[t.name] = acc.get(t.name, 0) + k
    elif t.op == T.PLUS:
        _lin(t.args[0], k, acc)
        _lin(t.args[1], k, acc)
    elif t.op == T.MINUS:
        _lin(t.args[0], k, acc)
        _lin(t.args[1], -k, acc)
    elif t.op == T.NEG:
        _lin(t.args[0], -k, acc)
    else:
        raise ValueError(t.op)
    return acc


def difference(atom, value: bool):
    """(x, y, c) with x - y <= c equivalent to ``atom`` having ``value``.

    x / y are variable names or None (the constant zero)."""
    lin = _lin(T.minus(atom.args[0], atom.args[1]))
    const = lin.pop(None, 0)
    lin = {v: c for v, c in lin.items() if c}
    op = atom.op
    if not value:
        op = {T.LEQ: T.GT, T.LT: T.GEQ, T.GEQ: T.LT, T.GT: T.LEQ}[op]
    # lin + const  op  0
    if op in (T.GEQ, T.GT):
        lin = {v: -c for v, c in lin.items()}
        const = -const
    bound = -const - (1 if op in (T.LT, T.GT) else 0)
    x = next((v for v, c in lin.items() if c == 1), None)
    y = next((v for v, c in lin.items() if c == -1), None)
    return x, y, bound


# ---------------------------------------------------------------------- theories

def euf_consistent(eqs, diseqs, preds) -> bool:
    """eqs/diseqs: pairs of terms; preds: (bool-app term, value) pairs."""
    terms = set()
    for a, b in list(eqs) + list(diseqs):
        terms.update(a.subterms())
        terms.update(b.subterms())
    for p, _ in preds:
        terms.update(p.subterms())
    terms = sorted(terms, key=str)
    parent = {t: t for t in terms}

    def find(t):
        while parent[t] != t:
            t = parent[t]
        return t

    def union(a, b):
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[ra] = rb
            return True
        return False

    for a, b in eqs:
        union(a, b)
    apps = [t for t in terms if t.op == T.APP]
    changed = True
    while changed:
        changed = False
        seen = {}
        for t in apps:
            key = (t.name, tuple(find(x) for x in t.args))
            other = seen.setdefault(key, t)
            if other is not t and union(other, t):
                changed = True
    if any(find(a) == find(b) for a, b in diseqs):
        return False
    values = {}
    for p, v in preds:
        r = find(p)
        if values.setdefault(r, v) != v:
            return False
    return True


def idl_consistent(constraints) -> bool:
    """constraints: (x, y, c) meaning x - y <= c; None is the zero variable."""
    names = sorted({v for x, y, _ in constraints for v in (x, y)}, key=lambda v: (v is not None, v or ""))
    idx = {v: i for i, v in enumerate(names)}
    n = len(names)
    inf = float("inf")
    d = [[0 if i == j else inf for j in range(n)] for i in range(n)]
    for x, y, c in constraints:
        i, j = idx[y], idx[x]
        if c < d[i][j]:
            d[i][j] = c
    for k in range(n):
        dk = d[k]
        for i in range(n):
            dik = d[i][k]
            if dik == inf:
                continue
            di = d[i]
            for j in range(n):
                if dik + dk[j] < di[j]:
                    di[j] = dik + dk[j]
    return all(d[i][i] >= 0 for i in range(n))


def bellman_ford_consistent(constraints) -> bool:
    """Textbook Bellman-Ford from a virtual source; x - y <= c is edge y->x."""
    nodes = sorted({v for x, y, _ in constraints for v in (x, y)}, key=lambda v: (v is not None, v or ""))
    dist = {v: 0 for v in nodes}
    for _ in range(len(nodes)):
        for x, y, c in constraints:
            if dist[y] + c < dist[x]:
                dist[x] = dist[y] + c
    return all(dist[y] + c >= dist[x] for x, y, c in constraints)


def theory_consistent(assignment) -> bool:
    """assignment: {atom term: bool}."""
    eqs, diseqs, preds, diffs = [], [], [], []
    for atom, val in assignment.items():
        if atom.op == T.VAR:
            continue
        if atom.op == T.EQ:
            (eqs if val else diseqs).append(atom.args)
        elif atom.op == T.APP:
            preds.append((atom, val))
        else:
            diffs.append(difference(atom, val))
    if (eqs or diseqs or preds) and not euf_consistent(eqs, diseqs, preds):
        return False
    return not diffs or idl_consistent(diffs)


# ---------------------------------------------------------------- enumeration

def atoms_of(t, out):
    if t.op in (T.NOT, T.AND, T.OR, T.IMPLIES) or (t.op == T.ITE and t.sort == BOOL) \
            or (t.op == T.EQ and t.args[0].sort == BOOL):
        for a in t.args:
            atoms_of(a, out)
    elif t.op != T.CONST and t not in out:
        out[t] = len(out)


def _eval3(t, val):
    """Three-valued evaluation: True, False or None (unknown)."""
    op = t.op
    if op == T.CONST:
        return t.value
    if op == T.NOT:
        v = _eval3(t.args[0], val)
        return None if v is None else not v
    if op == T.AND:
        unknown = False
        for a in t.args:
            v = _eval3(a, val)
            if v is False:
                return False
            unknown |= v is None
        return None if unknown else True
    if op == T.OR:
        unknown = False
        for a in t.args:
            v = _eval3(a, val)
            if v is True:
                return True
            unknown |= v is None
        return None if unknown else False
    if op == T.IMPLIES:
        return _eval3(T.or_(T.not_(t.args[0]), t.args[1]), val)
    if op == T.ITE:
        c = _eval3(t.args[0], val)
        if c is None:
            a, b = _eval3(t.args[1], val), _eval3(t.args[2], val)
            return a if a == b else None
        return _eval3(t.args[1] if c else t.args[2], val)
    if op == T.EQ and t.args[0].sort == BOOL:
        a, b = _eval3(t.args[0], val), _eval3(t.args[1], val)
        return None if a is None or b is None else a == b
    return val.get(t)


def brute_force_sat(script) -> bool:
    """Exhaustive search over atom polarities.

    Branches are cut when an assertion is already false or the assigned
    literals are theory-inconsistent.  An assertion with a single
    unassigned atom that is false under one polarity forces the other;
    this only skips branches the first cut would reject anyway.
    """
    formulas = [expand(a) for a in script.assertions]
    fatoms = []
    for f in formulas:
        index: dict = {}
        atoms_of(f, index)
        fatoms.append(list(index))
    val: dict = {}

    def search():
        forced = []

        def undo():
            for a in forced:
                del val[a]

        changed = True
        while changed:
            changed = False
            for f, atoms in zip(formulas, fatoms):
                v = _eval3(f, val)
                if v is False:
                    undo()
                    return False
                if v is None:
                    free = [a for a in atoms if a not in val]
                    if len(free) != 1:
                        continue
                    a = free[0]
                    val[a] = True
                    pos = _eval3(f, val)
                    val[a] = False
                    negv = _eval3(f, val)
                    del val[a]
                    if pos is False and negv is False:
                        undo()
                        return False
                    if pos is False or negv is False:
                        val[a] = pos is not False
                        forced.append(a)
                        changed = True
        if not theory_consistent(val):
            undo()
            return False
        branch = None
        for f, atoms in zip(formulas, fatoms):
            if _eval3(f, val) is None:
                branch = next(a for a in atoms if a not in val)
                break
        if branch is None:
            return True
        for b in (True, False):
            val[branch] = b
            if search():
                return True
            del val[branch]
        undo()
        return False

    return search()


# ----------------------------------------------------------------- scheduling

def event_simulation(tasks, cores, budget):
    """Discrete-event list scheduling: a queue of core-free events, tasks
    released in key order.  Returns (makespan, dropped count, per-core
    start-ordered keys)."""
    import heapq

    events = [(0.0, c) for c in range(cores)]
    heapq.heapify(events)
    keys = [[] for _ in range(cores)]
    dropped = 0
    makespan = 0.0
    for key, duration in sorted(tasks, key=lambda t: t[0]):
        free_at, core = heapq.heappop(events)
        if free_at + duration > budget:
            dropped += 1
            heapq.heappush(events, (free_at, core))
            continue
        keys[core].append(key)
        makespan = max(makespan, free_at + duration)
        heapq.heappush(events, (free_at + duration, core))
    return makespan, dropped, keys
