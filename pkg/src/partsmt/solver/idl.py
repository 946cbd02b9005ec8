"""Integer difference logic: constraints ``x - y <= c`` checked by
negative-cycle detection on the constraint graph (edge y -> x, weight c).
"""
from __future__ import annotations

# Constants beyond this magnitude are rejected so that path weights stay
# well inside the range of a signed 64-bit accumulator.
MAX_CONSTANT = 2**31 - 1


class IDLRangeError(ValueError):
    pass


def check_constant(c: int) -> int:
    if abs(c) > MAX_CONSTANT:
        raise IDLRangeError(f"difference constant {c} exceeds +/-{MAX_CONSTANT}")
    return c


def check(constraints):
    """``constraints`` is a sequence of (x, y, c, tag) meaning x - y <= c.

    Returns (None, potential) when satisfiable, where ``potential`` maps
    every variable to an integer solution, or (tags, None) where ``tags``
    are the constraints of one negative cycle.
    """
    nodes: dict = {}
    best: dict = {}
    for x, y, c, tag in constraints:
        check_constant(c)
        for v in (x, y):
            if v not in nodes:
                nodes[v] = len(nodes)
        key = (nodes[y], nodes[x])
        old = best.get(key)
        if old is None or c < old[0]:
            best[key] = (c, tag)
    n = len(nodes)
    edges = [(u, v, c, tag) for (u, v), (c, tag) in best.items()]
    dist = [0] * n
    pred: list = [None] * n
    changed_at = -1
    for _ in range(n + 1):
        changed_at = -1
        for u, v, c, tag in edges:
            d = dist[u] + c
            if d < dist[v]:
                dist[v] = d
                pred[v] = (u, tag)
                changed_at = v
        if changed_at < 0:
            break
    if changed_at < 0:
        names = list(nodes)
        return None, {names[i]: dist[i] for i in range(n)}
    # walk back n steps to land on the cycle, then collect it
    v = changed_at
    for _ in range(n):
        v = pred[v][0]
    cycle = []
    u = v
    while True:
        p, tag = pred[u]
        cycle.append(tag)
        u = p
        if u == v:
            break
    return cycle, None
