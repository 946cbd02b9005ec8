from __future__ import annotations


class ActivityHeap:
    """Indexed binary max-heap of variables keyed by activity.

    Ties are broken towards the smaller variable index so that the pop
    order is fully deterministic.
    """

    def __init__(self, nvars: int = 0, decay: float = 0.95, rescale_limit: float = 1e100):
        self.activity: list[float] = [0.0] * nvars
        self.heap: list[int] = []
        self.pos: list[int] = [-1] * nvars
        self.inc = 1.0
        self.decay_factor = decay
        self.rescale_limit = rescale_limit

    def __len__(self) -> int:
        return len(self.heap)

    def __contains__(self, v: int) -> bool:
        return self.pos[v] >= 0

    def grow(self, nvars: int):
        extra = nvars - len(self.activity)
        if extra > 0:
            self.activity.extend([0.0] * extra)
            self.pos.extend([-1] * extra)

    def _before(self, a: int, b: int) -> bool:
        act = self.activity
        return act[a] > act[b] or (act[a] == act[b] and a < b)

    def _up(self, i: int):
        heap, pos = self.heap, self.pos
        v = heap[i]
        while i > 0:
            parent = (i - 1) >> 1
            p = heap[parent]
            if not self._before(v, p):
                break
            heap[i] = p
            pos[p] = i
            i = parent
        heap[i] = v
        pos[v] = i

    def _down(self, i: int):
        heap, pos = self.heap, self.pos
        n = len(heap)
        v = heap[i]
        while True:
            child = 2 * i + 1
            if child >= n:
                break
            if child + 1 < n and self._before(heap[child + 1], heap[child]):
                child += 1
            if not self._before(heap[child], v):
                break
            heap[i] = heap[child]
            pos[heap[i]] = i
            i = child
        heap[i] = v
        pos[v] = i

    def insert(self, v: int):
        if self.pos[v] >= 0:
            return
        self.heap.append(v)
        self.pos[v] = len(self.heap) - 1
        self._up(len(self.heap) - 1)

    def pop(self) -> int:
        heap = self.heap
        top = heap[0]
        last = heap.pop()
        self.pos[top] = -1
        if heap:
            heap[0] = last
            self.pos[last] = 0
            self._down(0)
        return top

    def peek(self) -> int:
        return self.heap[0]

    def bump(self, v: int):
        self.activity[v] += self.inc
        if self.activity[v] > self.rescale_limit:
            self._rescale()
        if self.pos[v] >= 0:
            self._up(self.pos[v])

    def decay(self):
        self.inc /= self.decay_factor

    def _rescale(self):
        factor = 1.0 / self.rescale_limit
        self.activity = [a * factor for a in self.activity]
        self.inc *= factor

    def set_activity(self, v: int, value: float):
        """Used by tests and tooling; restores the heap property."""
        self.activity[v] = value
        i = self.pos[v]
        if i >= 0:
            self._up(i)
            self._down(self.pos[v])

    def ranked(self) -> list[int]:
        """Heap members in pop order, without modifying the heap."""
        return sorted(self.heap, key=lambda v: (-self.activity[v], v))

    def check_invariant(self) -> bool:
        heap = self.heap
        for i in range(1, len(heap)):
            if self._before(heap[i], heap[(i - 1) >> 1]):
                return False
        return all(self.pos[v] == i for i, v in enumerate(heap))
