"""VF2 state-space matcher for small rooted undirected graphs.

Graphs are given as lists of neighbour sets over positions ``0..n-1``.
Matching is always full isomorphism (not subgraph monomorphism) and may be
seeded with fixed pairs, which is how neighbourhoods stay rooted at their
reference node.
"""

from __future__ import annotations

from typing import Callable, Iterator, Sequence

import numpy as np
from scipy.optimize import linear_sum_assignment

Adjacency = Sequence[set[int]]


class _State:
    def __init__(self, g1: Adjacency, g2: Adjacency):
        self.g1, self.g2 = g1, g2
        self.n = len(g1)
        self.core1 = [-1] * self.n
        self.core2 = [-1] * self.n
        # depth at which a node entered the terminal set, 0 = not in it
        self.term1 = [0] * self.n
        self.term2 = [0] * self.n
        self.depth = 0
        self.added: list[tuple[list[int], list[int]]] = []
        # fixed exploration order for G1: BFS from position 0 then the rest
        seen = [False] * self.n
        order = []
        for start in range(self.n):
            if seen[start]:
                continue
            seen[start] = True
            queue = [start]
            while queue:
                v = queue.pop(0)
                order.append(v)
                for w in sorted(g1[v]):
                    if not seen[w]:
                        seen[w] = True
                        queue.append(w)
        self.order = order

    def add(self, a: int, b: int) -> None:
        self.depth += 1
        d = self.depth
        self.core1[a] = b
        self.core2[b] = a
        new1, new2 = [], []
        for t, v, nbrs, new in ((self.term1, a, self.g1[a], new1), (self.term2, b, self.g2[b], new2)):
            if not t[v]:
                t[v] = d
                new.append(v)
            for w in nbrs:
                if not t[w]:
                    t[w] = d
                    new.append(w)
        self.added.append((new1, new2))

    def remove(self, a: int, b: int) -> None:
        new1, new2 = self.added.pop()
        for v in new1:
            self.term1[v] = 0
        for v in new2:
            self.term2[v] = 0
        self.core1[a] = -1
        self.core2[b] = -1
        self.depth -= 1

    def candidates(self) -> Iterator[tuple[int, int]]:
        t1 = [v for v in self.order if self.core1[v] < 0 and self.term1[v]]
        t2 = [v for v in range(self.n) if self.core2[v] < 0 and self.term2[v]]
        if t1 and t2:
            a = t1[0]
            for b in t2:
                yield a, b
            return
        if t1 or t2:
            return
        free1 = [v for v in self.order if self.core1[v] < 0]
        if not free1:
            return
        a = free1[0]
        for b in range(self.n):
            if self.core2[b] < 0:
                yield a, b

    def feasible(self, a: int, b: int) -> bool:
        g1, g2 = self.g1, self.g2
        if len(g1[a]) != len(g2[b]):
            return False
        core1, core2 = self.core1, self.core2
        mapped1 = 0
        for w in g1[a]:
            m = core1[w]
            if m >= 0:
                if m not in g2[b]:
                    return False
                mapped1 += 1
        mapped2 = 0
        for w in g2[b]:
            m = core2[w]
            if m >= 0:
                if m not in g1[a]:
                    return False
                mapped2 += 1
        if mapped1 != mapped2:
            return False
        # look-ahead on the terminal sets and on the untouched remainder
        t1 = sum(1 for w in g1[a] if core1[w] < 0 and self.term1[w])
        t2 = sum(1 for w in g2[b] if core2[w] < 0 and self.term2[w])
        if t1 != t2:
            return False
        r1 = sum(1 for w in g1[a] if core1[w] < 0 and not self.term1[w])
        r2 = sum(1 for w in g2[b] if core2[w] < 0 and not self.term2[w])
        return r1 == r2


def _invariants_match(g1: Adjacency, g2: Adjacency) -> bool:
    if len(g1) != len(g2):
        return False
    return sorted(len(s) for s in g1) == sorted(len(s) for s in g2)


def isomorphisms(g1: Adjacency, g2: Adjacency, fixed: Sequence[tuple[int, int]] = ()) -> Iterator[list[int]]:
    """Yield every isomorphism ``g1 -> g2`` (as a position list) honouring ``fixed``."""
    if not _invariants_match(g1, g2):
        return
    st = _State(g1, g2)
    for a, b in fixed:
        if st.core1[a] >= 0 or st.core2[b] >= 0 or not st.feasible(a, b):
            return
        st.add(a, b)

    def rec():
        if st.depth == st.n:
            yield list(st.core1)
            return
        for a, b in list(st.candidates()):
            if st.feasible(a, b):
                st.add(a, b)
                yield from rec()
                st.remove(a, b)

    yield from rec()


def is_isomorphic(g1: Adjacency, g2: Adjacency, fixed: Sequence[tuple[int, int]] = ()) -> bool:
    return next(isomorphisms(g1, g2, fixed), None) is not None


def min_cost_isomorphism(g1: Adjacency, g2: Adjacency, cost: Callable[[int, int], float],
                         fixed: Sequence[tuple[int, int]] = (), budget: int = 200_000):
    """Cheapest isomorphism under an additive per-pair cost.

    Depth-first VF2 with candidates tried cheapest first and branch-and-bound
    pruning against a per-node lower bound. The search stops early once the
    assignment lower bound (Hungarian, ignoring edges) is reached. Returns
    ``(mapping, total_cost, exhaustive)``; ``mapping`` is None when the graphs
    are not isomorphic.
    """
    if not _invariants_match(g1, g2):
        return None, float("inf"), True
    n = len(g1)
    fwd = dict(fixed)
    back = {b: a for a, b in fixed}
    c = np.full((n, n), np.inf)
    for a in range(n):
        for b in range(n):
            if len(g1[a]) != len(g2[b]) or fwd.get(a, b) != b or back.get(b, a) != a:
                continue
            c[a, b] = cost(a, b)
    finite = np.where(np.isfinite(c), c, 1e18)
    rows, cols = linear_sum_assignment(finite)
    global_lb = float(finite[rows, cols].sum())
    row_min = np.where(np.isfinite(c).any(axis=1), np.min(np.where(np.isfinite(c), c, np.inf), axis=1), 0.0)

    st = _State(g1, g2)
    partial = 0.0
    remaining_lb = float(row_min.sum())
    for a, b in fixed:
        if not st.feasible(a, b):
            return None, float("inf"), True
        st.add(a, b)
        partial += c[a, b]
        remaining_lb -= row_min[a]

    best_map: list[int] | None = None
    best = float("inf")
    steps = 0
    exhaustive = True

    def rec(partial: float, remaining_lb: float):
        nonlocal best_map, best, steps, exhaustive
        if st.depth == n:
            if partial < best:
                best, best_map = partial, list(st.core1)
            return
        for a, b in sorted(st.candidates(), key=lambda p: (c[p[0], p[1]], p[1])):
            if best <= global_lb + 1e-12:
                return
            steps += 1
            if steps > budget:
                exhaustive = False
                return
            pc = c[a, b]
            if not np.isfinite(pc) or partial + pc + remaining_lb - row_min[a] >= best:
                continue
            if st.feasible(a, b):
                st.add(a, b)
                rec(partial + pc, remaining_lb - row_min[a])
                st.remove(a, b)

    rec(partial, remaining_lb)
    return best_map, best, exhaustive
