"""Slow reference implementations used only as test oracles.

Each one is written from the definition, sharing no code with the package.
"""

from __future__ import annotations

import itertools
from collections import Counter, deque


def adjacency(n, edges):
    adj = [set() for _ in range(n)]
    for u, v in edges:
        if u != v:
            adj[u].add(v)
            adj[v].add(u)
    return adj


def perm_isomorphic(a1, a2, root=True) -> bool:
    """Try every bijection (position 0 fixed when ``root``)."""
    n = len(a1)
    if n != len(a2):
        return False
    e1 = {frozenset((u, v)) for u in range(n) for v in a1[u]}
    e2 = {frozenset((u, v)) for u in range(n) for v in a2[u]}
    if len(e1) != len(e2):
        return False
    rest = list(range(1, n)) if root else list(range(n))
    for perm in itertools.permutations(rest):
        mp = ([0] if root else []) + list(perm)
        if all(frozenset((mp[u], mp[v])) in e2 for u, v in (tuple(e) for e in e1)):
            return True
    return False


def perm_min_cost(a1, a2, cost) -> float | None:
    """Cheapest rooted isomorphism by exhaustive search; None if not isomorphic."""
    n = len(a1)
    if n != len(a2):
        return None
    e1 = [(u, v) for u in range(n) for v in a1[u] if u < v]
    e2 = {frozenset((u, v)) for u in range(n) for v in a2[u]}
    best = None
    for perm in itertools.permutations(range(1, n)):
        mp = [0] + list(perm)
        if len(e1) == len(e2) and all(frozenset((mp[u], mp[v])) in e2 for u, v in e1):
            c = sum(cost(a, mp[a]) for a in range(n))
            best = c if best is None else min(best, c)
    return best


def bfs(adj, s, limit=None):
    dist = {s: 0}
    q = deque([s])
    while q:
        v = q.popleft()
        if limit is not None and dist[v] >= limit:
            continue
        for w in adj[v]:
            if w not in dist:
                dist[w] = dist[v] + 1
                q.append(w)
    return dist


def all_shortest_paths(adj, s, t):
    d = bfs(adj, s)
    if t not in d:
        return []
    out = []

    def walk(path):
        v = path[-1]
        if v == t:
            out.append(list(path))
            return
        for w in adj[v]:
            if d.get(w) == d[v] + 1 and len(path) <= d[t]:
                path.append(w)
                walk(path)
                path.pop()

    walk([s])
    return [p for p in out if len(p) - 1 == d[t]]


def path_betweenness(adj, normalized=True):
    """Fraction of shortest s-t paths through v, summed over unordered pairs."""
    n = len(adj)
    bc = [0.0] * n
    for s, t in itertools.combinations(range(n), 2):
        paths = all_shortest_paths(adj, s, t)
        if not paths:
            continue
        for v in range(n):
            if v in (s, t):
                continue
            bc[v] += sum(v in p for p in paths) / len(paths)
    if normalized and n > 2:
        bc = [b / ((n - 1) * (n - 2) / 2) for b in bc]
    return bc


def mean_path_length(adj):
    total = pairs = 0
    for s in range(len(adj)):
        for t, d in bfs(adj, s).items():
            if t != s:
                total += d
                pairs += 1
    return total / pairs


def set_partitions(items):
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in set_partitions(rest):
        for i in range(len(part)):
            yield part[:i] + [[first] + part[i]] + part[i + 1:]
        yield [[first]] + part


def modularity(adj, blocks):
    m = sum(len(a) for a in adj) / 2
    q = 0.0
    for b in blocks:
        bs = set(b)
        inside = sum(1 for u in b for v in adj[u] if v in bs) / 2
        deg = sum(len(adj[u]) for u in b)
        q += inside / m - (deg / (2 * m)) ** 2
    return q


def best_partition(adj):
    return max(set_partitions(list(range(len(adj)))), key=lambda p: modularity(adj, p))


def query_signature(adj, x, query, hubs=(), bridges=()):
    if query == "H1":
        return len(adj[x])
    if query == "H2":
        return tuple(sorted(len(adj[y]) for y in adj[x]))
    if query == "SG":
        closed = adj[x] | {x}
        return sum(1 for u in closed for v in adj[u] if v in closed and u < v)
    anchors = hubs if query == "FH2" else bridges
    d = bfs(adj, x, limit=2)
    return tuple(d.get(a, 0) for a in anchors)


def bucket_counts(adj, weights, query, hubs=(), bridges=()):
    """Candidate-set buckets by pairwise signature comparison."""
    n = len(adj)
    sig = [query_signature(adj, x, query, hubs, bridges) for x in range(n)]
    cuts = (1, 10, 100, 1000) if query == "SG" else (1, 4, 10, 20)
    names = ("=1", "2-10", "11-100", "101-1000", ">1000") if query == "SG" else ("=1", "2-4", "5-10", "11-20", ">20")
    out = Counter({b: 0 for b in names})
    for x in range(n):
        size = sum(weights[y] for y in range(n) if sig[y] == sig[x])
        i = 0
        while i < 4 and size > cuts[i]:
            i += 1
        out[names[i]] += 1
    return dict(out)


def is_graphical_brute(seq) -> bool:
    """Search all simple graphs on len(seq) labelled nodes (tiny inputs only)."""
    n = len(seq)
    pairs = list(itertools.combinations(range(n), 2))
    for mask in range(1 << len(pairs)):
        deg = [0] * n
        for i, (u, v) in enumerate(pairs):
            if mask >> i & 1:
                deg[u] += 1
                deg[v] += 1
        if deg == list(seq):
            return True
    return False
