"""Undirected simple graphs, SNAP edge-list I/O and the supernode merge primitive."""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np


class EdgeListParseError(ValueError):
    def __init__(self, path, lineno: int, line: str):
        super().__init__(f"{path}:{lineno}: expected two integer tokens, got {line!r}")
        self.lineno = lineno


class InvalidMergeError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class Graph:
    """Immutable undirected simple graph on dense ids ``0..n-1``.

    ``adj[v]`` is the sorted tuple of neighbours of ``v``. ``labels[v]`` is the
    external id string the node had in its source file (or ``str(v)``).
    """

    adj: tuple[tuple[int, ...], ...]
    labels: tuple[str, ...] = ()
    raw_edge_lines: int | None = field(default=None, compare=False)

    def __post_init__(self):
        if not self.labels:
            object.__setattr__(self, "labels", tuple(str(i) for i in range(len(self.adj))))

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]], labels: Sequence[str] | None = None,
                   raw_edge_lines: int | None = None) -> "Graph":
        nbrs: list[set[int]] = [set() for _ in range(n)]
        for u, v in edges:
            if u == v:
                continue
            nbrs[u].add(v)
            nbrs[v].add(u)
        adj = tuple(tuple(sorted(s)) for s in nbrs)
        return cls(adj, tuple(labels) if labels is not None else (), raw_edge_lines)

    @classmethod
    def from_sets(cls, nbrs: Sequence[Iterable[int]], labels: Sequence[str] | None = None) -> "Graph":
        adj = tuple(tuple(sorted(s)) for s in nbrs)
        return cls(adj, tuple(labels) if labels is not None else ())

    @classmethod
    def from_networkx(cls, nxg) -> "Graph":
        nodes = sorted(nxg.nodes())
        index = {u: i for i, u in enumerate(nodes)}
        return cls.from_edges(len(nodes), ((index[u], index[v]) for u, v in nxg.edges()),
                              labels=[str(u) for u in nodes])

    @property
    def n(self) -> int:
        return len(self.adj)

    @cached_property
    def m(self) -> int:
        return sum(len(a) for a in self.adj) // 2

    def __len__(self) -> int:
        return len(self.adj)

    def degree(self, v: int) -> int:
        return len(self.adj[v])

    @cached_property
    def degrees(self) -> np.ndarray:
        return np.fromiter((len(a) for a in self.adj), dtype=np.int64, count=self.n)

    def neighbors(self, v: int) -> tuple[int, ...]:
        return self.adj[v]

    @cached_property
    def adj_sets(self) -> tuple[frozenset[int], ...]:
        return tuple(frozenset(a) for a in self.adj)

    def has_edge(self, u: int, v: int) -> bool:
        return v in self.adj_sets[u]

    def edges(self) -> Iterable[tuple[int, int]]:
        for u, nb in enumerate(self.adj):
            for v in nb:
                if u < v:
                    yield u, v

    @cached_property
    def csr(self) -> tuple[np.ndarray, np.ndarray]:
        """(indptr, indices) arrays for the numba kernels."""
        indptr = np.zeros(self.n + 1, dtype=np.int64)
        np.cumsum(self.degrees, out=indptr[1:])
        indices = np.fromiter((w for nb in self.adj for w in nb), dtype=np.int64, count=int(indptr[-1]))
        return indptr, indices

    def to_networkx(self):
        import networkx as nx

        g = nx.Graph()
        g.add_nodes_from(range(self.n))
        g.add_edges_from(self.edges())
        return g

    def fingerprint(self) -> str:
        h = hashlib.sha256()
        h.update(f"{self.n} {self.m}\n".encode())
        for u, v in self.edges():
            h.update(f"{u} {v}\n".encode())
        return h.hexdigest()[:16]

    def same_structure(self, other: "Graph") -> bool:
        return self.adj == other.adj


@dataclass(frozen=True)
class NeighborhoodSubgraph:
    """1-hop rooted subgraph around ``reference``.

    ``members`` starts with the reference followed by its neighbours in id
    order; ``internal_degree``/``external_degree`` are aligned with it.
    """

    reference: int
    members: tuple[int, ...]
    internal_edges: tuple[tuple[int, int], ...]
    internal_degree: tuple[int, ...]
    external_degree: tuple[int, ...]

    def __len__(self):
        return len(self.members)

    @property
    def num_edges(self) -> int:
        return len(self.internal_edges)

    def local_adjacency(self) -> list[set[int]]:
        """Adjacency over member positions (0 is the reference)."""
        pos = {m: i for i, m in enumerate(self.members)}
        out: list[set[int]] = [set() for _ in self.members]
        for a, b in self.internal_edges:
            out[pos[a]].add(pos[b])
            out[pos[b]].add(pos[a])
        return out


@dataclass(frozen=True)
class Supernode:
    id: int
    contents: frozenset[int]

    @property
    def size(self) -> int:
        return len(self.contents)


def load_edge_list(path: str | Path) -> Graph:
    """Read a SNAP-style edge list.

    Comment lines start with ``#``; blank lines are skipped. Directed inputs
    are symmetrized, self-loops and duplicates dropped; a node seen only in
    self-loops is dropped too. Node ids are remapped densely in ascending
    order of their integer value.
    """
    path = Path(path)
    pairs: list[tuple[int, int]] = []
    with path.open() as fh:
        for lineno, line in enumerate(fh, 1):
            s = line.strip()
            if not s or s.startswith("#"):
                continue
            parts = s.split()
            if len(parts) < 2:
                raise EdgeListParseError(path, lineno, line.rstrip("\n"))
            try:
                pairs.append((int(parts[0]), int(parts[1])))
            except ValueError:
                raise EdgeListParseError(path, lineno, line.rstrip("\n")) from None
    raw = len(pairs)
    pairs = [p for p in pairs if p[0] != p[1]]
    ids = sorted({u for p in pairs for u in p})
    index = {u: i for i, u in enumerate(ids)}
    return Graph.from_edges(len(ids), ((index[u], index[v]) for u, v in pairs),
                            labels=[str(u) for u in ids], raw_edge_lines=raw)


def write_edge_list(g: Graph, path: str | Path, header: str | None = None) -> None:
    path = Path(path)
    with path.open("w") as fh:
        if header:
            for line in header.splitlines():
                fh.write(f"# {line}\n")
        for u, v in g.edges():
            fh.write(f"{u} {v}\n")


def neighborhood(g: Graph, v: int) -> NeighborhoodSubgraph:
    if not 0 <= v < g.n:
        raise KeyError(f"unknown node id {v}")
    members = (v,) + g.adj[v]
    mset = set(members)
    edges = []
    internal = []
    for u in members:
        inside = [w for w in g.adj[u] if w in mset]
        internal.append(len(inside))
        edges.extend((u, w) for w in inside if u < w)
    external = tuple(len(g.adj[u]) - d for u, d in zip(members, internal))
    return NeighborhoodSubgraph(v, members, tuple(sorted(edges)), tuple(internal), external)


def merge_nodes(g: Graph, a: int, b: int,
                contents: Sequence[frozenset[int]] | None = None) -> tuple[Graph, Supernode]:
    """Merge ``a`` and ``b`` into one node.

    The merged node takes id ``min(a, b)``; ids above ``max(a, b)`` shift down
    by one. ``contents[v]`` is the set of original ids node ``v`` already
    stands for (defaults to ``{v}``), so merges can be chained.
    """
    if a == b:
        raise InvalidMergeError(f"cannot merge node {a} with itself")
    for x in (a, b):
        if not 0 <= x < g.n:
            raise KeyError(f"unknown node id {x}")
    q, node_map = contract(g, [[a, b]])
    ca = contents[a] if contents is not None else frozenset([a])
    cb = contents[b] if contents is not None else frozenset([b])
    return q, Supernode(node_map[a], ca | cb)


def contract(g: Graph, groups: Sequence[Sequence[int]]) -> tuple[Graph, list[int]]:
    """Collapse each group to a single node (quotient graph).

    Returns the contracted graph and ``node_map[v]`` = published id of original
    node ``v``. Published ids follow the order of each group's smallest member.
    Intra-group edges vanish and parallel edges collapse.
    """
    rep = list(range(g.n))
    for grp in groups:
        r = min(grp)
        for v in grp:
            if rep[v] != v and rep[v] != r:
                raise InvalidMergeError(f"node {v} appears in two groups")
            rep[v] = r
    new_id: dict[int, int] = {}
    node_map = [0] * g.n
    for v in range(g.n):
        r = rep[v]
        if r not in new_id:
            new_id[r] = len(new_id)
        node_map[v] = new_id[r]
    nbrs: list[set[int]] = [set() for _ in range(len(new_id))]
    for u, v in g.edges():
        a, b = node_map[u], node_map[v]
        if a != b:
            nbrs[a].add(b)
            nbrs[b].add(a)
    members: list[list[int]] = [[] for _ in range(len(new_id))]
    for v in range(g.n):
        members[node_map[v]].append(v)
    labels = ["+".join(g.labels[v] for v in mem) for mem in members]
    return Graph.from_sets(nbrs, labels), node_map
