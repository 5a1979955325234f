"""Structural node metrics and the hub/bridge role sets.

Path-based metrics (average path length, Brandes betweenness, eccentricity)
run one BFS per source inside numba kernels over the CSR arrays of a Graph.
Sources are reduced in ascending order, so results do not depend on anything
but the graph.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

import numba
import numpy as np
import scipy.sparse as sp

from .errors import ConfigError, UndefinedMetricError
from .graph import Graph

METRIC_IDS = ("degree", "cc", "apl", "hub", "bridge")


@dataclass
class NodeMetricVector:
    metric: str
    values: np.ndarray
    converged: bool = True
    iterations: int = 0

    def __len__(self):
        return len(self.values)


@dataclass
class StructuralRoleSets:
    hubs: frozenset[int]
    bridges: frozenset[int]
    hub_threshold: float
    bridge_threshold: float
    hub_pct: float = 12.0
    bridge_pct: float = 10.0

    @property
    def excluded(self) -> frozenset[int]:
        return self.hubs | self.bridges

    def is_eligible(self, v: int) -> bool:
        return v not in self.hubs and v not in self.bridges


@dataclass
class PathStats:
    apl: float
    diameter: int
    connected_pairs: int
    mean_distance: np.ndarray = field(repr=False)  # per node, over reachable targets
    eccentricity: np.ndarray = field(repr=False)


# ---------------------------------------------------------------- kernels


@numba.njit(cache=True)
def _bfs_sums(indptr, indices):
    n = indptr.shape[0] - 1
    dist_sum = np.zeros(n, dtype=np.int64)
    reach = np.zeros(n, dtype=np.int64)
    ecc = np.zeros(n, dtype=np.int64)
    dist = np.full(n, -1, dtype=np.int64)
    queue = np.empty(n, dtype=np.int64)
    for s in range(n):
        dist[s] = 0
        queue[0] = s
        head, tail = 0, 1
        while head < tail:
            v = queue[head]
            head += 1
            dv = dist[v]
            for p in range(indptr[v], indptr[v + 1]):
                w = indices[p]
                if dist[w] < 0:
                    dist[w] = dv + 1
                    queue[tail] = w
                    tail += 1
        total = 0
        far = 0
        for i in range(tail):
            d = dist[queue[i]]
            total += d
            if d > far:
                far = d
            dist[queue[i]] = -1
        dist_sum[s] = total
        reach[s] = tail - 1
        ecc[s] = far
    return dist_sum, reach, ecc


@numba.njit(cache=True)
def _brandes(indptr, indices):
    n = indptr.shape[0] - 1
    bc = np.zeros(n, dtype=np.float64)
    sigma = np.zeros(n, dtype=np.float64)
    delta = np.zeros(n, dtype=np.float64)
    dist = np.full(n, -1, dtype=np.int64)
    order = np.empty(n, dtype=np.int64)
    for s in range(n):
        sigma[s] = 1.0
        dist[s] = 0
        order[0] = s
        head, tail = 0, 1
        while head < tail:
            v = order[head]
            head += 1
            for p in range(indptr[v], indptr[v + 1]):
                w = indices[p]
                if dist[w] < 0:
                    dist[w] = dist[v] + 1
                    order[tail] = w
                    tail += 1
                if dist[w] == dist[v] + 1:
                    sigma[w] += sigma[v]
        # accumulate in reverse BFS order; predecessors are recovered from dist
        for i in range(tail - 1, -1, -1):
            w = order[i]
            for p in range(indptr[w], indptr[w + 1]):
                v = indices[p]
                if dist[v] == dist[w] - 1:
                    delta[v] += sigma[v] / sigma[w] * (1.0 + delta[w])
            if w != s:
                bc[w] += delta[w]
        for i in range(tail):
            w = order[i]
            sigma[w] = 0.0
            delta[w] = 0.0
            dist[w] = -1
    return bc


@numba.njit(cache=True)
def _triangles(indptr, indices):
    n = indptr.shape[0] - 1
    tri = np.zeros(n, dtype=np.int64)
    mark = np.zeros(n, dtype=np.bool_)
    for v in range(n):
        for p in range(indptr[v], indptr[v + 1]):
            mark[indices[p]] = True
        t = 0
        for p in range(indptr[v], indptr[v + 1]):
            u = indices[p]
            for q in range(indptr[u], indptr[u + 1]):
                if mark[indices[q]]:
                    t += 1
        tri[v] = t // 2
        for p in range(indptr[v], indptr[v + 1]):
            mark[indices[p]] = False
    return tri


@numba.njit(cache=True)
def bfs_distances(indptr, indices, source, horizon):
    """Hop distances from ``source``; -1 beyond ``horizon`` (or unreachable).

    ``horizon < 0`` means unbounded.
    """
    n = indptr.shape[0] - 1
    dist = np.full(n, -1, dtype=np.int64)
    queue = np.empty(n, dtype=np.int64)
    dist[source] = 0
    queue[0] = source
    head, tail = 0, 1
    while head < tail:
        v = queue[head]
        head += 1
        if horizon >= 0 and dist[v] >= horizon:
            continue
        for p in range(indptr[v], indptr[v + 1]):
            w = indices[p]
            if dist[w] < 0:
                dist[w] = dist[v] + 1
                queue[tail] = w
                tail += 1
    return dist


# ---------------------------------------------------------------- metrics


def triangles(g: Graph) -> np.ndarray:
    if g.n == 0:
        return np.zeros(0, dtype=np.int64)
    return _triangles(*g.csr)


def clustering_vector(g: Graph) -> np.ndarray:
    deg = g.degrees.astype(np.float64)
    pairs = deg * (deg - 1) / 2
    tri = triangles(g).astype(np.float64)
    out = np.zeros(g.n)
    ok = pairs > 0
    out[ok] = tri[ok] / pairs[ok]
    return out


def clustering_coefficient(g: Graph, v: int) -> float:
    if not 0 <= v < g.n:
        raise KeyError(f"unknown node id {v}")
    nb = g.adj[v]
    d = len(nb)
    if d < 2:
        return 0.0
    s = g.adj_sets
    links = sum(1 for i, a in enumerate(nb) for b in nb[i + 1:] if b in s[a])
    return links / (d * (d - 1) / 2)


def path_stats(g: Graph) -> PathStats:
    """All-sources BFS: APL over reachable ordered pairs, diameter, per-node means."""
    if g.n < 2:
        raise UndefinedMetricError("path length needs at least two nodes")
    dist_sum, reach, ecc = _bfs_sums(*g.csr)
    pairs = int(reach.sum())
    if pairs == 0:
        raise UndefinedMetricError("no connected node pairs")
    mean = np.zeros(g.n)
    ok = reach > 0
    mean[ok] = dist_sum[ok] / reach[ok]
    return PathStats(float(dist_sum.sum()) / pairs, int(ecc.max()), pairs, mean, ecc)


def average_path_length(g: Graph) -> float:
    return path_stats(g).apl


def hits_hub_scores(g: Graph, tol: float = 1e-8, max_iter: int = 200) -> NodeMetricVector:
    """HITS hub scores on the symmetric adjacency, L2-normalized.

    With ``A`` symmetric the hub and authority updates coincide, so the pair
    of HITS steps reduces to ``x <- A x``. The iteration used here is the lazy
    form ``x <- (x + A x) / |.|``: same fixed point (the principal eigenvector
    of ``A``) without the period-2 oscillation on bipartite components.
    """
    if g.n == 0:
        raise UndefinedMetricError("HITS on an empty graph")
    if g.m == 0:
        return NodeMetricVector("hub", np.zeros(g.n), True, 0)
    indptr, indices = g.csr
    a = sp.csr_matrix((np.ones(len(indices)), indices, indptr), shape=(g.n, g.n))
    x = np.full(g.n, 1.0 / np.sqrt(g.n))
    converged = False
    it = 0
    for it in range(1, max_iter + 1):
        y = x + a @ x
        y /= np.linalg.norm(y)
        change = np.linalg.norm(y - x)
        x = y
        if change < tol:
            converged = True
            break
    return NodeMetricVector("hub", x, converged, it)


def betweenness(g: Graph, normalized: bool = True) -> np.ndarray:
    """Brandes betweenness for the undirected graph (each pair counted once)."""
    if g.n == 0:
        return np.zeros(0)
    bc = _brandes(*g.csr) / 2.0
    if normalized and g.n > 2:
        bc /= (g.n - 1) * (g.n - 2) / 2.0
    return bc


def bridging_coefficient(g: Graph) -> np.ndarray:
    deg = g.degrees.astype(np.float64)
    out = np.zeros(g.n)
    for v in range(g.n):
        if deg[v] == 0:
            continue
        s = sum(1.0 / deg[u] for u in g.adj[v])
        out[v] = (1.0 / deg[v]) / s
    return out


def bridging_centrality(g: Graph) -> NodeMetricVector:
    """Hwang et al. bridging centrality: betweenness x bridging coefficient."""
    return NodeMetricVector("bridge", betweenness(g) * bridging_coefficient(g))


def role_sets(hub_scores, bridge_scores, hub_pct: float = 12.0, bridge_pct: float = 10.0) -> StructuralRoleSets:
    """Nodes at or above the (100 - pct) percentile of each score vector.

    The cut uses the ``higher`` percentile method so the threshold is always an
    observed value; ties at the threshold are included.
    """
    for pct in (hub_pct, bridge_pct):
        if not 0 < pct < 100:
            raise ConfigError(f"percentile must lie in (0, 100), got {pct}")
    h = np.asarray(getattr(hub_scores, "values", hub_scores), dtype=float)
    b = np.asarray(getattr(bridge_scores, "values", bridge_scores), dtype=float)
    if h.shape != b.shape:
        raise ConfigError("hub and bridge score vectors cover different node sets")
    if h.size == 0:
        return StructuralRoleSets(frozenset(), frozenset(), np.inf, np.inf, hub_pct, bridge_pct)
    th = float(np.percentile(h, 100 - hub_pct, method="higher"))
    tb = float(np.percentile(b, 100 - bridge_pct, method="higher"))
    hubs = frozenset(np.flatnonzero(h >= th).tolist())
    bridges = frozenset(np.flatnonzero(b >= tb).tolist())
    return StructuralRoleSets(hubs, bridges, th, tb, hub_pct, bridge_pct)


def top_nodes(values, count: int = 10) -> list[int]:
    """Ids of the ``count`` largest values; ties go to the lower id."""
    v = np.asarray(values, dtype=float)
    order = np.lexsort((np.arange(len(v)), -v))
    return [int(i) for i in order[:count]]


def node_metrics(g: Graph) -> dict[str, NodeMetricVector]:
    """The five per-node metric vectors used by the information-loss report."""
    out = {
        "degree": NodeMetricVector("degree", g.degrees.astype(float)),
        "cc": NodeMetricVector("cc", clustering_vector(g)),
    }
    try:
        out["apl"] = NodeMetricVector("apl", path_stats(g).mean_distance)
    except UndefinedMetricError:
        out["apl"] = NodeMetricVector("apl", np.zeros(g.n))
    out["hub"] = hits_hub_scores(g) if g.n else NodeMetricVector("hub", np.zeros(0))
    out["bridge"] = bridging_centrality(g)
    return out


def write_metrics_csv(g: Graph, path: str | Path, metrics: dict[str, NodeMetricVector] | None = None) -> None:
    metrics = metrics or node_metrics(g)
    with Path(path).open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["node_id", "degree", "cc", "hub", "bridge"])
        for v in range(g.n):
            w.writerow([v, int(metrics["degree"].values[v]), f"{metrics['cc'].values[v]:.10g}",
                        f"{metrics['hub'].values[v]:.10g}", f"{metrics['bridge'].values[v]:.10g}"])
