"""Louvain communities and the minimum-eligible-size partition."""

from __future__ import annotations

import csv
import logging
from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import Collection

import networkx as nx
import numpy as np

from .errors import ConfigError, InfeasibleError
from .graph import Graph

log = logging.getLogger(__name__)

RESOLUTION_STEP = 1.5
MAX_RESOLUTION_STEPS = 20


@dataclass
class CommunityPartition:
    assignment: np.ndarray  # node id -> community id, ids are 0..count-1
    resolution: float = 1.0
    seed: int = 0
    fallback_merges: int = 0

    @property
    def count(self) -> int:
        return int(self.assignment.max()) + 1 if len(self.assignment) else 0

    def sizes(self) -> np.ndarray:
        return np.bincount(self.assignment, minlength=self.count)

    @property
    def min_size(self) -> int:
        return int(self.sizes().min()) if len(self.assignment) else 0

    def members(self, c: int) -> list[int]:
        return np.flatnonzero(self.assignment == c).tolist()

    def __getitem__(self, v: int) -> int:
        return int(self.assignment[v])


def _canonical(labels) -> np.ndarray:
    """Renumber community labels by order of first appearance (lowest node id)."""
    mapping: dict[int, int] = {}
    out = np.empty(len(labels), dtype=np.int64)
    for v, c in enumerate(labels):
        if c not in mapping:
            mapping[c] = len(mapping)
        out[v] = mapping[c]
    return out


def modularity(g: Graph, assignment, resolution: float = 1.0) -> float:
    """Modularity with the Gephi-style resolution (edge term scaled by it)."""
    if g.m == 0:
        return 0.0
    assignment = np.asarray(assignment)
    k = assignment.max() + 1
    internal = np.zeros(k)
    degsum = np.zeros(k)
    np.add.at(degsum, assignment, g.degrees)
    for u, v in g.edges():
        if assignment[u] == assignment[v]:
            internal[assignment[u]] += 1
    m2 = 2.0 * g.m
    return float(np.sum(resolution * internal / g.m - (degsum / m2) ** 2))


def louvain(g: Graph, resolution: float = 1.0, seed: int = 0) -> CommunityPartition:
    """Louvain communities with a Gephi-convention resolution.

    Gephi scales the edge term of the modularity gain by the resolution, so
    values above 1 give larger communities. That equals the standard
    null-model resolution ``1 / resolution``, which is what networkx takes.
    """
    if resolution <= 0:
        raise ConfigError(f"resolution must be positive, got {resolution}")
    if g.n == 0:
        return CommunityPartition(np.zeros(0, dtype=np.int64), resolution, seed)
    comms = nx.community.louvain_communities(g.to_networkx(), resolution=1.0 / resolution, seed=seed)
    labels = np.empty(g.n, dtype=np.int64)
    for c, nodes in enumerate(comms):
        for v in nodes:
            labels[v] = c
    return CommunityPartition(_canonical(labels), resolution, seed)


def _eligible_counts(assignment: np.ndarray, eligible_mask: np.ndarray) -> np.ndarray:
    count = int(assignment.max()) + 1
    return np.bincount(assignment[eligible_mask], minlength=count)


def partition_with_min_size(g: Graph, k: int, seed: int = 0,
                            excluded: Collection[int] = ()) -> CommunityPartition:
    """Partition where every community holds at least ``k`` eligible nodes.

    Eligible means not in ``excluded`` (the hub/bridge role nodes). The
    resolution grows by 1.5x from 1.0; after 20 steps any undersized
    community is folded into the neighbouring community it shares most edges
    with.
    """
    if k < 2:
        raise ConfigError(f"k must be >= 2, got {k}")
    if g.n < k:
        raise InfeasibleError(f"graph has {g.n} nodes, fewer than k={k}")
    mask = np.ones(g.n, dtype=bool)
    mask[list(excluded)] = False
    if mask.sum() < k:
        raise InfeasibleError(f"only {int(mask.sum())} eligible nodes for k={k}")

    res = 1.0
    part = None
    for _ in range(MAX_RESOLUTION_STEPS):
        part = louvain(g, res, seed)
        if _eligible_counts(part.assignment, mask).min() >= k:
            log.debug("resolution %.4g satisfies k=%d", res, k)
            return part
        res *= RESOLUTION_STEP
    assert part is not None
    return _merge_undersized(g, part, k, mask)


def _merge_undersized(g: Graph, part: CommunityPartition, k: int, mask: np.ndarray) -> CommunityPartition:
    labels = part.assignment.copy()
    merges = 0
    while True:
        counts = _eligible_counts(labels, mask)
        small = [c for c in range(len(counts)) if counts[c] < k]
        if not small:
            break
        # smallest first, lowest id on ties
        c = min(small, key=lambda x: (counts[x], x))
        links: Counter[int] = Counter()
        for v in np.flatnonzero(labels == c):
            for w in g.adj[v]:
                if labels[w] != c:
                    links[int(labels[w])] += 1
        if links:
            target = min(links, key=lambda d: (-links[d], d))
        else:
            # disconnected from the rest: join the community with most eligible nodes
            others = [d for d in range(len(counts)) if d != c]
            target = min(others, key=lambda d: (-counts[d], d))
        labels[labels == c] = target
        labels = _canonical(labels)
        merges += 1
    log.info("fallback merged %d undersized communities (k=%d)", merges, k)
    return CommunityPartition(labels, part.resolution, part.seed, merges)


def write_partition_csv(part: CommunityPartition, path: str | Path) -> None:
    with Path(path).open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["node_id", "community_id"])
        for v, c in enumerate(part.assignment):
            w.writerow([v, int(c)])


def read_partition_csv(path: str | Path) -> CommunityPartition:
    rows: list[tuple[int, int]] = []
    with Path(path).open(newline="") as fh:
        for row in csv.DictReader(fh):
            rows.append((int(row["node_id"]), int(row["community_id"])))
    rows.sort()
    if [v for v, _ in rows] != list(range(len(rows))):
        raise ConfigError(f"{path}: node ids must be exactly 0..n-1")
    return CommunityPartition(_canonical([c for _, c in rows]))
