"""Neighbourhood features, the weighted distance, VF2/VF2-D and weight training."""

from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from . import vf2
from .errors import ConfigError, ContractViolation
from .graph import Graph, NeighborhoodSubgraph, neighborhood
from .metrics import triangles

log = logging.getLogger(__name__)

FEATURES = ("d_r", "n_e", "cc", "ad_an", "sd_an")
_table_ids = itertools.count(1)


@dataclass(frozen=True)
class SubgraphFeatures:
    d_r: float
    n_e: float
    cc: float
    ad_an: float
    sd_an: float
    table_id: int = 0

    def as_array(self) -> np.ndarray:
        return np.array([self.d_r, self.n_e, self.cc, self.ad_an, self.sd_an])


@dataclass
class FeatureTable:
    """Raw and min-max normalized features for every node of one graph."""

    raw: np.ndarray
    lo: np.ndarray
    hi: np.ndarray
    norm: np.ndarray
    table_id: int = field(default_factory=lambda: next(_table_ids))

    def __len__(self):
        return len(self.raw)

    def row(self, v: int) -> SubgraphFeatures:
        return SubgraphFeatures(*self.norm[v].tolist(), table_id=self.table_id)


def raw_features(g: Graph) -> np.ndarray:
    deg = g.degrees.astype(np.float64)
    tri = triangles(g).astype(np.float64)
    pairs = deg * (deg - 1) / 2
    cc = np.divide(tri, pairs, out=np.zeros(g.n), where=pairs > 0)
    ad = np.zeros(g.n)
    sd = np.zeros(g.n)
    for v in range(g.n):
        if g.adj[v]:
            nd = deg[list(g.adj[v])]
            ad[v] = nd.mean()
            sd[v] = nd.std()
    return np.column_stack([deg, deg + tri, cc, ad, sd])


def feature_table(g: Graph) -> FeatureTable:
    raw = raw_features(g) if g.n else np.zeros((0, 5))
    lo = raw.min(axis=0) if g.n else np.zeros(5)
    hi = raw.max(axis=0) if g.n else np.zeros(5)
    span = hi - lo
    norm = np.divide(raw - lo, span, out=np.zeros_like(raw), where=span > 0)
    return FeatureTable(raw, lo, hi, norm)


def features(g: Graph, v: int, norm: FeatureTable | None = None) -> SubgraphFeatures:
    if not 0 <= v < g.n:
        raise KeyError(f"unknown node id {v}")
    table = norm if norm is not None else feature_table(g)
    return table.row(v)


@dataclass(frozen=True)
class DistanceWeights:
    w: tuple[float, float, float, float, float] = (0.2, 0.2, 0.2, 0.2, 0.2)

    def __post_init__(self):
        if len(self.w) != 5 or any(x < 0 for x in self.w):
            raise ConfigError(f"need five non-negative weights, got {self.w}")

    @classmethod
    def uniform(cls) -> "DistanceWeights":
        return cls()

    @property
    def array(self) -> np.ndarray:
        return np.asarray(self.w, dtype=float)

    def normalized(self) -> "DistanceWeights":
        s = sum(self.w)
        if s <= 0:
            raise ConfigError("weights sum to zero")
        return DistanceWeights(tuple(x / s for x in self.w))

    def save(self, path: str | Path, g: Graph) -> None:
        Path(path).write_text(f"# graph n={g.n} m={g.m} hash={g.fingerprint()}\n"
                              + " ".join(repr(float(x)) for x in self.w) + "\n")

    @classmethod
    def load(cls, path: str | Path, g: Graph | None = None) -> "DistanceWeights":
        """Read weights; with ``g`` given, reject weights trained on another graph."""
        header = None
        values = None
        for line in Path(path).read_text().splitlines():
            line = line.strip()
            if line.startswith("#"):
                header = line[1:].strip()
            elif line:
                values = tuple(float(x) for x in line.split())
        if values is None or len(values) != 5:
            raise ConfigError(f"{path}: expected a line of five weights")
        if g is not None:
            expect = f"graph n={g.n} m={g.m} hash={g.fingerprint()}"
            if header != expect:
                raise ConfigError(f"{path}: weights are stale ({header!r} != {expect!r})")
        return cls(values)


def distance(a: SubgraphFeatures, b: SubgraphFeatures, w: DistanceWeights) -> float:
    if a.table_id != b.table_id:
        raise ContractViolation("features normalized against different graphs")
    return float(np.dot(w.array, np.abs(a.as_array() - b.as_array())))


def distances_from(table: FeatureTable, v: int, w: DistanceWeights, nodes=None) -> np.ndarray:
    """Distance from ``v`` to every node (or to ``nodes``), vectorized."""
    rows = table.norm if nodes is None else table.norm[np.asarray(nodes, dtype=np.int64)]
    return np.abs(rows - table.norm[v]) @ w.array


def rank_candidates(table: FeatureTable, v: int, pool: Iterable[int], w: DistanceWeights,
                    count: int) -> tuple[list[int], bool]:
    """The ``count`` pool nodes closest to ``v``.

    Ties on distance go to exact feature copies first, then to the lower id.
    Returns ``(ranked, shortfall)``; with a short pool all of it is returned.
    """
    pool = sorted(set(pool))
    if v in pool:
        raise ContractViolation(f"node {v} is in its own candidate pool")
    if count <= 0 or not pool:
        return [], count > len(pool)
    idx = np.asarray(pool, dtype=np.int64)
    d = distances_from(table, v, w, idx)
    exact = np.all(table.norm[idx] == table.norm[v], axis=1)
    order = np.lexsort((idx, ~exact, d))
    ranked = idx[order[:count]].tolist()
    return ranked, len(pool) < count


# ------------------------------------------------------------- matching


@dataclass(frozen=True)
class MatchScore:
    isomorphic: bool
    degree_fidelity: float
    exhaustive: bool = True


def vf2_isomorphic(s1: NeighborhoodSubgraph, s2: NeighborhoodSubgraph) -> bool:
    """Rooted isomorphism: reference must map onto reference."""
    if len(s1) != len(s2) or s1.num_edges != s2.num_edges:
        return False
    return vf2.is_isomorphic(s1.local_adjacency(), s2.local_adjacency(), fixed=[(0, 0)])


def vf2d_score(s1: NeighborhoodSubgraph, s2: NeighborhoodSubgraph, budget: int = 200_000) -> MatchScore:
    """VF2-D: rooted isomorphism plus how well host degrees are preserved.

    Fidelity is ``1 - min_mapping sum |ext1(m) - ext2(mu(m))| / (E1 + E2)``
    where ``ext`` is a member's number of edges leaving the neighbourhood and
    ``E1``/``E2`` the totals over each side; both zero gives fidelity 1.
    """
    if not vf2_isomorphic(s1, s2):
        return MatchScore(False, 0.0)
    e1, e2 = s1.external_degree, s2.external_degree
    denom = sum(e1) + sum(e2)
    if denom == 0:
        return MatchScore(True, 1.0)
    a1, a2 = s1.local_adjacency(), s2.local_adjacency()
    mapping, cost, exhaustive = vf2.min_cost_isomorphism(
        a1, a2, lambda a, b: abs(e1[a] - e2[b]), fixed=[(0, 0)], budget=budget)
    if mapping is None:
        # budget ran out before any complete mapping: fall back to the first one
        mapping = next(vf2.isomorphisms(a1, a2, fixed=[(0, 0)]))
        cost = sum(abs(e1[a] - e2[b]) for a, b in enumerate(mapping))
        exhaustive = False
    return MatchScore(True, float(1.0 - cost / denom), exhaustive)


# ------------------------------------------------------------- training


@dataclass
class SAConfig:
    initial_temperature: float = 1.0
    cooling: float = 0.95
    epochs: int = 100
    proposals: int = 50
    mix: float = 0.3  # weight of the Dirichlet draw in each proposal


@dataclass
class TrainingResult:
    weights: DistanceWeights
    fitness: float
    baseline_fitness: float  # fitness of the uniform starting weights
    history: list[float]  # best-so-far fitness after each proposal
    sample: list[int]


class _Fitness:
    """Mean VF2-D score between sampled nodes and their nearest neighbour."""

    def __init__(self, g: Graph, table: FeatureTable, sample: Sequence[int]):
        self.g = g
        self.sample = np.asarray(sample, dtype=np.int64)
        self.diff = np.abs(table.norm[None, :, :] - table.norm[self.sample][:, None, :])
        self.exact = np.all(self.diff == 0, axis=2)
        self.hoods: dict[int, NeighborhoodSubgraph] = {}
        self.cache: dict[tuple[int, int], float] = {}
        self.ids = np.arange(g.n)

    def hood(self, v: int) -> NeighborhoodSubgraph:
        if v not in self.hoods:
            self.hoods[v] = neighborhood(self.g, v)
        return self.hoods[v]

    def nearest(self, w: np.ndarray) -> np.ndarray:
        d = self.diff @ w
        d[np.arange(len(self.sample)), self.sample] = np.inf
        out = np.empty(len(self.sample), dtype=np.int64)
        for i in range(len(self.sample)):
            row = d[i]
            best = np.flatnonzero(row == row.min())
            if len(best) > 1:
                ex = best[self.exact[i, best]]
                best = ex if len(ex) else best
            out[i] = best[0]
        return out

    def __call__(self, w: np.ndarray) -> float:
        total = 0.0
        for s, t in zip(self.sample.tolist(), self.nearest(w).tolist()):
            key = (s, t)
            if key not in self.cache:
                self.cache[key] = vf2d_score(self.hood(s), self.hood(t), budget=20_000).degree_fidelity
            total += self.cache[key]
        return total / len(self.sample)


def sample_nodes(g: Graph, size: int, seed: int) -> list[int]:
    rng = np.random.default_rng(seed)
    if size >= g.n:
        return list(range(g.n))
    return sorted(rng.choice(g.n, size=size, replace=False).tolist())


def train_weights(g: Graph, sample_size: int = 200, config: SAConfig | None = None, seed: int = 0,
                  table: FeatureTable | None = None) -> TrainingResult:
    """Simulated annealing over the weight simplex.

    Proposals mix the current weights with a flat Dirichlet draw, so they stay
    on the simplex. The best weights seen are returned.
    """
    if sample_size < 2:
        raise ConfigError("sample_size must be >= 2")
    if g.n < 2:
        raise ConfigError("graph too small to sample training pairs")
    cfg = config or SAConfig()
    table = table or feature_table(g)
    rng = np.random.default_rng(seed)
    sample = sample_nodes(g, sample_size, seed)
    fit = _Fitness(g, table, sample)

    w = DistanceWeights.uniform().array
    f = fit(w)
    baseline = f
    best_w, best_f = w.copy(), f
    history = [best_f]
    temp = cfg.initial_temperature
    for epoch in range(cfg.epochs):
        for _ in range(cfg.proposals):
            cand = (1 - cfg.mix) * w + cfg.mix * rng.dirichlet(np.ones(5))
            fc = fit(cand)
            if fc >= f or rng.random() < math.exp((fc - f) / temp):
                w, f = cand, fc
                if f > best_f:
                    best_w, best_f = w.copy(), f
            history.append(best_f)
        temp *= cfg.cooling
        log.debug("epoch %d T=%.4g best=%.4f", epoch, temp, best_f)
    weights = DistanceWeights(tuple(float(x) for x in best_w / best_w.sum()))
    return TrainingResult(weights, best_f, baseline, history, sample)


def isomorphism_hit_rate(g: Graph, w: DistanceWeights, k: int, sample: Sequence[int],
                         table: FeatureTable | None = None) -> float:
    """Fraction of the top k-1 distance-ranked nodes that are rooted isomorphisms."""
    table = table or feature_table(g)
    everyone = range(g.n)
    hits = total = 0
    hoods: dict[int, NeighborhoodSubgraph] = {}

    def hood(v):
        if v not in hoods:
            hoods[v] = neighborhood(g, v)
        return hoods[v]

    for v in sample:
        ranked, _ = rank_candidates(table, v, (u for u in everyone if u != v), w, k - 1)
        for u in ranked:
            total += 1
            hits += vf2_isomorphic(hood(v), hood(u))
    return hits / total if total else 0.0
