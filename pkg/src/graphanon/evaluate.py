"""Information loss, adversary queries, candidate-set risk and the leak estimate."""

from __future__ import annotations

import csv
import json
from collections import Counter
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .anonymize import AnonymizedGraph, RestrictionContext, identity
from .community import louvain
from .errors import ConfigError, UndefinedMetricError
from .graph import Graph
from .metrics import METRIC_IDS, bfs_distances, node_metrics, top_nodes, triangles

QUERIES = ("H1", "H2", "SG", "FH2", "FB2")
BUCKETS = ("=1", "2-4", "5-10", "11-20", ">20")
SG_BUCKETS = ("=1", "2-10", "11-100", "101-1000", ">1000")
_EDGES = {"default": (1, 4, 10, 20), "SG": (1, 10, 100, 1000)}
HORIZON = 2
FINGERPRINT_SIZE = 10


# ------------------------------------------------------------------- loss


def _values(v) -> np.ndarray:
    return np.asarray(getattr(v, "values", v), dtype=float)


def quantile_align(a: np.ndarray, b: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Sort both vectors and resample the longer at the shorter one's quantiles."""
    a, b = np.sort(a), np.sort(b)
    if len(a) == len(b):
        return a, b
    short, long_ = (a, b) if len(a) < len(b) else (b, a)
    if len(short) == 1:
        pos = np.array([0.5 * (len(long_) - 1)])
    else:
        pos = np.linspace(0.0, len(long_) - 1, len(short))
    res = np.interp(pos, np.arange(len(long_)), long_)
    return (short, res) if len(a) < len(b) else (res, short)


def information_loss(orig, pert, paired: bool | None = None) -> float:
    """``1 - pearson(orig, pert)``, in [0, 2].

    Equal-length vectors are paired position by position unless
    ``paired=False``; otherwise both are sorted and quantile-aligned. A
    constant side has no defined correlation: loss 0 if both sides are the
    same constant vector, 1 otherwise.
    """
    a, b = _values(orig), _values(pert)
    if a.size == 0 or b.size == 0:
        raise UndefinedMetricError("information loss of an empty metric vector")
    if paired is None:
        paired = len(a) == len(b)
    if paired:
        if len(a) != len(b):
            raise ConfigError("paired loss needs equal-length vectors")
    else:
        a, b = quantile_align(a, b)
    if np.ptp(a) == 0 or np.ptp(b) == 0:
        return 0.0 if np.array_equal(a, b) else 1.0
    with np.errstate(divide="ignore", invalid="ignore"):
        r = float(np.corrcoef(a, b)[0, 1])
    if not np.isfinite(r):
        return 1.0
    return float(np.clip(1.0 - r, 0.0, 2.0))


def community_loss(nc: int, nc_pert: int) -> tuple[float, float]:
    """``(|nc - nc'|, |nc - nc'| / nc)``."""
    if nc < 1 or nc_pert < 1:
        raise ConfigError("community counts must be >= 1")
    raw = float(abs(nc - nc_pert))
    return raw, raw / nc


@dataclass
class LossReport:
    method: str
    k: int
    losses: dict[str, float]
    community_raw: float
    community_normalized: float
    communities: tuple[int, int] = (0, 0)

    def rows(self):
        for m in METRIC_IDS:
            yield self.method, self.k, m, self.losses[m]
        yield self.method, self.k, "communities", self.community_raw
        yield self.method, self.k, "communities_norm", self.community_normalized


def loss_report(original: Graph, published: Graph, method: str = "identity", k: int = 0,
                seed: int = 0, base_metrics=None, base_communities: int | None = None) -> LossReport:
    m0 = base_metrics or node_metrics(original)
    m1 = node_metrics(published)
    losses = {m: information_loss(m0[m], m1[m]) for m in METRIC_IDS}
    nc = base_communities if base_communities is not None else louvain(original, 1.0, seed).count
    nc1 = louvain(published, 1.0, seed).count
    raw, norm = community_loss(nc, nc1)
    return LossReport(method, k, losses, raw, norm, (nc, nc1))


# ---------------------------------------------------------------- queries


@dataclass(frozen=True)
class QuerySignature:
    query: str
    value: object


@dataclass
class FingerprintSets:
    hubs: list[int]
    bridges: list[int]

    @classmethod
    def of(cls, g: Graph, metrics=None) -> "FingerprintSets":
        metrics = metrics or node_metrics(g)
        return cls(top_nodes(metrics["hub"].values, FINGERPRINT_SIZE),
                   top_nodes(metrics["bridge"].values, FINGERPRINT_SIZE))


def _fingerprints(g: Graph, anchors: list[int]) -> np.ndarray:
    """Column j: distance of every node to anchor j, 0 beyond the horizon."""
    out = np.zeros((g.n, len(anchors)), dtype=np.int64)
    indptr, indices = g.csr
    for j, a in enumerate(anchors):
        d = bfs_distances(indptr, indices, a, HORIZON)
        out[:, j] = np.where(d > 0, d, 0)
    return out


def signature(g: Graph, x: int, query: str, hubs10=(), bridges10=()) -> QuerySignature:
    if not 0 <= x < g.n:
        raise KeyError(f"unknown node id {x}")
    return QuerySignature(query, all_signatures(g, query, hubs10, bridges10)[x])


def all_signatures(g: Graph, query: str, hubs10=(), bridges10=()) -> list:
    if query == "H1":
        return [int(d) for d in g.degrees]
    if query == "H2":
        deg = g.degrees
        return [tuple(sorted(int(deg[u]) for u in g.adj[x])) for x in range(g.n)]
    if query == "SG":
        return [int(v) for v in g.degrees + triangles(g)]
    if query in ("FH2", "FB2"):
        anchors = list(hubs10 if query == "FH2" else bridges10)
        return [tuple(row) for row in _fingerprints(g, anchors).tolist()]
    raise ConfigError(f"unknown query {query!r}")


def candidate_set_sizes(signatures: list, weights) -> np.ndarray:
    """Per node: total weight of the nodes sharing its signature."""
    total: Counter = Counter()
    for s, w in zip(signatures, weights):
        total[s] += int(w)
    return np.array([total[s] for s in signatures], dtype=np.int64)


def bucket_of(size: int, query: str) -> str:
    names = SG_BUCKETS if query == "SG" else BUCKETS
    edges = _EDGES["SG" if query == "SG" else "default"]
    for name, hi in zip(names, edges):
        if size <= hi:
            return name
    return names[-1]


@dataclass
class RiskReport:
    query: str
    scope: str
    fractions: dict[str, float]
    counts: dict[str, int] = field(default_factory=dict)

    @property
    def buckets(self) -> tuple[str, ...]:
        return SG_BUCKETS if self.query == "SG" else BUCKETS


def risk_report(a: AnonymizedGraph | Graph, query: str, scope: str = "all",
                fingerprint: FingerprintSets | None = None) -> RiskReport:
    """Candidate-set buckets for one adversary query over the published graph.

    ``scope="anonymized"`` restricts the tally to published nodes standing for
    protected nodes; excluded hubs and bridges are published as they were.
    """
    if isinstance(a, Graph):
        a = identity(a)
    if a.published is None:
        raise ConfigError("risk report needs an anonymized graph with provenance")
    pub = a.published
    if query in ("FH2", "FB2") and fingerprint is None:
        fingerprint = FingerprintSets.of(pub)
    fp = fingerprint or FingerprintSets([], [])
    sigs = all_signatures(pub, query, fp.hubs, fp.bridges)
    sizes = candidate_set_sizes(sigs, a.weights())
    if scope == "all":
        nodes = range(pub.n)
    elif scope == "anonymized":
        nodes = a.anonymized_nodes()
    else:
        raise ConfigError(f"unknown scope {scope!r}")
    names = SG_BUCKETS if query == "SG" else BUCKETS
    counts = Counter(bucket_of(int(sizes[x]), query) for x in nodes)
    total = sum(counts.values())
    fractions = {b: (counts[b] / total if total else 0.0) for b in names}
    return RiskReport(query, scope, fractions, {b: counts[b] for b in names})


def risk_reports(a: AnonymizedGraph | Graph, scope: str = "all", metrics=None) -> dict[str, RiskReport]:
    pub = a if isinstance(a, Graph) else a.published
    fp = FingerprintSets.of(pub, metrics)
    return {q: risk_report(a, q, scope, fp) for q in QUERIES}


# ------------------------------------------------------------------- leak


@dataclass
class LeakReport:
    probability: float
    role_density: float
    unmatched_fraction: float
    diversity_reduction: float


def leak_estimate(ctx: RestrictionContext, g: Graph) -> LeakReport:
    """Leak probability of excluding role nodes and of community-bound matching.

    role density = |V^h u V^b| / N; unmatched fraction = mean over role nodes
    of the share of their neighbours that are role nodes or have no other
    eligible node in their community. Diversity reduction is N / N_c with N_c
    the mean community size, i.e. the number of communities.
    """
    roles = sorted(ctx.roles.excluded)
    n = g.n
    density = len(roles) / n if n else 0.0
    eligible_per_comm = np.bincount(ctx.partition.assignment[ctx.eligible_mask],
                                    minlength=ctx.partition.count)
    shares = []
    for v in roles:
        nb = g.adj[v]
        if not nb:
            continue
        bad = 0
        for u in nb:
            c = ctx.community(u)
            if not ctx.eligible_mask[u] or eligible_per_comm[c] - 1 < 1:
                bad += 1
        shares.append(bad / len(nb))
    unmatched = float(np.mean(shares)) if shares else 0.0
    return LeakReport(density * unmatched, density, unmatched, float(ctx.partition.count))


# ----------------------------------------------------------------- output


def write_loss_csv(reports: list[LossReport], path: str | Path) -> None:
    with Path(path).open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["method", "k", "metric", "value"])
        for rep in reports:
            for method, k, m, val in rep.rows():
                w.writerow([method, k, m, f"{val:.12g}"])


def write_risk_csv(rows: list[tuple[str, int, RiskReport]], path: str | Path) -> None:
    with Path(path).open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["method", "k", "query", "bucket", "fraction", "scope"])
        for method, k, rep in rows:
            for b in rep.buckets:
                w.writerow([method, k, rep.query, b, f"{rep.fractions[b]:.12g}", rep.scope])


def report_json(loss: LossReport, risks: list[RiskReport], extra: dict | None = None) -> str:
    doc = {
        "method": loss.method,
        "k": loss.k,
        "loss": loss.losses,
        "community_loss": {"raw": loss.community_raw, "normalized": loss.community_normalized,
                           "original": loss.communities[0], "published": loss.communities[1]},
        "risk": [asdict(r) for r in risks],
    }
    if extra:
        doc.update(extra)
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"
