"""The five anonymization methods and the restriction context they share.

=============  ============  ========
method         operator      search
=============  ============  ========
clust_g        clustering    global
clust_r_l1     clustering    local1
clust_r_l2     clustering    local2
modif_g        modification  global
modif_r_l2     modification  local2
=============  ============  ========
"""

from __future__ import annotations

import logging
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .community import CommunityPartition, louvain, partition_with_min_size
from .errors import ConfigError, ContractViolation, InfeasibleError
from .graph import Graph, Supernode, contract
from .metrics import StructuralRoleSets, bridging_centrality, hits_hub_scores, role_sets
from .similarity import DistanceWeights, FeatureTable, distances_from, feature_table, rank_candidates

log = logging.getLogger(__name__)

METHODS = {
    "clust_g": ("clustering", "global"),
    "clust_r_l1": ("clustering", "local1"),
    "clust_r_l2": ("clustering", "local2"),
    "modif_g": ("modification", "global"),
    "modif_r_l2": ("modification", "local2"),
}
STRATEGIES = ("global", "local1", "local2")
THETA_PAIRS = 10_000


@dataclass
class RestrictionContext:
    roles: StructuralRoleSets
    partition: CommunityPartition
    theta: float
    table: FeatureTable
    weights: DistanceWeights
    k: int
    seed: int = 0

    def __post_init__(self):
        n = len(self.partition.assignment)
        self.eligible_mask = np.ones(n, dtype=bool)
        self.eligible_mask[list(self.roles.excluded)] = False

    def is_eligible(self, v: int) -> bool:
        return bool(self.eligible_mask[v])

    @property
    def eligible(self) -> list[int]:
        return np.flatnonzero(self.eligible_mask).tolist()

    def community(self, v: int) -> int:
        return int(self.partition.assignment[v])


def mean_pair_distance(table: FeatureTable, w: DistanceWeights, seed: int = 0,
                       max_pairs: int = THETA_PAIRS) -> float:
    n = len(table)
    if n < 2:
        return 0.0
    if n * (n - 1) // 2 <= max_pairs:
        iu, ju = np.triu_indices(n, k=1)
    else:
        rng = np.random.default_rng(seed)
        iu = rng.integers(0, n, size=max_pairs)
        ju = (iu + rng.integers(1, n, size=max_pairs)) % n
    return float((np.abs(table.norm[iu] - table.norm[ju]) @ w.array).mean())


def build_context(g: Graph, k: int, seed: int = 0, weights: DistanceWeights | None = None,
                  hub_pct: float = 12.0, bridge_pct: float = 10.0,
                  table: FeatureTable | None = None) -> RestrictionContext:
    """Role sets, a community partition with >= k eligible nodes each, and theta."""
    if k < 2:
        raise ConfigError(f"k must be >= 2, got {k}")
    if g.n < k:
        raise InfeasibleError(f"graph has {g.n} nodes, fewer than k={k}")
    weights = weights or DistanceWeights.uniform()
    roles = role_sets(hits_hub_scores(g), bridging_centrality(g), hub_pct, bridge_pct)
    if len(roles.excluded) == g.n:
        # every node ties at the role thresholds: nothing is eligible, so the
        # restricted methods have nothing to do and no size guarantee is needed
        partition = louvain(g, 1.0, seed)
    else:
        partition = partition_with_min_size(g, k, seed, roles.excluded)
    table = table or feature_table(g)
    theta = mean_pair_distance(table, weights, seed)
    return RestrictionContext(roles, partition, theta, table, weights, k, seed)


def candidate_pool(v: int, strategy: str, ctx: RestrictionContext, available=None) -> set[int]:
    """Nodes ``v`` may be matched with; ``available`` further filters them."""
    if strategy not in STRATEGIES:
        raise ConfigError(f"unknown strategy {strategy!r}")
    n = len(ctx.eligible_mask)
    if strategy == "global":
        pool = set(range(n))
    else:
        if not ctx.is_eligible(v):
            raise ContractViolation(f"restricted search from excluded node {v}")
        c = ctx.community(v)
        pool = {u for u in ctx.partition.members(c) if ctx.eligible_mask[u]}
    pool.discard(v)
    if available is not None:
        pool &= set(available)
    return pool


def select_candidates(g: Graph, v: int, count: int, strategy: str, ctx: RestrictionContext,
                      available=None, w: DistanceWeights | None = None) -> tuple[list[int], bool]:
    """Best ``count`` matches for ``v`` under a search strategy."""
    w = w or ctx.weights
    pool = candidate_pool(v, strategy, ctx, available)
    if strategy != "local1":
        return rank_candidates(ctx.table, v, pool, w, count)
    if len(pool) < count:
        return rank_candidates(ctx.table, v, pool, w, count)

    # local1: breadth-first rings inside v's community, accepting matches
    # within theta ring by ring before widening
    dist = distances_from(ctx.table, v, w)
    norm = ctx.table.norm
    c = ctx.community(v)
    assignment = ctx.partition.assignment
    accepted: list[int] = []
    seen = {v}
    frontier = [v]
    while frontier and len(accepted) < count:
        ring = sorted({u for x in frontier for u in g.adj[x] if u not in seen and assignment[u] == c})
        seen.update(ring)
        good = [u for u in ring if u in pool and dist[u] <= ctx.theta]
        good.sort(key=lambda u: (dist[u], not np.array_equal(norm[u], norm[v]), u))
        accepted.extend(good)
        frontier = ring
    accepted = accepted[:count]
    if len(accepted) < count:
        rest, _ = rank_candidates(ctx.table, v, pool - set(accepted), w, count - len(accepted))
        accepted += rest
    return accepted, False


@dataclass
class AnonymizedGraph:
    published: Graph
    method: str
    k: int
    node_map: list[int]  # original id -> published id
    eligible: frozenset[int]  # original nodes the method had to protect
    excluded: frozenset[int] = frozenset()  # untouched hubs/bridges
    supernodes: list[Supernode] = field(default_factory=list)
    classes: list[list[int]] = field(default_factory=list)
    pairs: list[tuple[int, int]] = field(default_factory=list)
    modified: frozenset[int] = frozenset()
    dummies: int = 0
    seed: int = 0
    notes: list[str] = field(default_factory=list)

    @property
    def kind(self) -> str:
        return METHODS[self.method][0] if self.method in METHODS else "identity"

    def weights(self) -> np.ndarray:
        """Number of original nodes behind each published node."""
        wts = np.ones(self.published.n, dtype=np.int64)
        for sn in self.supernodes:
            wts[sn.id] = sn.size
        return wts

    def anonymized_nodes(self) -> list[int]:
        """Published ids that stand for protected (eligible) original nodes."""
        return sorted({self.node_map[v] for v in self.eligible})


def identity(g: Graph, k: int = 0) -> AnonymizedGraph:
    return AnonymizedGraph(g, "identity", k, list(range(g.n)), frozenset(range(g.n)))


def _check_strategy(kind: str, strategy: str) -> None:
    allowed = {"clustering": STRATEGIES, "modification": ("global", "local2")}[kind]
    if strategy not in allowed:
        raise ConfigError(f"{kind} does not support strategy {strategy!r}")


def _method_name(kind: str, strategy: str) -> str:
    for name, spec in METHODS.items():
        if spec == (kind, strategy):
            return name
    raise ConfigError(f"no method for {kind}/{strategy}")


# ------------------------------------------------------------- clustering


def anonymize_clustering(g: Graph, k: int, strategy: str, ctx: RestrictionContext,
                         w: DistanceWeights | None = None) -> AnonymizedGraph:
    """Group nodes into supernodes of k..2k-1 original nodes and contract them."""
    _check_strategy("clustering", strategy)
    if k < 2:
        raise ConfigError(f"k must be >= 2, got {k}")
    w = w or ctx.weights
    restricted = strategy != "global"
    nodes = ctx.eligible if restricted else list(range(g.n))
    if len(nodes) < k and nodes:
        raise InfeasibleError(f"{len(nodes)} nodes to protect, fewer than k={k}")

    available = set(nodes)
    groups: list[list[int]] = []
    pairs: list[tuple[int, int]] = []
    for v in nodes:
        if v not in available:
            continue
        cands, short = select_candidates(g, v, k - 1, strategy, ctx, available - {v}, w)
        if short:
            continue
        groups.append([v] + cands)
        pairs.extend((v, c) for c in cands)
        available.difference_update(groups[-1])

    # leftovers join the nearest supernode they may be paired with
    for v in sorted(available):
        options = [i for i, grp in enumerate(groups)
                   if not restricted or ctx.community(grp[0]) == ctx.community(v)]
        if not options:
            raise ContractViolation(f"node {v}: no supernode in its community to join")
        best, best_d, best_u = None, np.inf, None
        for i in options:
            d = distances_from(ctx.table, v, w, groups[i])
            j = int(np.argmin(d))
            if d[j] < best_d:
                best, best_d, best_u = i, d[j], groups[i][j]
        groups[best].append(v)
        pairs.append((best_u, v))

    # a group that reaches 2k splits into two of k (ordered by distance to its seed)
    final: list[list[int]] = []
    for grp in groups:
        while len(grp) >= 2 * k:
            seed_node = grp[0]
            d = distances_from(ctx.table, seed_node, w, grp)
            ordered = [grp[i] for i in np.lexsort((grp, d))]
            final.append(ordered[:k])
            grp = ordered[k:]
        final.append(grp)

    published, node_map = contract(g, final)
    supernodes = [Supernode(node_map[grp[0]], frozenset(grp)) for grp in final]
    supernodes.sort(key=lambda s: s.id)
    protected = frozenset(nodes)
    return AnonymizedGraph(
        published=published, method=_method_name("clustering", strategy), k=k, node_map=node_map,
        eligible=protected, excluded=frozenset(range(g.n)) - protected if restricted else frozenset(),
        supernodes=supernodes, pairs=pairs, modified=frozenset(v for grp in final for v in grp),
        seed=ctx.seed)


# ----------------------------------------------------------- modification


def graphical(seq) -> bool:
    """Erdős–Gallai test for a simple-graph degree sequence."""
    d = sorted(seq, reverse=True)
    if sum(d) % 2:
        return False
    n = len(d)
    prefix = 0
    for r in range(1, n + 1):
        prefix += d[r - 1]
        tail = sum(min(x, r) for x in d[r:])
        if prefix > r * (r - 1) + tail:
            return False
    return True


def havel_hakimi(seq) -> list[tuple[int, int]]:
    """Edges of a simple graph on positions ``0..len(seq)-1`` realizing ``seq``."""
    residual = list(seq)
    edges = []
    while True:
        order = sorted(range(len(residual)), key=lambda i: (-residual[i], i))
        v = order[0]
        r = residual[v]
        if r == 0:
            return edges
        partners = order[1:r + 1]
        if len(partners) < r or residual[partners[-1]] == 0:
            raise ValueError(f"sequence {seq} is not graphical")
        residual[v] = 0
        for u in partners:
            residual[u] -= 1
            edges.append((min(u, v), max(u, v)))


def _multiset_union(multisets) -> Counter:
    out: Counter = Counter()
    for ms in multisets:
        for val, cnt in ms.items():
            if cnt > out[val]:
                out[val] = cnt
    return out


def _target_for(profiles: list[Counter]) -> Counter:
    """Smallest common super-multiset whose per-member extras are all graphical."""
    if any(sum(v * c for v, c in p.items()) % 2 for p in profiles):
        raise ContractViolation("neighbourhood profiles have even sums")
    target = _multiset_union(profiles)
    if sum(v * c for v, c in target.items()) % 2:
        target[1] += 1
    while not all(graphical(list((target - p).elements())) for p in profiles):
        target[1] += 2
    return target


class _ModState:
    """Mutable published graph plus the signature index used by modification."""

    def __init__(self, g: Graph, ctx: RestrictionContext, strategy: str):
        self.n0 = g.n
        self.adj: list[set[int]] = [set(a) for a in g.adj]
        self.ctx = ctx
        self.strategy = strategy
        self.home: list[int] = list(range(g.n))  # original node a dummy hangs off
        self.sig = [self._signature(x) for x in range(g.n)]
        self.count: Counter = Counter(self.sig)
        self.members: dict[tuple, set[int]] = defaultdict(set)
        for x, s in enumerate(self.sig):
            self.members[s].add(x)

    def _profile(self, x: int) -> Counter:
        nb = self.adj[x]
        return Counter(len(self.adj[y] & nb) for y in nb)

    def _signature(self, x: int) -> tuple:
        return tuple(sorted(self._profile(x).elements()))

    def _refresh(self, x: int) -> None:
        old = self.sig[x] if x < len(self.sig) else None
        new = self._signature(x)
        if old is not None:
            self.count[old] -= 1
            self.members[old].discard(x)
        if x < len(self.sig):
            self.sig[x] = new
        else:
            self.sig.append(new)
        self.count[new] += 1
        self.members[new].add(x)

    def class_size(self, x: int) -> int:
        return self.count[self.sig[x]]

    def extend_to(self, x: int, target: Counter) -> int:
        """Attach dummies to ``x`` so its neighbour profile becomes ``target``."""
        extra = sorted((target - self._profile(x)).elements(), reverse=True)
        if not extra:
            return 0
        first = len(self.adj)
        ids = list(range(first, first + len(extra)))
        for d in ids:
            self.adj.append({x})
            self.adj[x].add(d)
            self.home.append(self.home[x])
        for a, b in havel_hakimi(extra):
            self.adj[ids[a]].add(ids[b])
            self.adj[ids[b]].add(ids[a])
        self._refresh(x)
        for d in ids:
            self._refresh(d)
        return len(ids)

    def replicate(self, x: int, copies: int) -> int:
        """Add ``copies`` disconnected dummy replicas of x's 1-hop structure."""
        seq = list(self._signature(x))
        added = 0
        for _ in range(copies):
            center = len(self.adj)
            ids = list(range(center + 1, center + 1 + len(seq)))
            self.adj.append(set(ids))
            self.home.append(self.home[x])
            for d in ids:
                self.adj.append({center})
                self.home.append(self.home[x])
            for a, b in havel_hakimi(seq):
                self.adj[ids[a]].add(ids[b])
                self.adj[ids[b]].add(ids[a])
            for d in [center] + ids:
                self._refresh(d)
            added += 1 + len(ids)
        return added

    def make_identical(self, group: list[int]) -> int:
        target = _target_for([self._profile(x) for x in group])
        return sum(self.extend_to(x, target) for x in group)


def anonymize_modification(g: Graph, k: int, strategy: str, ctx: RestrictionContext,
                           w: DistanceWeights | None = None) -> AnonymizedGraph:
    """Make every protected node share its neighbourhood signature with >= k-1 others.

    Two nodes are identical when they have the same degree, the same edge
    count in their 1-hop subgraph and the same internal degree sequence. Seeds
    are taken in descending degree; each is matched with its k-1 nearest
    unsatisfied candidates and the group is padded with dummy neighbours until
    all members share one signature. Dummies only ever link to the padded node
    and to each other, so an edit changes no other node's signature and a
    class that reached k members stays satisfied.
    """
    _check_strategy("modification", strategy)
    if k < 2:
        raise ConfigError(f"k must be >= 2, got {k}")
    w = w or ctx.weights
    restricted = strategy != "global"
    protected = ctx.eligible if restricted else list(range(g.n))
    if protected and len(protected) < k:
        raise InfeasibleError(f"{len(protected)} nodes to protect, fewer than k={k}")
    protected_set = set(protected)
    st = _ModState(g, ctx, strategy)
    pairs: list[tuple[int, int]] = []
    modified: set[int] = set()
    notes: list[str] = []
    dummies = 0

    def domain(s: int) -> list[int]:
        if not restricted:
            return protected
        c = ctx.community(s)
        return [u for u in ctx.partition.members(c) if ctx.eligible_mask[u]]

    order = sorted(protected, key=lambda v: (-g.degree(v), v))
    for s in order:
        if st.class_size(s) >= k:
            continue
        dom = domain(s)
        pool = [u for u in dom if u != s and st.class_size(u) < k]
        if len(pool) >= k - 1:
            cands, _ = rank_candidates(ctx.table, s, pool, w, k - 1)
            if 0 < len(pool) + 1 - k < k:
                # the remainder could not form a class on its own: take it now
                cands, _ = rank_candidates(ctx.table, s, pool, w, len(pool))
            group = [s] + cands
            dummies += st.make_identical(group)
            pairs.extend((s, c) for c in cands)
            modified.update(group)
            continue
        added, grp, how = _shortfall(st, s, pool, dom, k, w)
        dummies += added
        pairs.extend((s, c) for c in grp if c != s)
        modified.update(x for x in grp if x < g.n)
        notes.append(f"shortfall at node {s}: {how}")

    n = len(st.adj)
    labels = list(g.labels) + [f"dummy{i}" for i in range(n - g.n)]
    published = Graph.from_sets(st.adj, labels)
    classes: dict[tuple, list[int]] = defaultdict(list)
    for v in protected:
        classes[st.sig[v]].append(v)
    return AnonymizedGraph(
        published=published, method=_method_name("modification", strategy), k=k,
        node_map=list(range(g.n)), eligible=frozenset(protected),
        excluded=frozenset(range(g.n)) - protected_set if restricted else frozenset(),
        classes=sorted(sorted(st.members[s]) for s in classes),
        pairs=pairs, modified=frozenset(modified), dummies=dummies, seed=ctx.seed, notes=notes)


def _join_option(st: _ModState, s: int, dom: list[int], k: int, w: DistanceWeights):
    """Cheapest satisfied class in the domain that ``s`` can be padded into."""
    prof_s = st._profile(s)
    best = None
    seen: set[tuple] = set()
    for u in dom:
        if u == s or st.class_size(u) < k or st.sig[u] in seen:
            continue
        seen.add(st.sig[u])
        target = st._profile(u)
        extra = target - prof_s
        if prof_s - target or not graphical(list(extra.elements())):
            continue
        key = (sum(extra.values()), float(distances_from(st.ctx.table, s, w, [u])[0]), u)
        if best is None or key < best[0]:
            best = (key, u, target)
    return best


def _shortfall(st: _ModState, s: int, pool: list[int], dom: list[int], k: int,
               w: DistanceWeights) -> tuple[int, list[int], str]:
    """Too few unsatisfied peers around ``s``.

    In order: pad ``s`` alone up to an existing satisfied class; borrow
    surplus members from satisfied classes in the domain; pull a whole class
    (all of whose members are in the domain) into a new group; add dummy
    replicas of the neighbourhood of ``s``.
    """
    table = st.ctx.table
    dom_set = set(dom)

    # 1. join a satisfied class whose profile contains s's profile
    join = _join_option(st, s, dom, k, w)
    if join is not None:
        _, u, target = join
        return st.extend_to(s, target), [s, u], "join"

    # 2. borrow surplus members (class stays >= k after they leave)
    need = k - 1 - len(pool)
    spare = Counter()
    borrowed: list[int] = []
    cands = [u for u in dom if u != s and u not in pool and st.class_size(u) > k]
    if cands:
        d = distances_from(table, s, w, cands)
        for i in np.lexsort((cands, d)):
            u = cands[i]
            key = st.sig[u]
            if st.count[key] - spare[key] > k:
                spare[key] += 1
                borrowed.append(u)
                if len(borrowed) == need:
                    break
    if len(borrowed) == need:
        group = [s] + pool + borrowed
        return st.make_identical(group), group, "borrow"

    # 3. absorb an entire class whose members all lie in the domain
    options = []
    for key, mem in st.members.items():
        if not mem or st.count[key] < k or s in mem:
            continue
        if mem <= dom_set:
            d = float(distances_from(table, s, w, sorted(mem)).min())
            options.append((d, min(mem), sorted(mem)))
    if options:
        options.sort()
        group = [s] + pool + options[0][2]
        return st.make_identical(group), group, "absorb"
    # 4. dummy replicas of s's neighbourhood fill its class
    return st.replicate(s, k - st.class_size(s)), [s], "replicate"


def anonymize(g: Graph, method: str, k: int, ctx: RestrictionContext,
              w: DistanceWeights | None = None) -> AnonymizedGraph:
    if method not in METHODS:
        raise ConfigError(f"unknown method {method!r}; choose from {sorted(METHODS)}")
    kind, strategy = METHODS[method]
    if kind == "clustering":
        return anonymize_clustering(g, k, strategy, ctx, w)
    return anonymize_modification(g, k, strategy, ctx, w)


# ------------------------------------------------------------------ audit


def neighborhood_signature(g: Graph, x: int) -> tuple:
    """Sorted internal degrees of x's neighbours inside its 1-hop subgraph.

    Its length is deg(x) and its sum is twice the edges among the neighbours,
    so it pins all three parts of the modification equality criterion.
    """
    nb = g.adj_sets[x]
    return tuple(sorted(len(g.adj_sets[y] & nb) for y in nb))


@dataclass
class VerifyReport:
    passed: bool
    violations: list[str]
    violating_nodes: list[int]

    def __bool__(self):
        return self.passed


def verify_k_anonymity(a: AnonymizedGraph, original: Graph | None = None,
                       ctx: RestrictionContext | None = None) -> VerifyReport:
    """Audit an anonymized graph against its provenance.

    With ``ctx`` given, restricted methods are also checked for touching role
    nodes and for pairing across communities.
    """
    k = a.k
    bad: list[str] = []
    nodes: set[int] = set()
    pub = a.published
    if a.kind == "clustering":
        seen: set[int] = set()
        for sn in a.supernodes:
            if not k <= sn.size <= 2 * k - 1:
                bad.append(f"supernode {sn.id} has {sn.size} members, outside [{k}, {2 * k - 1}]")
                nodes.update(sn.contents)
            if seen & sn.contents:
                bad.append(f"supernode {sn.id} overlaps another supernode")
            seen |= sn.contents
            if any(a.node_map[v] != sn.id for v in sn.contents):
                bad.append(f"supernode {sn.id} members are not mapped onto it")
        if seen != set(a.eligible):
            missing = set(a.eligible) - seen
            bad.append(f"supernodes do not cover the protected set ({len(missing)} missing)")
            nodes.update(missing)
        sn_ids = {sn.id for sn in a.supernodes}
        for v in a.excluded:
            if a.node_map[v] in sn_ids:
                bad.append(f"excluded node {v} was merged")
                nodes.add(v)
    elif a.kind == "modification":
        sigs = [neighborhood_signature(pub, x) for x in range(pub.n)]
        count = Counter(sigs)
        for v in sorted(a.eligible):
            if count[sigs[v]] < k:
                bad.append(f"node {v}: only {count[sigs[v]]} nodes share its neighbourhood signature")
                nodes.add(v)
        if pub.n < len(a.node_map):
            bad.append("modification removed nodes")
        if original is not None:
            for v in a.excluded:
                if pub.adj[v] != original.adj[v]:
                    bad.append(f"excluded node {v} changed")
                    nodes.add(v)

    # H1 candidate sets, counted through supernode contents
    if a.kind != "identity":
        wts = a.weights()
        by_degree: Counter = Counter()
        for x in range(pub.n):
            by_degree[pub.degree(x)] += int(wts[x])
        for v in sorted(a.eligible):
            x = a.node_map[v]
            if by_degree[pub.degree(x)] < k:
                bad.append(f"node {v}: degree candidate set {by_degree[pub.degree(x)]} < k")
                nodes.add(v)

    if ctx is not None and a.excluded:
        for u, v in a.pairs:
            if u in a.excluded or v in a.excluded:
                bad.append(f"pair ({u}, {v}) involves an excluded node")
                nodes.update((u, v))
            elif ctx.community(u) != ctx.community(v):
                bad.append(f"pair ({u}, {v}) crosses communities")
                nodes.update((u, v))
        touched = a.modified & a.excluded
        if touched:
            bad.append(f"excluded nodes modified: {sorted(touched)[:10]}")
            nodes.update(touched)
    return VerifyReport(not bad, bad, sorted(nodes))


# ------------------------------------------------------------- provenance


def write_provenance(a: AnonymizedGraph, path) -> None:
    """Secret sidecar: header, then one ``id: member,...`` line per group."""
    lines = [f"# method={a.method} k={a.k} seed={a.seed} original_nodes={len(a.node_map)} dummies={a.dummies}",
             "# excluded: " + ",".join(map(str, sorted(a.excluded)))]
    if a.kind == "clustering":
        lines += [f"supernode {sn.id}: " + ",".join(map(str, sorted(sn.contents))) for sn in a.supernodes]
    else:
        lines += [f"class {i}: " + ",".join(map(str, members)) for i, members in enumerate(a.classes)]
    lines += [f"pair: {u},{v}" for u, v in a.pairs]
    Path(path).write_text("\n".join(lines) + "\n")


def read_provenance(path, published: Graph) -> AnonymizedGraph:
    p = Path(path)
    if not p.exists():
        raise ConfigError(f"provenance sidecar {p} not found")
    header: dict[str, str] = {}
    excluded: set[int] = set()
    groups: list[tuple[int, list[int]]] = []
    pairs: list[tuple[int, int]] = []

    def ids(text: str) -> list[int]:
        return [int(x) for x in text.split(",") if x.strip()]

    for lineno, line in enumerate(p.read_text().splitlines(), 1):
        line = line.strip()
        if not line:
            continue
        if line.startswith("# excluded:"):
            excluded = set(ids(line.split(":", 1)[1]))
        elif line.startswith("#"):
            header.update(tok.split("=", 1) for tok in line[1:].split() if "=" in tok)
        elif line.startswith("pair:"):
            u, v = ids(line.split(":", 1)[1])
            pairs.append((u, v))
        elif line.startswith(("supernode ", "class ")):
            head, members = line.split(":", 1)
            groups.append((int(head.split()[1]), ids(members)))
        else:
            raise ConfigError(f"{p}:{lineno}: unrecognized provenance line {line!r}")
    try:
        method, k, seed, n0 = header["method"], int(header["k"]), int(header["seed"]), int(header["original_nodes"])
    except KeyError as exc:
        raise ConfigError(f"{p}: provenance header lacks {exc}") from None
    eligible = frozenset(range(n0)) - excluded
    if METHODS.get(method, ("",))[0] == "clustering":
        supernodes = [Supernode(i, frozenset(m)) for i, m in groups]
        covered = {v for _, m in groups for v in m}
        layout = [sorted(m) for _, m in groups] + [[v] for v in range(n0) if v not in covered]
        layout.sort(key=lambda grp: grp[0])
        node_map = [0] * n0
        for pid, grp in enumerate(layout):
            for v in grp:
                node_map[v] = pid
        if len(layout) != published.n:
            raise ConfigError(f"{p}: provenance describes {len(layout)} published nodes, graph has {published.n}")
        return AnonymizedGraph(published, method, k, node_map, eligible, frozenset(excluded),
                               supernodes=supernodes, pairs=pairs,
                               modified=frozenset(covered), seed=seed)
    return AnonymizedGraph(published, method, k, list(range(n0)), eligible, frozenset(excluded),
                           classes=[m for _, m in groups], pairs=pairs,
                           modified=frozenset(u for pair in pairs for u in pair),
                           dummies=int(header.get("dummies", published.n - n0)), seed=seed)
