import csv
import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.stats import pearsonr

import oracles
from conftest import gnp, small_graphs
from graphanon.anonymize import anonymize, build_context, identity
from graphanon.errors import ConfigError, UndefinedMetricError
from graphanon.evaluate import (BUCKETS, QUERIES, SG_BUCKETS, FingerprintSets, all_signatures, bucket_of,
                                candidate_set_sizes, community_loss, information_loss, leak_estimate,
                                loss_report, quantile_align, report_json, risk_report, risk_reports,
                                signature, write_loss_csv, write_risk_csv)
from graphanon.graph import Graph
from graphanon.metrics import METRIC_IDS

finite = st.floats(-1e3, 1e3, allow_nan=False)


def cycle(n):
    return Graph.from_edges(n, [(i, (i + 1) % n) for i in range(n)])


# ------------------------------------------------------------------- loss


def test_loss_examples():
    x = np.arange(10.0)
    assert information_loss(x, x) == pytest.approx(0.0)
    assert information_loss(x, -x) == pytest.approx(2.0)
    assert information_loss(np.full(6, 2.0), x[:6]) == 1.0
    assert information_loss(x[:6], np.full(6, 2.0)) == 1.0
    assert information_loss(np.full(6, 2.0), np.full(6, 2.0)) == 0.0
    assert information_loss(np.full(6, 2.0), np.full(6, 3.0)) == 1.0


def test_loss_unequal_lengths_are_quantile_aligned():
    assert information_loss(np.arange(10.0), np.arange(20.0)) == pytest.approx(0.0)
    a, b = quantile_align(np.array([3.0, 1.0, 2.0]), np.array([0.0, 10.0, 5.0, 7.5, 2.5]))
    assert list(a) == [1.0, 2.0, 3.0] and list(b) == [0.0, 5.0, 10.0]


def test_loss_errors():
    with pytest.raises(UndefinedMetricError):
        information_loss([], [1.0])
    with pytest.raises(ConfigError):
        information_loss([1.0, 2.0], [1.0], paired=True)


@given(st.lists(st.tuples(finite, finite), min_size=3, max_size=40))
def test_loss_matches_pearson(pairs):
    a = np.array([p[0] for p in pairs])
    b = np.array([p[1] for p in pairs])
    got = information_loss(a, b)
    assert 0.0 <= got <= 2.0
    if np.ptp(a) > 1e-6 and np.ptp(b) > 1e-6:
        assert got == pytest.approx(1.0 - pearsonr(a, b)[0], abs=1e-9)


@given(st.lists(finite, min_size=2, max_size=30), st.lists(finite, min_size=2, max_size=30))
def test_unpaired_loss_in_range(a, b):
    assert 0.0 <= information_loss(a, b, paired=False) <= 2.0


def test_community_loss_examples():
    assert community_loss(10, 7) == (3.0, 0.3)
    assert community_loss(4, 4) == (0.0, 0.0)
    with pytest.raises(ConfigError):
        community_loss(0, 3)


def test_identity_has_zero_loss():
    g = gnp(60, 0.08, 4)
    rep = loss_report(g, identity(g).published)
    assert all(rep.losses[m] == pytest.approx(0.0, abs=1e-12) for m in METRIC_IDS)
    assert rep.community_raw == 0.0


# ---------------------------------------------------------------- queries


def test_signature_examples():
    path = Graph.from_edges(3, [(0, 1), (1, 2)])
    assert all_signatures(path, "H1") == [1, 2, 1]
    assert signature(path, 1, "H2").value == (1, 1)
    tri = Graph.from_edges(4, [(0, 1), (1, 2), (0, 2), (2, 3)])
    assert all_signatures(tri, "SG") == [3, 3, 4, 1]
    assert all_signatures(path, "FH2", hubs10=[1], bridges10=[]) == [(1,), (0,), (1,)]
    with pytest.raises(KeyError):
        signature(path, 3, "H1")
    with pytest.raises(ConfigError):
        all_signatures(path, "H3")


def test_bucket_boundaries():
    expect = {1: "=1", 2: "2-4", 4: "2-4", 5: "5-10", 10: "5-10", 11: "11-20", 20: "11-20", 21: ">20"}
    for size, name in expect.items():
        assert bucket_of(size, "H1") == name
    expect_sg = {1: "=1", 10: "2-10", 11: "11-100", 1000: "101-1000", 1001: ">1000"}
    for size, name in expect_sg.items():
        assert bucket_of(size, "SG") == name


@given(small_graphs(min_nodes=1, max_nodes=9), st.sampled_from(QUERIES))
def test_buckets_match_pairwise_oracle(g, query):
    fp = FingerprintSets.of(g)
    rep = risk_report(g, query, fingerprint=fp)
    adj = [set(a) for a in g.adj]
    expect = oracles.bucket_counts(adj, [1] * g.n, query, fp.hubs, fp.bridges)
    assert rep.counts == expect
    assert sum(rep.fractions.values()) == pytest.approx(1.0)


@pytest.mark.parametrize("method", ["clust_g", "clust_r_l2"])
def test_weighted_buckets_match_oracle(method):
    g = gnp(60, 0.07, 9)
    a = anonymize(g, method, 3, build_context(g, 3))
    pub = a.published
    adj = [set(x) for x in pub.adj]
    w = a.weights()
    for q in ("H1", "H2", "SG"):
        assert risk_report(a, q).counts == oracles.bucket_counts(adj, w, q)


def test_candidate_set_sizes():
    assert list(candidate_set_sizes(["a", "b", "a"], [1, 1, 3])) == [4, 1, 4]


def test_identity_cycle_all_in_one_bucket():
    reps = risk_reports(cycle(12))
    assert reps["H1"].fractions["11-20"] == 1.0
    assert reps["SG"].fractions["11-100"] == 1.0
    assert set(reps["SG"].fractions) == set(SG_BUCKETS)
    assert set(reps["H2"].fractions) == set(BUCKETS)


def test_anonymized_scope(toy):
    a = anonymize(toy, "clust_r_l2", 2, build_context(toy, 2))
    rep = risk_report(a, "H1", scope="anonymized")
    assert sum(rep.counts.values()) == len(a.supernodes) == 3
    assert sum(risk_report(a, "H1").counts.values()) == a.published.n
    with pytest.raises(ConfigError):
        risk_report(a, "H1", scope="some")


# ------------------------------------------------------------------- leak


def test_toy_leak(toy):
    rep = leak_estimate(build_context(toy, 2), toy)
    assert rep.role_density == pytest.approx(2 / 9)
    # hub 4: 1 of 4 neighbours is a role node; bridge 3: 1 of 2
    assert rep.unmatched_fraction == pytest.approx(0.375)
    assert rep.probability == pytest.approx(2 / 9 * 0.375)
    assert rep.diversity_reduction == 3.0


def test_single_community_leak():
    g = Graph.from_edges(5, [(u, v) for u in range(5) for v in range(u + 1, 5)])
    ctx = build_context(g, 2)
    rep = leak_estimate(ctx, g)
    assert ctx.partition.count == 1
    assert rep.diversity_reduction == 1.0
    assert 0.0 <= rep.probability <= rep.role_density <= 1.0


# ----------------------------------------------------------------- output


def test_writers(tmp_path, toy):
    a = anonymize(toy, "clust_r_l1", 2, build_context(toy, 2))
    loss = loss_report(toy, a.published, a.method, 2)
    risks = list(risk_reports(a).values())
    write_loss_csv([loss], tmp_path / "l.csv")
    write_risk_csv([(a.method, 2, r) for r in risks], tmp_path / "r.csv")
    rows = list(csv.reader((tmp_path / "l.csv").open()))
    assert rows[0] == ["method", "k", "metric", "value"]
    assert len(rows) == 1 + len(METRIC_IDS) + 2
    rows = list(csv.reader((tmp_path / "r.csv").open()))
    assert rows[0][-1] == "scope" and len(rows) == 1 + 5 * len(QUERIES)
    doc = json.loads(report_json(loss, risks, {"seed": 0}))
    assert doc["method"] == "clust_r_l1" and doc["seed"] == 0 and len(doc["risk"]) == 5
