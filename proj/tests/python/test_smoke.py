"""Smoke tests for the python module: import, build a graph, run the main
operations end to end on a small instance."""

import math

import pytest

saplingcf = pytest.importorskip("saplingcf")


@pytest.fixture
def graph():
    edges = [(0, 0), (0, 1), (0, 2), (1, 1), (1, 2), (1, 3), (2, 0), (2, 4), (3, 3), (3, 4)]
    return saplingcf.BipartiteGraph.from_edges(4, 5, edges)


def test_graph_basics(graph):
    assert graph.n_users == 4
    assert graph.n_items == 5
    assert graph.edge_count == 10
    assert graph.degrees("users") == [3, 3, 2, 2]
    assert sum(graph.degrees("items")) == graph.edge_count
    assert graph.neighbors("users", 0) == [0, 1, 2]
    assert graph.has_edge(0, 1)
    assert not graph.has_edge(0, 3)


def test_sapling_values():
    assert saplingcf.sapling_value(100, 5, 5, 2) == pytest.approx(0.13573407202216067, abs=1e-12)
    assert saplingcf.sapling_value(8, 5, 5, 2) == pytest.approx(-0.36, abs=1e-12)
    assert saplingcf.sapling_value(50, 7, 7, 7) == 1.0
    assert saplingcf.sapling_value(10, 4, 6, 0) == -1.0
    assert saplingcf.sapling_value(10, 4, 5, 2) == 0.0
    # closed form against the delta-gini route
    dgi = saplingcf.delta_gini(100, 5, 5, 2)
    assert saplingcf.sapling_value(100, 5, 5, 2) == pytest.approx(dgi, abs=1e-10)
    assert saplingcf.gini_impurity(0.05) == pytest.approx(0.095)


def test_metric_catalogue():
    names = saplingcf.metrics()
    assert "sapling" in names and "pearson" in names and "probs" in names
    assert len(names) == 12
    assert saplingcf.metric_value("jaccard", 100, 5, 5, 2) == pytest.approx(0.25)


def test_decision_sapling(graph):
    ds = saplingcf.decision_sapling(graph, "users", 0, 1)
    assert ds["n_total"] == 5
    assert ds["bean"] == (3, 2)
    assert ds["right_leaf"][0] == 2  # items 1 and 2 are shared
    assert "sapling_similarity" in ds


def test_similarity_rows(graph):
    rows = saplingcf.similarity_rows(graph, "users", "sapling")
    assert len(rows) == 4
    diag = dict(rows[0])[0]
    assert diag == 1.0
    top1 = saplingcf.similarity_rows(graph, "users", "sapling", topk=1)
    assert all(len(r) <= 2 for r in top1)  # one neighbor plus the diagonal


def test_scoring_and_ranking(graph):
    s = saplingcf.scores(graph, mode="hybrid", gamma=0.5)
    assert len(s) == 4 and len(s[0]) == 5
    assert all(abs(v) <= 1.0 + 1e-12 for row in s for v in row)
    su = saplingcf.scores(graph, mode="user", gamma=0.0)
    si = saplingcf.scores(graph, mode="item", gamma=0.0)
    for i in range(4):
        for a in range(5):
            assert s[i][a] == pytest.approx(0.5 * su[i][a] + 0.5 * si[i][a], abs=1e-14)
    ranked = saplingcf.top_n(graph, mode="hybrid", gamma=0.5, n=3)
    for u, items in enumerate(ranked):
        for it in items:
            assert not graph.has_edge(u, it)


def test_eval_metrics():
    assert saplingcf.precision_at_k(list(range(20)), [3, 7], 20) == pytest.approx(0.1)
    assert saplingcf.recall_at_k(list(range(20)), [3, 7], 20) == 1.0
    assert saplingcf.ndcg_at_k([5, 6], [6], 20) == pytest.approx(1.0 / math.log2(3.0))
    mae, rmse = saplingcf.mae_rmse([0.0, 2.0], [0.0, 0.0])
    assert (mae, rmse) == (pytest.approx(1.0), pytest.approx(math.sqrt(2.0)))


def test_split_and_pipeline(tmp_path):
    import random

    random.seed(5)
    edges = list({(random.randrange(30), random.randrange(25)) for _ in range(260)})
    g = saplingcf.BipartiteGraph.from_edges(30, 25, edges)
    train, heldout = saplingcf.holdout_validation_split(g, 0.2, seed=9)
    assert train.edge_count + heldout.edge_count == g.edge_count
    for u in range(30):
        k = len(g.neighbors("users", u))
        if k:
            assert len(heldout.neighbors("users", u)) == math.ceil(0.2 * k)

    result = saplingcf.evaluate(train, heldout, mode="hybrid", gamma=0.5, k=10)
    assert 0.0 <= result["recall"] <= 1.0
    assert result["evaluated_users"] > 0

    tuned = saplingcf.tune_gamma(train, seed=3)
    assert tuned["best_gamma"] in tuned["gamma"]
    assert len(tuned["ndcg"]) == 11

    # file round trip
    path = tmp_path / "g.txt"
    saplingcf.write_edge_list(g, path)
    back = saplingcf.load_edge_list(path)
    assert back.edge_count == g.edge_count
    assert back.edges() == g.edges()


def test_projection(graph):
    edges = saplingcf.project_network(graph, "users", k=2)
    assert all(src != dst for src, dst, _ in edges)
    by_src = {}
    for src, _, _ in edges:
        by_src[src] = by_src.get(src, 0) + 1
    assert all(v <= 2 for v in by_src.values())
