#include <doctest.h>

#include <numeric>

#include "helpers.hpp"
#include "saplingcf/bipartite_graph.hpp"

using namespace saplingcf;

TEST_CASE("from_edges builds both orientations and dedups") {
  std::size_t dups = 0;
  auto g = BipartiteGraph::from_edges(2, 3, {{0, 1}, {0, 2}, {1, 0}, {0, 1}}, &dups);
  CHECK(dups == 1);
  CHECK(g.n_users() == 2);
  CHECK(g.n_items() == 3);
  CHECK(g.edge_count() == 3);
  CHECK(g.has_edge(0, 1));
  CHECK(g.has_edge(1, 0));
  CHECK_FALSE(g.has_edge(1, 1));
  auto row0 = g.neighbors(Layer::users, 0);
  CHECK(std::vector<NodeId>(row0.begin(), row0.end()) == std::vector<NodeId>{1, 2});
  auto item0 = g.neighbors(Layer::items, 0);
  CHECK(std::vector<NodeId>(item0.begin(), item0.end()) == std::vector<NodeId>{1});
}

TEST_CASE("from_edges rejects out-of-range endpoints") {
  CHECK_THROWS_AS(BipartiteGraph::from_edges(2, 2, {{0, 2}}), std::out_of_range);
  CHECK_THROWS_AS(BipartiteGraph::from_edges(2, 2, {{-1, 0}}), std::out_of_range);
}

TEST_CASE("transpose round-trip is bit-exact") {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    auto g = testutil::random_graph(40, 60, 0.08, seed);
    auto rebuilt = BipartiteGraph::from_edges(g.n_users(), g.n_items(), g.edges());
    CHECK(rebuilt.item_rows().offsets == g.item_rows().offsets);
    CHECK(rebuilt.item_rows().indices == g.item_rows().indices);
    CHECK(rebuilt.user_rows().offsets == g.user_rows().offsets);
    CHECK(rebuilt.user_rows().indices == g.user_rows().indices);
  }
}

TEST_CASE("degrees count rows and columns") {
  auto g = BipartiteGraph::from_edges(2, 2, {{0, 0}, {0, 1}, {1, 0}});
  auto du = degrees(g, Layer::users);
  auto di = degrees(g, Layer::items);
  CHECK(du.k == std::vector<NodeId>{2, 1});
  CHECK(di.k == std::vector<NodeId>{2, 1});
  CHECK(du.sum() == g.edge_count());
  CHECK(di.sum() == g.edge_count());
}

TEST_CASE("degree sums equal edge count on random graphs") {
  for (std::uint64_t seed : {7u, 8u}) {
    auto g = testutil::random_graph(50, 35, 0.1, seed);
    CHECK(degrees(g, Layer::users).sum() == g.edge_count());
    CHECK(degrees(g, Layer::items).sum() == g.edge_count());
  }
}

TEST_CASE("co_occurrence_row basics") {
  // users 0={a,b}, 1={b,c} share exactly one item
  auto g = BipartiteGraph::from_edges(2, 3, {{0, 0}, {0, 1}, {1, 1}, {1, 2}});
  auto row = co_occurrence_row(g, Layer::users, 0);
  REQUIRE(row.size() == 2);
  CHECK(row[0].j == 0);
  CHECK(row[0].count == 2);  // diagonal carries k_i
  CHECK(row[1].j == 1);
  CHECK(row[1].count == 1);

  // disjoint neighbor sets produce no entry
  auto g2 = BipartiteGraph::from_edges(2, 4, {{0, 0}, {0, 1}, {1, 2}, {1, 3}});
  auto row2 = co_occurrence_row(g2, Layer::users, 0);
  REQUIRE(row2.size() == 1);
  CHECK(row2[0].j == 0);

  CHECK_THROWS_AS(co_occurrence_row(g, Layer::users, 5), std::out_of_range);
}

TEST_CASE("co_occurrence_row matches brute-force set intersection") {
  auto g = testutil::random_graph(200, 200, 0.03, 99);
  for (Layer layer : {Layer::users, Layer::items}) {
    auto sets = testutil::neighbor_sets(g, layer);
    for (NodeId i = 0; i < g.n(layer); i += 17) {
      auto row = co_occurrence_row(g, layer, i);
      std::size_t at = 0;
      for (NodeId j = 0; j < g.n(layer); ++j) {
        auto expect = testutil::brute_co(sets[i], sets[j]);
        if (at < row.size() && row[at].j == j) {
          CHECK(row[at].count == expect);
          ++at;
        } else {
          CHECK(expect == 0);
        }
      }
      CHECK(at == row.size());
    }
  }
}

TEST_CASE("fig. 1 co-occurrence instance") {
  auto g = BipartiteGraph::from_edges(
      2, 100, {{0, 0}, {0, 1}, {0, 2}, {0, 3}, {0, 4}, {1, 3}, {1, 4}, {1, 5}, {1, 6}, {1, 7}});
  auto row = co_occurrence_row(g, Layer::users, 0);
  REQUIRE(row.size() == 2);
  CHECK(row[1].count == 2);
}

TEST_CASE("filter_min_degree cascades to a fixed point") {
  // star: one user holds 3 items, each item has degree 1
  auto star = BipartiteGraph::from_edges(1, 3, {{0, 0}, {0, 1}, {0, 2}});
  auto f = filter_min_degree(star, 2);
  CHECK(f.graph.n_users() == 0);
  CHECK(f.graph.n_items() == 0);
  CHECK(f.graph.edge_count() == 0);
}

TEST_CASE("filter_min_degree identity and stability") {
  auto g = testutil::random_graph(30, 30, 0.2, 5);
  auto id = filter_min_degree(g, 0);
  CHECK(id.graph.edge_count() == g.edge_count());
  CHECK(id.graph.n_users() == g.n_users());

  // 3x3 complete bipartite survives min_deg 3 unchanged
  std::vector<std::pair<NodeId, NodeId>> complete;
  for (NodeId u = 0; u < 3; ++u)
    for (NodeId it = 0; it < 3; ++it) complete.emplace_back(u, it);
  auto k33 = BipartiteGraph::from_edges(3, 3, complete);
  auto f = filter_min_degree(k33, 3);
  CHECK(f.graph.edge_count() == 9);
  CHECK(f.user_map == std::vector<NodeId>{0, 1, 2});
}

TEST_CASE("filter_min_degree output meets the threshold everywhere") {
  for (std::uint64_t seed : {11u, 12u, 13u}) {
    auto g = testutil::random_graph(60, 40, 0.05, seed);
    auto f = filter_min_degree(g, 3);
    for (NodeId u = 0; u < f.graph.n_users(); ++u) CHECK(f.graph.degree(Layer::users, u) >= 3);
    for (NodeId it = 0; it < f.graph.n_items(); ++it) CHECK(f.graph.degree(Layer::items, it) >= 3);
  }
}

TEST_CASE("filter_min_degree keeps the label mapping") {
  // complete 2x2 core plus a pendant pair that the filter drops
  auto g = BipartiteGraph::from_edges(3, 3, {{0, 0}, {0, 1}, {1, 0}, {1, 1}, {2, 2}});
  g.set_labels(Layer::users, {"a", "b", "c"});
  auto f = filter_min_degree(g, 2);
  REQUIRE(f.graph.n_users() == 2);
  CHECK(f.graph.n_items() == 2);
  CHECK(f.graph.labels(Layer::users) == std::vector<std::string>{"a", "b"});
  CHECK(f.user_map == std::vector<NodeId>{0, 1});
}
