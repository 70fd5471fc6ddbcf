#include <doctest.h>

#include <cmath>
#include <numeric>
#include <set>

#include "helpers.hpp"
#include "saplingcf/evaluation.hpp"
#include "saplingcf/io.hpp"
#include "saplingcf/splits.hpp"

using namespace saplingcf;

TEST_CASE("precision@k closed forms") {
  std::vector<NodeId> ranked(20);
  std::iota(ranked.begin(), ranked.end(), 0);
  std::vector<NodeId> two = {3, 7};
  CHECK(precision_at_k(ranked, two, 20) == doctest::Approx(0.1));
  std::vector<NodeId> none = {99};
  CHECK(precision_at_k(ranked, none, 20) == 0.0);
  std::vector<NodeId> all(ranked.begin(), ranked.end());
  CHECK(precision_at_k(ranked, all, 20) == 1.0);
  // the denominator stays k when fewer candidates exist
  std::vector<NodeId> short_ranked = {3};
  CHECK(precision_at_k(short_ranked, two, 20) == doctest::Approx(1.0 / 20.0));
}

TEST_CASE("recall@k closed forms") {
  std::vector<NodeId> ranked(20);
  std::iota(ranked.begin(), ranked.end(), 0);
  std::vector<NodeId> two = {0, 1};
  CHECK(recall_at_k(ranked, two, 20) == 1.0);
  std::vector<NodeId> four = {0, 77, 88, 99};
  CHECK(recall_at_k(ranked, four, 20) == doctest::Approx(0.25));
  std::vector<NodeId> thirty(30);
  std::iota(thirty.begin(), thirty.end(), 0);
  CHECK(recall_at_k(ranked, thirty, 20) == doctest::Approx(2.0 / 3.0));
  CHECK_THROWS_AS(recall_at_k(ranked, std::vector<NodeId>{}, 20), std::invalid_argument);
}

TEST_CASE("ndcg@k closed forms") {
  std::vector<NodeId> ranked = {5, 6, 7};
  CHECK(ndcg_at_k(ranked, std::vector<NodeId>{5}, 20) == 1.0);
  CHECK(ndcg_at_k(ranked, std::vector<NodeId>{6}, 20) ==
        doctest::Approx(1.0 / std::log2(3.0)).epsilon(1e-12));
  CHECK(ndcg_at_k(ranked, std::vector<NodeId>{9}, 20) == 0.0);
}

TEST_CASE("ndcg rank structure") {
  std::vector<NodeId> base = {0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
  std::vector<NodeId> relevant = {2, 30};
  double v = ndcg_at_k(base, relevant, 5);
  // permuting items below rank k changes nothing
  std::vector<NodeId> below = {0, 1, 2, 3, 4, 9, 8, 7, 6, 5};
  CHECK(ndcg_at_k(below, relevant, 5) == v);
  // moving the hit one rank down within k strictly decreases the value
  std::vector<NodeId> moved = {0, 1, 3, 2, 4, 5, 6, 7, 8, 9};
  CHECK(ndcg_at_k(moved, relevant, 5) < v);
}

TEST_CASE("precision.recall.hit identities") {
  std::mt19937_64 rng(123);
  std::vector<NodeId> ranked(50);
  std::iota(ranked.begin(), ranked.end(), 0);
  std::shuffle(ranked.begin(), ranked.end(), rng);
  for (int t = 0; t < 20; ++t) {
    std::set<NodeId> rel;
    while (rel.size() < 1 + rng() % 12) rel.insert(static_cast<NodeId>(rng() % 60));
    std::vector<NodeId> relevant(rel.begin(), rel.end());
    int k = 1 + static_cast<int>(rng() % 25);
    std::size_t hits = 0;
    for (int r = 0; r < k && r < static_cast<int>(ranked.size()); ++r)
      if (rel.count(ranked[r])) ++hits;
    CHECK(precision_at_k(ranked, relevant, k) * k == doctest::Approx(double(hits)));
    CHECK(recall_at_k(ranked, relevant, k) * double(relevant.size()) ==
          doctest::Approx(double(hits)));
  }
}

TEST_CASE("mae and rmse closed forms") {
  std::vector<double> a = {1, 2, 3};
  auto [mae0, rmse0] = mae_rmse(a, a);
  CHECK(mae0 == 0.0);
  CHECK(rmse0 == 0.0);
  std::vector<double> b = {2, 3, 4};
  auto [mae1, rmse1] = mae_rmse(b, a);
  CHECK(mae1 == doctest::Approx(1.0));
  CHECK(rmse1 == doctest::Approx(1.0));
  std::vector<double> p = {0, 2}, q = {0, 0};
  auto [mae2, rmse2] = mae_rmse(p, q);
  CHECK(mae2 == doctest::Approx(1.0));
  CHECK(rmse2 == doctest::Approx(std::sqrt(2.0)));
  std::vector<double> empty;
  CHECK_THROWS_AS(mae_rmse(empty, empty), std::invalid_argument);
}

TEST_CASE("tune_gamma picks the dominant side on a two-point grid") {
  // items layer carries all the signal: heldout items co-occur with train
  // items strongly; user-based has little to work with
  auto g = testutil::random_graph(40, 25, 0.3, 70);
  std::vector<double> grid = {0.0, 1.0};
  auto r = tune_gamma(g, Metric::sapling, grid, 11);
  CHECK((r.best_gamma == 0.0 || r.best_gamma == 1.0));
  REQUIRE(r.curve.gamma.size() == 2);
  CHECK(r.best_gamma == (r.curve.ndcg[1] > r.curve.ndcg[0] ? 1.0 : 0.0));
}

TEST_CASE("tune_gamma is deterministic and records the full curve") {
  auto g = testutil::random_graph(50, 40, 0.15, 71);
  auto grid = default_gamma_grid();
  auto a = tune_gamma(g, Metric::sapling, grid, 5);
  ScorerOptions opts;
  opts.workers = 3;
  auto b = tune_gamma(g, Metric::sapling, grid, 5, opts);
  CHECK(a.best_gamma == b.best_gamma);
  REQUIRE(a.curve.ndcg.size() == 11);
  for (std::size_t i = 0; i < 11; ++i) CHECK(a.curve.ndcg[i] == b.curve.ndcg[i]);
  CHECK(a.evaluated_users + a.skipped_users > 0);
  for (double v : a.curve.ndcg) {
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
  }
}

TEST_CASE("tune_gamma validates its grid") {
  auto g = testutil::random_graph(10, 10, 0.3, 72);
  CHECK_THROWS_AS(tune_gamma(g, Metric::sapling, std::vector<double>{}, 1),
                  std::invalid_argument);
  CHECK_THROWS_AS(tune_gamma(g, Metric::sapling, std::vector<double>{1.5}, 1),
                  std::invalid_argument);
}

namespace {

struct NaiveEval {
  double precision = 0, recall = 0, ndcg = 0;
  std::size_t evaluated = 0;
};

// end-to-end reference: dense transcription similarities, naive scoring,
// naive ranking with the same tie rule, set-based metrics
NaiveEval naive_benchmark(const BipartiteGraph& train, const BipartiteGraph& test, Metric m,
                          double gamma, int k) {
  auto bu = testutil::ref_similarity_dense(train, Layer::users, m);
  auto bi = testutil::ref_similarity_dense(train, Layer::items, m);
  auto su = testutil::ref_score_user(bu, train);
  auto si = testutil::ref_score_item(bi, train);
  NaiveEval out;
  for (NodeId u = 0; u < train.n_users(); ++u) {
    auto rel = test.neighbors(Layer::users, u);
    if (rel.empty()) continue;
    std::vector<std::pair<double, NodeId>> cands;
    for (NodeId a = 0; a < train.n_items(); ++a) {
      if (train.has_edge(u, a)) continue;
      cands.emplace_back((1.0 - gamma) * su[u][a] + gamma * si[u][a], a);
    }
    std::sort(cands.begin(), cands.end(), [](const auto& x, const auto& y) {
      if (x.first != y.first) return x.first > y.first;
      return x.second < y.second;
    });
    std::vector<NodeId> ranked;
    for (int r = 0; r < k && r < static_cast<int>(cands.size()); ++r)
      ranked.push_back(cands[r].second);
    out.precision += precision_at_k(ranked, rel, k);
    out.recall += recall_at_k(ranked, rel, k);
    out.ndcg += ndcg_at_k(ranked, rel, k);
    ++out.evaluated;
  }
  out.precision /= static_cast<double>(out.evaluated);
  out.recall /= static_cast<double>(out.evaluated);
  out.ndcg /= static_cast<double>(out.evaluated);
  return out;
}

}  // namespace

TEST_CASE("run_benchmark equals a naive reference evaluator on small instances") {
  for (std::uint64_t seed : {80u, 81u}) {
    auto full = testutil::random_graph(30, 24, 0.25, seed);
    auto split = holdout_validation_split(full, 0.2, seed + 1);
    BenchmarkConfig cfg;
    cfg.metric = Metric::sapling;
    cfg.mode = ScoreMode::hybrid;
    cfg.gamma = 0.4;
    cfg.k = 10;
    auto report = run_benchmark(split.train, split.heldout, cfg);
    auto naive = naive_benchmark(split.train, split.heldout, Metric::sapling, 0.4, 10);
    CHECK(report.evaluated_users == naive.evaluated);
    CHECK(report.precision == doctest::Approx(naive.precision).epsilon(1e-12));
    CHECK(report.recall == doctest::Approx(naive.recall).epsilon(1e-12));
    CHECK(report.ndcg == doctest::Approx(naive.ndcg).epsilon(1e-12));
  }
}

TEST_CASE("run_benchmark validates the gamma/tune contract") {
  auto g = testutil::random_graph(10, 10, 0.3, 90);
  BenchmarkConfig cfg;
  cfg.mode = ScoreMode::hybrid;
  CHECK_THROWS_AS(run_benchmark(g, g, cfg), std::invalid_argument);  // neither
  cfg.gamma = 0.5;
  cfg.tune_grid = default_gamma_grid();
  CHECK_THROWS_AS(run_benchmark(g, g, cfg), std::invalid_argument);  // both
  cfg.tune_grid.reset();
  cfg.gamma = 1.5;
  CHECK_THROWS_AS(run_benchmark(g, g, cfg), std::invalid_argument);
  BenchmarkConfig pure;
  pure.mode = ScoreMode::user_based;
  pure.gamma = 0.3;
  CHECK_THROWS_AS(run_benchmark(g, g, pure), std::invalid_argument);
}

TEST_CASE("aggregates are means over evaluated users") {
  auto full = testutil::random_graph(25, 20, 0.3, 91);
  auto split = holdout_validation_split(full, 0.2, 7);
  BenchmarkConfig cfg;
  cfg.mode = ScoreMode::user_based;
  cfg.k = 5;
  auto report = run_benchmark(split.train, split.heldout, cfg);
  REQUIRE(report.per_user_ndcg.size() == report.evaluated_users);
  double mean = std::accumulate(report.per_user_ndcg.begin(), report.per_user_ndcg.end(), 0.0) /
                static_cast<double>(report.evaluated_users);
  CHECK(report.ndcg == doctest::Approx(mean).epsilon(1e-14));
  // duplicating the user population leaves the mean unchanged
  std::vector<double> dup(report.per_user_ndcg);
  dup.insert(dup.end(), report.per_user_ndcg.begin(), report.per_user_ndcg.end());
  double dup_mean = std::accumulate(dup.begin(), dup.end(), 0.0) / static_cast<double>(dup.size());
  CHECK(dup_mean == doctest::Approx(report.ndcg).epsilon(1e-14));
}

TEST_CASE("reports serialize deterministically, timing aside") {
  testutil::TempDir tmp("report");
  auto full = testutil::random_graph(30, 25, 0.25, 92);
  auto split = holdout_validation_split(full, 0.15, 3);
  BenchmarkConfig cfg;
  cfg.dataset_id = "synthetic";
  cfg.mode = ScoreMode::hybrid;
  cfg.tune_grid = std::vector<double>{0.0, 0.5, 1.0};
  cfg.seed = 7;
  cfg.output_dir = tmp.file("a");
  cfg.write_rankings = true;
  auto r1 = run_benchmark(split.train, split.heldout, cfg);
  cfg.output_dir = tmp.file("b");
  cfg.scorer.workers = 4;
  auto r2 = run_benchmark(split.train, split.heldout, cfg);

  CHECK(r1.stem() == "synthetic_sapling_hybrid_" + [&] {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%g", r1.gamma);
    return std::string(buf);
  }());
  auto body1 = testutil::strip_timing(testutil::read_text(tmp.file("a") / (r1.stem() + ".report")));
  auto body2 = testutil::strip_timing(testutil::read_text(tmp.file("b") / (r2.stem() + ".report")));
  CHECK(body1 == body2);
  CHECK(body1.find("[gamma_curve]") != std::string::npos);
  CHECK(testutil::read_text(tmp.file("a") / (r1.stem() + "_users.csv")) ==
        testutil::read_text(tmp.file("b") / (r2.stem() + "_users.csv")));
  CHECK(testutil::read_text(tmp.file("a") / (r1.stem() + "_rankings.txt")) ==
        testutil::read_text(tmp.file("b") / (r2.stem() + "_rankings.txt")));
}
