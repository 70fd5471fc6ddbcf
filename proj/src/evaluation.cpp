#include "saplingcf/evaluation.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "saplingcf/io.hpp"
#include "saplingcf/splits.hpp"

namespace saplingcf {

namespace {

std::size_t hits_at_k(std::span<const NodeId> ranked, std::span<const NodeId> relevant, int k) {
  std::size_t hits = 0;
  std::size_t top = std::min(ranked.size(), static_cast<std::size_t>(k));
  for (std::size_t r = 0; r < top; ++r)
    if (std::binary_search(relevant.begin(), relevant.end(), ranked[r])) ++hits;
  return hits;
}

double log2_discount(std::size_t rank1) {  // rank starting at 1
  return 1.0 / std::log2(static_cast<double>(rank1) + 1.0);
}

}  // namespace

double precision_at_k(std::span<const NodeId> ranked, std::span<const NodeId> relevant, int k) {
  if (k < 1) throw std::invalid_argument("k must be >= 1");
  return static_cast<double>(hits_at_k(ranked, relevant, k)) / static_cast<double>(k);
}

double recall_at_k(std::span<const NodeId> ranked, std::span<const NodeId> relevant, int k) {
  if (k < 1) throw std::invalid_argument("k must be >= 1");
  if (relevant.empty()) throw std::invalid_argument("recall undefined for an empty relevant set");
  return static_cast<double>(hits_at_k(ranked, relevant, k)) /
         static_cast<double>(relevant.size());
}

double ndcg_at_k(std::span<const NodeId> ranked, std::span<const NodeId> relevant, int k) {
  if (k < 1) throw std::invalid_argument("k must be >= 1");
  if (relevant.empty()) throw std::invalid_argument("ndcg undefined for an empty relevant set");
  double dcg = 0.0;
  std::size_t top = std::min(ranked.size(), static_cast<std::size_t>(k));
  for (std::size_t r = 0; r < top; ++r)
    if (std::binary_search(relevant.begin(), relevant.end(), ranked[r]))
      dcg += log2_discount(r + 1);
  double idcg = 0.0;
  std::size_t ideal = std::min(static_cast<std::size_t>(k), relevant.size());
  for (std::size_t r = 0; r < ideal; ++r) idcg += log2_discount(r + 1);
  return dcg / idcg;
}

std::pair<double, double> mae_rmse(std::span<const double> predicted,
                                   std::span<const double> actual) {
  if (predicted.size() != actual.size()) throw std::invalid_argument("length mismatch");
  if (predicted.empty()) throw std::invalid_argument("mae/rmse undefined on empty input");
  double abs_sum = 0.0, sq_sum = 0.0;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    double d = predicted[i] - actual[i];
    abs_sum += std::abs(d);
    sq_sum += d * d;
  }
  auto n = static_cast<double>(predicted.size());
  return {abs_sum / n, std::sqrt(sq_sum / n)};
}

TuneResult tune_gamma(const BipartiteGraph& train, Metric metric, std::span<const double> grid,
                      std::uint64_t seed, const ScorerOptions& opts, double fraction, int k) {
  if (grid.empty()) throw std::invalid_argument("gamma grid must be nonempty");
  for (double g : grid)
    if (!(g >= 0.0 && g <= 1.0)) throw std::invalid_argument("gamma grid values must lie in [0,1]");

  SplitPair split = holdout_validation_split(train, fraction, seed);
  BlockedScorer scorer(split.train, metric, ScoreMode::hybrid, opts);

  const auto n_users = static_cast<std::size_t>(train.n_users());
  const std::size_t n_gamma = grid.size();
  // per-user ndcg per gamma; -1 marks a user outside the validation average
  std::vector<double> ndcg_table(n_users * n_gamma, -1.0);

  scorer.for_each_user([&](NodeId u, std::span<const double> su, std::span<const double> si) {
    auto heldout = split.heldout.neighbors(Layer::users, u);
    if (heldout.empty()) return;
    if (split.train.degree(Layer::users, u) == 0) return;  // nothing left to score from
    thread_local std::vector<double> combo;
    combo.resize(su.size());
    auto exclude = split.train.neighbors(Layer::users, u);
    for (std::size_t gi = 0; gi < n_gamma; ++gi) {
      const double g = grid[gi];
      for (std::size_t a = 0; a < combo.size(); ++a)
        combo[a] = (1.0 - g) * su[a] + g * si[a];
      RankedList top = top_n_row(u, combo, exclude, k);
      ndcg_table[static_cast<std::size_t>(u) * n_gamma + gi] = ndcg_at_k(top.items, heldout, k);
    }
  });

  TuneResult result;
  result.seed = seed;
  result.curve.gamma.assign(grid.begin(), grid.end());
  result.curve.ndcg.assign(n_gamma, 0.0);
  std::size_t evaluated = 0;
  for (std::size_t u = 0; u < n_users; ++u) {
    if (ndcg_table[u * n_gamma] < 0.0) continue;
    ++evaluated;
    for (std::size_t gi = 0; gi < n_gamma; ++gi)
      result.curve.ndcg[gi] += ndcg_table[u * n_gamma + gi];
  }
  result.evaluated_users = evaluated;
  std::size_t with_any_heldout = 0;
  for (NodeId u = 0; u < train.n_users(); ++u)
    if (train.degree(Layer::users, u) > 0) ++with_any_heldout;
  result.skipped_users = with_any_heldout - evaluated;
  if (evaluated == 0) throw std::runtime_error("validation split left no evaluable users");
  for (double& v : result.curve.ndcg) v /= static_cast<double>(evaluated);

  // argmax, ties toward the smaller gamma
  std::size_t best = 0;
  for (std::size_t gi = 1; gi < n_gamma; ++gi) {
    bool better = result.curve.ndcg[gi] > result.curve.ndcg[best];
    bool tie_smaller = result.curve.ndcg[gi] == result.curve.ndcg[best] &&
                       result.curve.gamma[gi] < result.curve.gamma[best];
    if (better || tie_smaller) best = gi;
  }
  result.best_gamma = result.curve.gamma[best];
  return result;
}

namespace {

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string format_gamma(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", v);
  return buf;
}

}  // namespace

std::string EvalReport::stem() const {
  std::string g;
  if (mode == "hybrid") g = format_gamma(gamma);
  else if (mode == "user") g = "0";
  else if (mode == "item") g = "1";
  else g = "na";
  return dataset_id + "_" + metric + "_" + mode + "_" + g;
}

EvalReport run_benchmark(const BipartiteGraph& train, const BipartiteGraph& test,
                         const BenchmarkConfig& config) {
  if (train.n_users() != test.n_users() || train.n_items() != test.n_items())
    throw std::invalid_argument("train and test graphs have different shapes");
  if (config.k < 1) throw std::invalid_argument("k must be >= 1");
  const bool hybrid = config.mode == ScoreMode::hybrid;
  if (hybrid && config.gamma.has_value() == config.tune_grid.has_value())
    throw std::invalid_argument("hybrid mode needs exactly one of gamma / tune_grid");
  if (!hybrid && (config.gamma || config.tune_grid))
    throw std::invalid_argument("gamma / tune_grid only apply to hybrid mode");
  if (config.gamma && !(*config.gamma >= 0.0 && *config.gamma <= 1.0))
    throw std::invalid_argument("gamma must lie in [0,1]");

  auto t0 = std::chrono::steady_clock::now();

  EvalReport report;
  report.dataset_id = config.dataset_id;
  report.metric = metric_name(config.metric);
  report.mode = mode_name(config.mode);
  report.k = config.k;
  report.seed = config.seed;
  report.workers = config.scorer.workers;
  report.block_size = config.scorer.block_size;
  report.topk = config.scorer.topk;
  report.include_self = config.scorer.include_self;
  report.exclude_train = config.exclude_train;
  report.n_users = train.n_users();
  report.n_items = train.n_items();
  report.train_edges = train.edge_count();
  report.test_edges = test.edge_count();

  double gamma = 0.0;
  if (hybrid) {
    if (config.tune_grid) {
      TuneResult tuned = tune_gamma(train, config.metric, *config.tune_grid, config.seed,
                                    config.scorer, config.holdout_fraction, config.k);
      gamma = tuned.best_gamma;
      report.tuned = true;
      report.curve = std::move(tuned.curve);
    } else {
      gamma = *config.gamma;
    }
  } else if (config.mode == ScoreMode::item_based) {
    gamma = 1.0;
  }
  report.gamma = gamma;

  const auto n_users = static_cast<std::size_t>(train.n_users());
  std::vector<double> prec(n_users, -1.0), rec(n_users, -1.0), ndcg(n_users, -1.0);
  std::vector<int> test_count(n_users, 0);
  std::vector<RankedList> rankings;
  if (config.write_rankings) rankings.resize(n_users);

  BlockedScorer scorer(train, config.metric, config.mode, config.scorer);
  std::span<const NodeId> no_exclude;
  scorer.for_each_user([&](NodeId u, std::span<const double> su, std::span<const double> si) {
    thread_local std::vector<double> combo;
    std::span<const double> scores;
    if (config.mode == ScoreMode::hybrid) {
      combo.resize(su.size());
      for (std::size_t a = 0; a < combo.size(); ++a)
        combo[a] = (1.0 - gamma) * su[a] + gamma * si[a];
      scores = combo;
    } else if (config.mode == ScoreMode::item_based) {
      scores = si;
    } else {
      scores = su;
    }
    RankedList top = top_n_row(
        u, scores, config.exclude_train ? train.neighbors(Layer::users, u) : no_exclude,
        config.k);
    auto relevant = test.neighbors(Layer::users, u);
    const auto uu = static_cast<std::size_t>(u);
    if (!relevant.empty()) {
      prec[uu] = precision_at_k(top.items, relevant, config.k);
      rec[uu] = recall_at_k(top.items, relevant, config.k);
      ndcg[uu] = ndcg_at_k(top.items, relevant, config.k);
      test_count[uu] = static_cast<int>(relevant.size());
    }
    if (config.write_rankings) rankings[uu] = std::move(top);
  });

  for (std::size_t u = 0; u < n_users; ++u) {
    if (prec[u] < 0.0) {
      ++report.skipped_users;
      continue;
    }
    ++report.evaluated_users;
    report.per_user_ids.push_back(static_cast<NodeId>(u));
    report.per_user_test_count.push_back(test_count[u]);
    report.per_user_precision.push_back(prec[u]);
    report.per_user_recall.push_back(rec[u]);
    report.per_user_ndcg.push_back(ndcg[u]);
    report.precision += prec[u];
    report.recall += rec[u];
    report.ndcg += ndcg[u];
  }
  if (report.evaluated_users > 0) {
    report.precision /= static_cast<double>(report.evaluated_users);
    report.recall /= static_cast<double>(report.evaluated_users);
    report.ndcg /= static_cast<double>(report.evaluated_users);
  }

  report.total_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  if (!config.output_dir.empty()) {
    std::filesystem::create_directories(config.output_dir);
    write_report(report, config.output_dir);
    write_per_user_csv(report, config.output_dir / (report.stem() + "_users.csv"));
    if (config.write_rankings) {
      std::ofstream out(config.output_dir / (report.stem() + "_rankings.txt"));
      if (!out) throw std::runtime_error("cannot write rankings file");
      out.precision(17);
      for (const auto& r : rankings) {
        out << r.user << ':';
        for (NodeId it : r.items) out << ' ' << it;
        out << '\n';
      }
    }
  }
  return report;
}

EvalReport run_benchmark(const BenchmarkConfig& config) {
  if (!std::filesystem::exists(config.train_path))
    throw std::runtime_error("train file not found: " + config.train_path.string());
  if (!std::filesystem::exists(config.test_path))
    throw std::runtime_error("test file not found: " + config.test_path.string());
  BipartiteGraph train = load_edge_list(config.train_path);
  BipartiteGraph test_raw = load_edge_list(config.test_path);
  // align layer sizes: the public split files only declare what they touch
  NodeId n_users = std::max(train.n_users(), test_raw.n_users());
  NodeId n_items = std::max(train.n_items(), test_raw.n_items());
  if (train.n_users() != n_users || train.n_items() != n_items)
    train = BipartiteGraph::from_edges(n_users, n_items, train.edges());
  BipartiteGraph test = BipartiteGraph::from_edges(n_users, n_items, test_raw.edges());
  return run_benchmark(train, test, config);
}

std::string serialize_report(const EvalReport& r) {
  std::ostringstream out;
  out << "saplingcf report v1\n";
  out << "[config]\n";
  out << "dataset = " << r.dataset_id << "\n";
  out << "metric = " << r.metric << "\n";
  out << "mode = " << r.mode << "\n";
  out << "gamma = " << format_gamma(r.gamma) << "\n";
  out << "gamma_source = " << (r.tuned ? "tuned" : "fixed") << "\n";
  out << "k = " << r.k << "\n";
  out << "seed = " << r.seed << "\n";
  out << "topk = " << (r.topk ? std::to_string(*r.topk) : "none") << "\n";
  out << "include_self = " << (r.include_self ? "true" : "false") << "\n";
  out << "exclude_train_items = " << (r.exclude_train ? "true" : "false") << "\n";
  out << "[data]\n";
  out << "users = " << r.n_users << "\n";
  out << "items = " << r.n_items << "\n";
  out << "train_edges = " << r.train_edges << "\n";
  out << "test_edges = " << r.test_edges << "\n";
  out << "[results]\n";
  out << "evaluated_users = " << r.evaluated_users << "\n";
  out << "skipped_users = " << r.skipped_users << "\n";
  out << "precision@" << r.k << " = " << format_double(r.precision) << "\n";
  out << "recall@" << r.k << " = " << format_double(r.recall) << "\n";
  out << "ndcg@" << r.k << " = " << format_double(r.ndcg) << "\n";
  if (r.tuned) {
    out << "[gamma_curve]\n";
    for (std::size_t i = 0; i < r.curve.gamma.size(); ++i)
      out << format_gamma(r.curve.gamma[i]) << " = " << format_double(r.curve.ndcg[i]) << "\n";
  }
  // execution details; results are independent of them by construction, so
  // determinism comparisons strip this section
  out << "[timing]\n";
  out << "workers = " << r.workers << "\n";
  out << "block_size = " << r.block_size << "\n";
  out << "total_seconds = " << format_double(r.total_seconds) << "\n";
  return std::move(out).str();
}

void write_report(const EvalReport& report, const std::filesystem::path& dir) {
  std::filesystem::path path = dir / (report.stem() + ".report");
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << serialize_report(report);
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

void write_per_user_csv(const EvalReport& r, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "user,n_test,precision,recall,ndcg\n";
  for (std::size_t i = 0; i < r.per_user_ids.size(); ++i)
    out << r.per_user_ids[i] << ',' << r.per_user_test_count[i] << ','
        << format_double(r.per_user_precision[i]) << ',' << format_double(r.per_user_recall[i])
        << ',' << format_double(r.per_user_ndcg[i]) << '\n';
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

}  // namespace saplingcf
