#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "saplingcf/bipartite_graph.hpp"
#include "saplingcf/recommender.hpp"

namespace saplingcf {

/// |top-k intersect relevant| / k. The denominator stays k even when fewer
/// candidates exist. `relevant` must be sorted.
double precision_at_k(std::span<const NodeId> ranked, std::span<const NodeId> relevant, int k = 20);

/// |top-k intersect relevant| / |relevant|; relevant must be nonempty.
double recall_at_k(std::span<const NodeId> ranked, std::span<const NodeId> relevant, int k = 20);

/// Binary-relevance DCG over the top k, normalized by the ideal DCG over
/// min(k, |relevant|); relevant must be nonempty.
double ndcg_at_k(std::span<const NodeId> ranked, std::span<const NodeId> relevant, int k = 20);

std::pair<double, double> mae_rmse(std::span<const double> predicted,
                                   std::span<const double> actual);

struct GammaCurve {
  std::vector<double> gamma;
  std::vector<double> ndcg;
};

struct TuneResult {
  double best_gamma = 0.0;
  GammaCurve curve;
  std::size_t evaluated_users = 0;
  std::size_t skipped_users = 0;  // users left without train or validation edges
  std::uint64_t seed = 0;
};

inline std::vector<double> default_gamma_grid() {
  return {0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0};
}

/// Splits `train` with the seeded holdout, rebuilds both similarity sides
/// on the reduced train, and picks the grid gamma with the best hybrid
/// ndcg@k on the heldout edges (ties toward the smaller gamma). Test data
/// is not an input by construction.
TuneResult tune_gamma(const BipartiteGraph& train, Metric metric,
                      std::span<const double> grid, std::uint64_t seed,
                      const ScorerOptions& opts = {}, double fraction = 0.10, int k = 20);

struct BenchmarkConfig {
  std::string dataset_id = "dataset";
  std::filesystem::path train_path;
  std::filesystem::path test_path;
  Metric metric = Metric::sapling;
  ScoreMode mode = ScoreMode::hybrid;
  std::optional<double> gamma;                    // hybrid: exactly one of gamma/tune_grid
  std::optional<std::vector<double>> tune_grid;
  int k = 20;
  std::uint64_t seed = 42;
  double holdout_fraction = 0.10;
  ScorerOptions scorer;
  bool exclude_train = true;
  std::filesystem::path output_dir;  // empty: no artifacts written
  bool write_rankings = false;
};

struct EvalReport {
  // configuration echo
  std::string dataset_id;
  std::string metric;
  std::string mode;
  double gamma = 0.0;
  bool tuned = false;
  int k = 20;
  std::uint64_t seed = 0;
  int workers = 0;
  NodeId block_size = 0;
  std::optional<int> topk;
  bool include_self = true;
  bool exclude_train = true;
  // data shape
  NodeId n_users = 0;
  NodeId n_items = 0;
  EdgeCount train_edges = 0;
  EdgeCount test_edges = 0;
  // results
  std::size_t evaluated_users = 0;
  std::size_t skipped_users = 0;  // empty test rows
  double precision = 0.0;
  double recall = 0.0;
  double ndcg = 0.0;
  GammaCurve curve;  // filled when tuned
  std::vector<NodeId> per_user_ids;
  std::vector<int> per_user_test_count;
  std::vector<double> per_user_precision;
  std::vector<double> per_user_recall;
  std::vector<double> per_user_ndcg;
  // timing (excluded from determinism comparisons)
  double total_seconds = 0.0;

  std::string stem() const;  // <dataset>_<metric>_<mode>_<gamma>
};

/// Full pipeline on graphs already in memory.
EvalReport run_benchmark(const BipartiteGraph& train, const BipartiteGraph& test,
                         const BenchmarkConfig& config);
/// Loads config.train_path / config.test_path first.
EvalReport run_benchmark(const BenchmarkConfig& config);

/// Structured text document with stable key order; [timing] is the final
/// section so determinism checks can strip it.
std::string serialize_report(const EvalReport& report);
void write_report(const EvalReport& report, const std::filesystem::path& dir);
void write_per_user_csv(const EvalReport& report, const std::filesystem::path& path);

}  // namespace saplingcf
