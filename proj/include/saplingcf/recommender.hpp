#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "saplingcf/bipartite_graph.hpp"
#include "saplingcf/io.hpp"
#include "saplingcf/similarity.hpp"
#include "saplingcf/similarity_matrix.hpp"

namespace saplingcf {

enum class ScoreMode { user_based, item_based, hybrid, preferential_attachment };
const char* mode_name(ScoreMode m);
ScoreMode parse_mode(const std::string& s);

/// Per-(user,item) recommendation confidence values, fully materialized.
/// Intended for small instances and tests; large runs go through
/// BlockedScorer.
struct ScoreMatrix {
  NodeId n_users = 0;
  NodeId n_items = 0;
  ScoreMode mode = ScoreMode::user_based;
  Metric metric = Metric::sapling;
  double gamma = 0.0;
  std::vector<std::vector<double>> rows;  // dense, one per user
};

ScoreMatrix score_user_based(const SimilarityMatrix& b_user, const BipartiteGraph& g,
                             bool include_self = true);
ScoreMatrix score_item_based(const SimilarityMatrix& b_item, const BipartiteGraph& g,
                             bool include_self = true);
/// (1-gamma) * user + gamma * item, elementwise.
ScoreMatrix score_hybrid(const ScoreMatrix& s_user, const ScoreMatrix& s_item, double gamma);
/// S_ia = k_i * k_a.
ScoreMatrix preferential_attachment_scores(const BipartiteGraph& g);

struct RankedList {
  NodeId user = 0;
  std::vector<NodeId> items;   // scores non-increasing, ties by smaller index
  std::vector<double> scores;
};

/// Highest-scoring items for one user, skipping `exclude` (sorted ids).
RankedList top_n_row(NodeId user, std::span<const double> scores,
                     std::span<const NodeId> exclude, int n);
std::vector<RankedList> top_n(const ScoreMatrix& s, const BipartiteGraph& train, int n = 20,
                              bool exclude_train = true);

struct ScorerOptions {
  int workers = 0;
  NodeId block_size = 1024;  // users per parallel batch; no observable effect
  std::optional<int> topk;   // top-k similarity filtering before scoring
  bool include_self = true;  // keep the l = i term of the score sums
};

/// Blocked evaluation of the score equations against an immutable train
/// graph. Similarity rows are never materialized beyond the co-occurring
/// support: zero-co-occurrence values of the signed metrics enter through
/// a rank-one background term, exactly.
class BlockedScorer {
 public:
  BlockedScorer(const BipartiteGraph& train, Metric metric, ScoreMode mode,
                const ScorerOptions& opts = {});

  NodeId n_users() const { return train_->n_users(); }
  NodeId n_items() const { return train_->n_items(); }
  ScoreMode mode() const { return mode_; }

  /// Calls fn(user, user_scores, item_scores) for every user, in parallel.
  /// Spans are empty when the mode does not produce that side (the
  /// preferential-attachment row arrives on the user side). Buffers are
  /// only valid during the call; fn runs concurrently for distinct users.
  using RowFn = std::function<void(NodeId, std::span<const double>, std::span<const double>)>;
  void for_each_user(const RowFn& fn) const;

  /// Convenience for tests and small data.
  ScoreMatrix materialize(double gamma = 0.0) const;

 private:
  void user_row(NodeId i, SimilarityEngine::RowScratch& scratch,
                std::vector<SimilarityEngine::Entry>& entries, std::span<double> out) const;
  void item_row(NodeId i, std::span<double> num) const;
  void build_user_side();
  void build_item_side();
  void build_topk_sides();

  const BipartiteGraph* train_;
  Metric metric_;
  ScoreMode mode_;
  ScorerOptions opts_;

  bool want_user_ = false;
  bool want_item_ = false;

  // untruncated user side
  std::optional<SimilarityEngine> user_engine_;
  std::vector<double> t_item_;  // T_a = sum_l a_l M_la

  // untruncated item side: consumption-oriented sparse rows
  // row lambda holds (beta, B_{beta,lambda} + a_beta * a_lambda) over the
  // co-occurring support of lambda
  std::optional<SimilarityEngine> item_engine_;
  std::vector<std::vector<SimEntry>> item_rows_;
  std::vector<double> item_denom_;     // D_a = sum_lambda |B_a,lambda|
  std::vector<double> item_diag_raw_;  // B_aa
  std::vector<double> item_a_;         // background factors a_a

  // top-k truncated path: plain sparse matrices
  std::optional<SimilarityMatrix> topk_user_;
  std::optional<SimilarityMatrix> topk_item_t_;  // transposed for column access
  std::vector<double> topk_item_denom_;
  std::vector<double> topk_item_diag_;
};

/// S9-style rating prediction. `mode` picks the similarity layer:
/// users -> average over the train raters of the target item, items ->
/// average over the movies the target user rated. Targets with no
/// neighbors or a zero denominator fall back to the global train mean.
std::vector<double> predict_ratings(const BipartiteGraph& binarized_train, Metric metric,
                                    const Ratings& train_ratings,
                                    std::span<const std::pair<NodeId, NodeId>> targets,
                                    Layer mode, int workers = 0);

}  // namespace saplingcf
