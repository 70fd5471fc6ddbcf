#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "saplingcf/bipartite_graph.hpp"

namespace saplingcf {

enum class Metric : std::uint8_t {
  sapling = 0,
  common_neighbors = 1,
  jaccard = 2,
  adamic_adar = 3,
  resource_allocation = 4,
  cosine = 5,
  sorensen = 6,
  hdi = 7,
  hpi = 8,
  taxonomy = 9,
  probs = 10,
  pearson = 11,
};

const char* metric_name(Metric m);
Metric parse_metric(const std::string& s);
std::vector<Metric> all_metrics();

/// Sapling and Pearson take signed values and are dense in principle
/// (a pair with zero co-occurrences still gets a negative value).
bool metric_is_signed(Metric m);
/// Every metric except ProbS satisfies B_ij = B_ji.
bool metric_is_symmetric(Metric m);
/// Adamic/Adar, Resource Allocation, Taxonomy and ProbS weigh each
/// co-occurrence by the degree of the node it happens on.
bool metric_uses_weighted_co(Metric m);

double gini_impurity(double p1);

/// The one-split decision tree behind one similarity value: the bean holds
/// node i's links over all N candidates, the right leaf restricts to the
/// candidates linked to j, the left leaf to those not linked to j.
struct DecisionSapling {
  std::int64_t n_total = 0;   // N
  std::int64_t bean_pos = 0;  // k_i
  std::int64_t bean_neg = 0;  // N - k_i
  std::int64_t right_pos = 0; // CO_ij
  std::int64_t right_neg = 0; // k_j - CO_ij
  std::int64_t left_pos = 0;  // k_i - CO_ij
  std::int64_t left_neg = 0;  // N - k_j - k_i + CO_ij

  double bean_frac() const { return static_cast<double>(bean_pos) / static_cast<double>(n_total); }
  std::int64_t right_total() const { return right_pos + right_neg; }
  std::int64_t left_total() const { return left_pos + left_neg; }
  double right_frac() const { return static_cast<double>(right_pos) / static_cast<double>(right_total()); }
  double left_frac() const { return static_cast<double>(left_pos) / static_cast<double>(left_total()); }
  double f_right() const { return static_cast<double>(right_total()) / static_cast<double>(n_total); }
  double f_left() const { return static_cast<double>(left_total()) / static_cast<double>(n_total); }
  bool singular() const;
};

DecisionSapling decision_sapling_from_counts(std::int64_t n_total, std::int64_t k_i,
                                             std::int64_t k_j, std::int64_t co);
DecisionSapling decision_sapling(const BipartiteGraph& g, Layer layer, NodeId i, NodeId j);

/// Relative Gini-impurity reduction of the split, evaluated from the three
/// box impurities. This route is kept deliberately separate from the
/// closed form in sapling_value so each can check the other.
/// Throws on singular saplings (k_i or k_j in {0, N}).
double delta_gini(const DecisionSapling& ds);

/// Closed-form signed Sapling Similarity. Returns 0 for singular degree
/// combinations instead of failing.
double sapling_value(std::int64_t n_total, std::int64_t k_i, std::int64_t k_j, std::int64_t co);

/// Value of `m` for a pair with degrees (k_i, k_j), co-occurrences `co` and
/// weighted co-occurrences `w` (ignored unless the metric uses them), on a
/// layer whose nodes see n_total candidates. (k_i, k_j) are oriented:
/// k_i belongs to the row node. Degenerate endpoints yield 0.
double metric_value(Metric m, std::int64_t n_total, std::int64_t k_i, std::int64_t k_j,
                    std::int64_t co, double w);

/// Factor a_i of the rank-one background B_ij = -a_i * a_j that signed
/// metrics take on zero-co-occurrence pairs; 0 for the co-occurrence
/// baselines and for degenerate nodes.
double metric_background_factor(Metric m, std::int64_t n_total, std::int64_t k);

/// Streams similarity rows of one layer without ever holding the full
/// matrix: callers pull the co-occurrence scatter plus per-pair values
/// through scratch buffers. Immutable and shareable across workers; each
/// worker owns a RowScratch.
class SimilarityEngine {
 public:
  SimilarityEngine(const BipartiteGraph& g, Layer layer, Metric metric);

  NodeId n() const { return primary_->n(); }
  std::int64_t candidate_count() const { return n_total_; }
  Layer layer() const { return layer_; }
  Metric metric() const { return metric_; }
  const BipartiteGraph& graph() const { return *g_; }

  bool valid(NodeId i) const { return valid_[static_cast<std::size_t>(i)] != 0; }
  NodeId degree_of(NodeId i) const { return k_[static_cast<std::size_t>(i)]; }
  double background_factor(NodeId i) const { return a_[static_cast<std::size_t>(i)]; }
  double background_factor_sum() const { return a_sum_; }
  /// Exact similarity of a zero-co-occurrence pair.
  double background_value(NodeId i, NodeId j) const {
    return -a_[static_cast<std::size_t>(i)] * a_[static_cast<std::size_t>(j)];
  }
  std::size_t degenerate_count() const { return degenerate_count_; }

  struct Entry {
    NodeId j;
    double value;
  };

  struct RowScratch {
    std::vector<NodeId> co;
    std::vector<double> w;
    std::vector<NodeId> touched;
    std::vector<Entry> entries;  // used by dense_row
  };
  RowScratch make_scratch() const;

  struct RowStats {
    double abs_sum_touched = 0;  // sum of |B_ij| over co-occurring j
    double a_sum_touched = 0;    // sum of a_j over co-occurring j
  };

  /// Fills `out` with the co-occurring part of row i (actual similarity
  /// values, diagonal included). Entries follow scatter order unless
  /// `sorted`; a degenerate i produces no entries.
  RowStats touched_row(NodeId i, RowScratch& scratch, std::vector<Entry>& out,
                       bool sorted = false) const;

  /// Full denominator sum_j |B_ij| including the background part.
  double row_abs_sum(NodeId i, const RowStats& stats) const;

  /// Materializes the complete row (length n) including background values.
  void dense_row(NodeId i, RowScratch& scratch, std::span<double> out) const;

  /// Similarity of one pair, computed from scratch in O(k_i + k_j).
  double pair_value(NodeId i, NodeId j) const;

 private:
  const BipartiteGraph* g_;
  Layer layer_;
  Metric metric_;
  const CsrRows* primary_;    // rows of the similarity layer
  const CsrRows* secondary_;  // rows of the opposite layer
  std::int64_t n_total_;      // N of the formulas: size of the opposite layer
  std::vector<NodeId> k_;
  std::vector<std::uint8_t> valid_;
  std::vector<double> a_;
  std::vector<double> lambda_w_;  // per opposite-layer node weight (1/k or 1/ln k)
  double a_sum_ = 0;
  std::size_t degenerate_count_ = 0;
};

}  // namespace saplingcf
