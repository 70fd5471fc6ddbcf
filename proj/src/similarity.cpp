#include "saplingcf/similarity.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace saplingcf {

namespace {

struct MetricInfo {
  const char* name;
  bool is_signed;
  bool symmetric;
  bool weighted;
};

constexpr MetricInfo kMetricInfo[] = {
    {"sapling", true, true, false},
    {"common_neighbors", false, true, false},
    {"jaccard", false, true, false},
    {"adamic_adar", false, true, true},
    {"resource_allocation", false, true, true},
    {"cosine", false, true, false},
    {"sorensen", false, true, false},
    {"hdi", false, true, false},
    {"hpi", false, true, false},
    {"taxonomy", false, true, true},
    {"probs", false, false, true},
    {"pearson", true, true, false},
};

const MetricInfo& info(Metric m) { return kMetricInfo[static_cast<std::size_t>(m)]; }

}  // namespace

const char* metric_name(Metric m) { return info(m).name; }

Metric parse_metric(const std::string& s) {
  for (std::size_t i = 0; i < std::size(kMetricInfo); ++i)
    if (s == kMetricInfo[i].name) return static_cast<Metric>(i);
  // common aliases
  if (s == "cn") return Metric::common_neighbors;
  if (s == "ja") return Metric::jaccard;
  if (s == "aa") return Metric::adamic_adar;
  if (s == "ra") return Metric::resource_allocation;
  if (s == "cs") return Metric::cosine;
  if (s == "so") return Metric::sorensen;
  if (s == "tn") return Metric::taxonomy;
  if (s == "pcc") return Metric::pearson;
  throw std::invalid_argument("unknown metric '" + s + "'");
}

std::vector<Metric> all_metrics() {
  std::vector<Metric> out;
  for (std::size_t i = 0; i < std::size(kMetricInfo); ++i) out.push_back(static_cast<Metric>(i));
  return out;
}

bool metric_is_signed(Metric m) { return info(m).is_signed; }
bool metric_is_symmetric(Metric m) { return info(m).symmetric; }
bool metric_uses_weighted_co(Metric m) { return info(m).weighted; }

double gini_impurity(double p1) {
  if (!(p1 >= 0.0 && p1 <= 1.0)) throw std::invalid_argument("p1 must lie in [0,1]");
  return 2.0 * p1 * (1.0 - p1);
}

bool DecisionSapling::singular() const {
  return bean_pos == 0 || bean_neg == 0 || right_total() == 0 || left_total() == 0;
}

DecisionSapling decision_sapling_from_counts(std::int64_t n_total, std::int64_t k_i,
                                             std::int64_t k_j, std::int64_t co) {
  if (n_total <= 0 || k_i < 0 || k_j < 0 || k_i > n_total || k_j > n_total)
    throw std::invalid_argument("degrees must lie in [0, N]");
  if (co < std::max<std::int64_t>(0, k_i + k_j - n_total) || co > std::min(k_i, k_j))
    throw std::invalid_argument("co-occurrence count incompatible with degrees");
  DecisionSapling ds;
  ds.n_total = n_total;
  ds.bean_pos = k_i;
  ds.bean_neg = n_total - k_i;
  ds.right_pos = co;
  ds.right_neg = k_j - co;
  ds.left_pos = k_i - co;
  ds.left_neg = n_total - k_j - k_i + co;
  return ds;
}

DecisionSapling decision_sapling(const BipartiteGraph& g, Layer layer, NodeId i, NodeId j) {
  NodeId n = g.n(layer);
  if (i < 0 || i >= n || j < 0 || j >= n) throw std::out_of_range("node index out of range");
  if (i == j) throw std::invalid_argument("decision sapling requires two distinct nodes");
  auto ri = g.neighbors(layer, i);
  auto rj = g.neighbors(layer, j);
  // sorted-merge intersection count
  std::int64_t co = 0;
  std::size_t a = 0, b = 0;
  while (a < ri.size() && b < rj.size()) {
    if (ri[a] < rj[b]) ++a;
    else if (ri[a] > rj[b]) ++b;
    else ++co, ++a, ++b;
  }
  return decision_sapling_from_counts(g.n(other_layer(layer)),
                                      static_cast<std::int64_t>(ri.size()),
                                      static_cast<std::int64_t>(rj.size()), co);
}

double delta_gini(const DecisionSapling& ds) {
  if (ds.singular())
    throw std::domain_error("delta_gini singular: k_i and k_j must lie strictly in (0, N)");
  double gi_bean = gini_impurity(ds.bean_frac());
  double gi_right = gini_impurity(ds.right_frac());
  double gi_left = gini_impurity(ds.left_frac());
  return (gi_bean - ds.f_left() * gi_left - ds.f_right() * gi_right) / gi_bean;
}

double sapling_value(std::int64_t n_total, std::int64_t k_i, std::int64_t k_j, std::int64_t co) {
  if (k_i <= 0 || k_i >= n_total || k_j <= 0 || k_j >= n_total) return 0.0;
  if (k_i > k_j) std::swap(k_i, k_j);  // f is symmetric; canonical order keeps that exact
  const std::int64_t lhs = co * n_total;
  const std::int64_t rhs = k_i * k_j;
  if (lhs == rhs) return 0.0;
  const double n = static_cast<double>(n_total);
  const double ki = static_cast<double>(k_i);
  const double kj = static_cast<double>(k_j);
  const double c = static_cast<double>(co);
  const double right = c * (1.0 - c / kj);
  const double left = (ki - c) * (1.0 - (ki - c) / (n - kj));
  const double f = (right + left) / (ki * (1.0 - ki / n));
  const double dgi = std::clamp(1.0 - f, 0.0, 1.0);
  return lhs > rhs ? dgi : -dgi;
}

namespace {

double pearson_value(std::int64_t n_total, std::int64_t k_i, std::int64_t k_j, std::int64_t co) {
  if (k_i <= 0 || k_i >= n_total || k_j <= 0 || k_j >= n_total) return 0.0;
  if (k_i > k_j) std::swap(k_i, k_j);
  const std::int64_t num = co * n_total - k_i * k_j;
  if (num == 0) return 0.0;
  const double den = std::sqrt(static_cast<double>(k_i) * static_cast<double>(n_total - k_i)) *
                     std::sqrt(static_cast<double>(k_j) * static_cast<double>(n_total - k_j));
  return std::clamp(static_cast<double>(num) / den, -1.0, 1.0);
}

}  // namespace

double metric_value(Metric m, std::int64_t n_total, std::int64_t k_i, std::int64_t k_j,
                    std::int64_t co, double w) {
  switch (m) {
    case Metric::sapling:
      return sapling_value(n_total, k_i, k_j, co);
    case Metric::pearson:
      return pearson_value(n_total, k_i, k_j, co);
    case Metric::common_neighbors:
      return static_cast<double>(co);
    case Metric::jaccard:
      return co == 0 ? 0.0 : static_cast<double>(co) / static_cast<double>(k_i + k_j - co);
    case Metric::adamic_adar:
      return w;
    case Metric::resource_allocation:
      return w;
    case Metric::cosine:
      return co == 0 ? 0.0
                     : static_cast<double>(co) /
                           std::sqrt(static_cast<double>(k_i) * static_cast<double>(k_j));
    case Metric::sorensen:
      return co == 0 ? 0.0 : static_cast<double>(co) / static_cast<double>(k_i + k_j);
    case Metric::hdi:
      return co == 0 ? 0.0 : static_cast<double>(co) / static_cast<double>(std::max(k_i, k_j));
    case Metric::hpi:
      return co == 0 ? 0.0 : static_cast<double>(co) / static_cast<double>(std::min(k_i, k_j));
    case Metric::taxonomy:
      return w == 0.0 ? 0.0 : w / static_cast<double>(std::max(k_i, k_j));
    case Metric::probs:
      return w == 0.0 ? 0.0 : w / static_cast<double>(k_j);
  }
  return 0.0;
}

double metric_background_factor(Metric m, std::int64_t n_total, std::int64_t k) {
  if (k <= 0 || k >= n_total) return 0.0;
  switch (m) {
    case Metric::sapling:
      return static_cast<double>(k) / static_cast<double>(n_total - k);
    case Metric::pearson:
      return std::sqrt(static_cast<double>(k) / static_cast<double>(n_total - k));
    default:
      return 0.0;
  }
}

SimilarityEngine::SimilarityEngine(const BipartiteGraph& g, Layer layer, Metric metric)
    : g_(&g),
      layer_(layer),
      metric_(metric),
      primary_(&g.rows(layer)),
      secondary_(&g.rows(other_layer(layer))),
      n_total_(g.n(other_layer(layer))) {
  const NodeId n = primary_->n();
  k_.resize(static_cast<std::size_t>(n));
  valid_.resize(static_cast<std::size_t>(n));
  a_.resize(static_cast<std::size_t>(n));
  // the k = N singularity only exists for the signed metrics; the
  // co-occurrence baselines stay finite there and keep such nodes
  const bool signed_metric = metric_is_signed(metric);
  for (NodeId i = 0; i < n; ++i) {
    NodeId deg = primary_->degree(i);
    k_[i] = deg;
    bool ok = deg > 0 && (!signed_metric || static_cast<std::int64_t>(deg) < n_total_);
    valid_[i] = ok ? 1 : 0;
    if (!ok) ++degenerate_count_;
    a_[i] = metric_background_factor(metric, n_total_, deg);
    a_sum_ += a_[i];
  }
  if (metric_uses_weighted_co(metric)) {
    lambda_w_.resize(static_cast<std::size_t>(secondary_->n()));
    for (NodeId mid = 0; mid < secondary_->n(); ++mid) {
      NodeId deg = secondary_->degree(mid);
      if (metric == Metric::adamic_adar) {
        // 1/log(1) diverges; degree-1 intermediates are skipped
        lambda_w_[mid] = deg >= 2 ? 1.0 / std::log(static_cast<double>(deg)) : 0.0;
      } else {
        lambda_w_[mid] = deg >= 1 ? 1.0 / static_cast<double>(deg) : 0.0;
      }
    }
  }
}

SimilarityEngine::RowScratch SimilarityEngine::make_scratch() const {
  RowScratch s;
  s.co.assign(static_cast<std::size_t>(n()), 0);
  if (metric_uses_weighted_co(metric_)) s.w.assign(static_cast<std::size_t>(n()), 0.0);
  s.touched.reserve(static_cast<std::size_t>(n()));
  return s;
}

SimilarityEngine::RowStats SimilarityEngine::touched_row(NodeId i, RowScratch& scratch,
                                                         std::vector<Entry>& out,
                                                         bool sorted) const {
  out.clear();
  scratch.touched.clear();
  RowStats stats;
  if (!valid(i)) return stats;

  const bool weighted = metric_uses_weighted_co(metric_);
  for (NodeId mid : primary_->row(i)) {
    const double lw = weighted ? lambda_w_[static_cast<std::size_t>(mid)] : 0.0;
    for (NodeId j : secondary_->row(mid)) {
      if (scratch.co[static_cast<std::size_t>(j)]++ == 0) scratch.touched.push_back(j);
      if (weighted) scratch.w[static_cast<std::size_t>(j)] += lw;
    }
  }
  if (sorted) std::sort(scratch.touched.begin(), scratch.touched.end());

  const std::int64_t ki = k_[static_cast<std::size_t>(i)];
  out.reserve(scratch.touched.size());
  for (NodeId j : scratch.touched) {
    const auto sj = static_cast<std::size_t>(j);
    const NodeId co = scratch.co[sj];
    const double w = weighted ? scratch.w[sj] : 0.0;
    scratch.co[sj] = 0;
    if (weighted) scratch.w[sj] = 0.0;
    if (!valid_[sj]) continue;
    const double v = metric_value(metric_, n_total_, ki, k_[sj], co, w);
    stats.abs_sum_touched += std::abs(v);
    stats.a_sum_touched += a_[sj];
    out.push_back({j, v});
  }
  return stats;
}

double SimilarityEngine::row_abs_sum(NodeId i, const RowStats& stats) const {
  const double ai = a_[static_cast<std::size_t>(i)];
  return stats.abs_sum_touched + ai * (a_sum_ - stats.a_sum_touched);
}

void SimilarityEngine::dense_row(NodeId i, RowScratch& scratch, std::span<double> out) const {
  const auto sn = static_cast<std::size_t>(n());
  if (out.size() != sn) throw std::invalid_argument("dense_row buffer size mismatch");
  const double ai = a_[static_cast<std::size_t>(i)];
  if (!valid(i)) {
    std::fill(out.begin(), out.end(), 0.0);
    return;
  }
  if (ai != 0.0) {
    for (std::size_t j = 0; j < sn; ++j) out[j] = -ai * a_[j];
  } else {
    std::fill(out.begin(), out.end(), 0.0);
  }
  std::vector<Entry> entries = std::move(scratch.entries);
  touched_row(i, scratch, entries, /*sorted=*/false);
  for (const Entry& e : entries) out[static_cast<std::size_t>(e.j)] = e.value;
  scratch.entries = std::move(entries);
}

double SimilarityEngine::pair_value(NodeId i, NodeId j) const {
  if (!valid(i) || !valid(j)) return 0.0;
  auto ri = primary_->row(i);
  auto rj = primary_->row(j);
  std::int64_t co = 0;
  double w = 0.0;
  const bool weighted = metric_uses_weighted_co(metric_);
  std::size_t a = 0, b = 0;
  while (a < ri.size() && b < rj.size()) {
    if (ri[a] < rj[b]) ++a;
    else if (ri[a] > rj[b]) ++b;
    else {
      ++co;
      if (weighted) w += lambda_w_[static_cast<std::size_t>(ri[a])];
      ++a, ++b;
    }
  }
  if (co == 0) return background_value(i, j);
  return metric_value(metric_, n_total_, k_[static_cast<std::size_t>(i)],
                      k_[static_cast<std::size_t>(j)], co, w);
}

}  // namespace saplingcf
