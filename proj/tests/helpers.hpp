#pragma once

// Test-side reference implementations, kept independent of the engine code
// paths they check: set-based co-occurrence counting, direct formula
// transcriptions for every metric, naive triple-loop scoring, and a naive
// evaluator. Plus small utilities for random graphs and temp files.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "saplingcf/bipartite_graph.hpp"
#include "saplingcf/similarity.hpp"

namespace testutil {

using saplingcf::BipartiteGraph;
using saplingcf::Layer;
using saplingcf::Metric;
using saplingcf::NodeId;

inline BipartiteGraph random_graph(NodeId n_users, NodeId n_items, double density,
                                   std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  std::vector<std::pair<NodeId, NodeId>> edges;
  for (NodeId u = 0; u < n_users; ++u)
    for (NodeId it = 0; it < n_items; ++it)
      if (coin(rng) < density) edges.emplace_back(u, it);
  return BipartiteGraph::from_edges(n_users, n_items, std::move(edges));
}

inline std::vector<std::set<NodeId>> neighbor_sets(const BipartiteGraph& g, Layer layer) {
  std::vector<std::set<NodeId>> sets(static_cast<std::size_t>(g.n(layer)));
  for (NodeId i = 0; i < g.n(layer); ++i) {
    auto row = g.neighbors(layer, i);
    sets[static_cast<std::size_t>(i)] = {row.begin(), row.end()};
  }
  return sets;
}

inline std::int64_t brute_co(const std::set<NodeId>& a, const std::set<NodeId>& b) {
  std::int64_t co = 0;
  for (NodeId x : a)
    if (b.count(x)) ++co;
  return co;
}

// Signed sapling reference via the three box impurities (no closed form).
inline double ref_sapling(std::int64_t n, std::int64_t ki, std::int64_t kj, std::int64_t co) {
  if (ki <= 0 || ki >= n || kj <= 0 || kj >= n) return 0.0;
  auto gini = [](double p1) { return 2.0 * p1 * (1.0 - p1); };
  double gi_bean = gini(static_cast<double>(ki) / static_cast<double>(n));
  double gi_right = gini(static_cast<double>(co) / static_cast<double>(kj));
  double gi_left = gini(static_cast<double>(ki - co) / static_cast<double>(n - kj));
  double f_r = static_cast<double>(kj) / static_cast<double>(n);
  double f_l = static_cast<double>(n - kj) / static_cast<double>(n);
  double dgi = (gi_bean - f_l * gi_left - f_r * gi_right) / gi_bean;
  double sign = static_cast<double>(co) / static_cast<double>(kj) >=
                        static_cast<double>(ki) / static_cast<double>(n)
                    ? 1.0
                    : -1.0;
  return sign * dgi;
}

// Direct transcription of the metric formulas over neighbor sets.
inline double ref_metric(Metric m, const BipartiteGraph& g, Layer layer, NodeId i, NodeId j) {
  const Layer ol = saplingcf::other_layer(layer);
  const std::int64_t n = g.n(ol);
  auto ri = g.neighbors(layer, i);
  auto rj = g.neighbors(layer, j);
  std::set<NodeId> si(ri.begin(), ri.end()), sj(rj.begin(), rj.end());
  const std::int64_t ki = static_cast<std::int64_t>(si.size());
  const std::int64_t kj = static_cast<std::int64_t>(sj.size());
  if (ki == 0 || kj == 0) return 0.0;
  // only the signed metrics are singular at k = N; baselines keep such nodes
  if ((m == Metric::sapling || m == Metric::pearson) && (ki >= n || kj >= n)) return 0.0;
  std::int64_t co = 0;
  double ra = 0.0, aa = 0.0;
  for (NodeId x : si) {
    if (!sj.count(x)) continue;
    ++co;
    auto deg = static_cast<std::int64_t>(g.degree(ol, x));
    ra += 1.0 / static_cast<double>(deg);
    if (deg >= 2) aa += 1.0 / std::log(static_cast<double>(deg));
  }
  const double dco = static_cast<double>(co);
  const double dki = static_cast<double>(ki), dkj = static_cast<double>(kj);
  switch (m) {
    case Metric::sapling:
      return ref_sapling(n, ki, kj, co);
    case Metric::common_neighbors:
      return dco;
    case Metric::jaccard:
      return co ? dco / (dki + dkj - dco) : 0.0;
    case Metric::adamic_adar:
      return aa;
    case Metric::resource_allocation:
      return ra;
    case Metric::cosine:
      return co ? dco / std::sqrt(dki * dkj) : 0.0;
    case Metric::sorensen:
      return co ? dco / (dki + dkj) : 0.0;
    case Metric::hdi:
      return co ? dco / std::max(dki, dkj) : 0.0;
    case Metric::hpi:
      return co ? dco / std::min(dki, dkj) : 0.0;
    case Metric::taxonomy:
      return ra != 0.0 ? ra / std::max(dki, dkj) : 0.0;
    case Metric::probs:
      return ra != 0.0 ? ra / dkj : 0.0;
    case Metric::pearson: {
      double num = dco - dki * dkj / static_cast<double>(n);
      double den = std::sqrt(dki * (1.0 - dki / static_cast<double>(n))) *
                   std::sqrt(dkj * (1.0 - dkj / static_cast<double>(n)));
      return num / den;
    }
  }
  return 0.0;
}

inline std::vector<std::vector<double>> ref_similarity_dense(const BipartiteGraph& g, Layer layer,
                                                             Metric m, bool include_diag = true) {
  const NodeId n = g.n(layer);
  std::vector<std::vector<double>> b(static_cast<std::size_t>(n),
                                     std::vector<double>(static_cast<std::size_t>(n), 0.0));
  for (NodeId i = 0; i < n; ++i)
    for (NodeId j = 0; j < n; ++j) {
      if (i == j && !include_diag) continue;
      b[i][j] = ref_metric(m, g, layer, i, j);
    }
  return b;
}

// Eq. 11 by the book: S_ia = sum_l B_il M_la / sum_l |B_il|.
inline std::vector<std::vector<double>> ref_score_user(const std::vector<std::vector<double>>& b,
                                                       const BipartiteGraph& g) {
  const NodeId nu = g.n_users(), ni = g.n_items();
  std::vector<std::vector<double>> s(static_cast<std::size_t>(nu),
                                     std::vector<double>(static_cast<std::size_t>(ni), 0.0));
  for (NodeId i = 0; i < nu; ++i) {
    double den = 0.0;
    for (NodeId l = 0; l < nu; ++l) den += std::abs(b[i][l]);
    if (den == 0.0) continue;
    for (NodeId a = 0; a < ni; ++a) {
      double num = 0.0;
      for (NodeId l = 0; l < nu; ++l)
        if (g.has_edge(l, a)) num += b[i][l];
      s[i][a] = num / den;
    }
  }
  return s;
}

// Eq. 12 by the book: S_ia = sum_l B_al M_il / sum_l |B_al|.
inline std::vector<std::vector<double>> ref_score_item(const std::vector<std::vector<double>>& b,
                                                       const BipartiteGraph& g) {
  const NodeId nu = g.n_users(), ni = g.n_items();
  std::vector<std::vector<double>> s(static_cast<std::size_t>(nu),
                                     std::vector<double>(static_cast<std::size_t>(ni), 0.0));
  std::vector<double> den(static_cast<std::size_t>(ni), 0.0);
  for (NodeId a = 0; a < ni; ++a)
    for (NodeId l = 0; l < ni; ++l) den[a] += std::abs(b[a][l]);
  for (NodeId i = 0; i < nu; ++i)
    for (NodeId a = 0; a < ni; ++a) {
      if (den[a] == 0.0) continue;
      double num = 0.0;
      for (NodeId l = 0; l < ni; ++l)
        if (g.has_edge(i, l)) num += b[a][l];
      s[i][a] = num / den[a];
    }
  return s;
}

struct TempDir {
  std::filesystem::path path;
  explicit TempDir(const std::string& tag) {
    path = std::filesystem::temp_directory_path() /
           ("saplingcf_test_" + tag + "_" + std::to_string(std::random_device{}()));
    std::filesystem::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path, ec);
  }
  std::filesystem::path file(const std::string& name) const { return path / name; }
};

inline void write_text(const std::filesystem::path& p, const std::string& content) {
  std::ofstream out(p);
  out << content;
}

inline std::string read_text(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline std::string strip_timing(const std::string& report) {
  auto pos = report.find("[timing]");
  return pos == std::string::npos ? report : report.substr(0, pos);
}

// valid (N, k_i, k_j, CO) tuples with 0 < k < N and CO in its feasible range
struct TupleGen {
  std::mt19937_64 rng;
  explicit TupleGen(std::uint64_t seed) : rng(seed) {}
  struct Tuple {
    std::int64_t n, ki, kj, co;
  };
  Tuple next(std::int64_t max_n = 500) {
    std::int64_t n = 2 + static_cast<std::int64_t>(rng() % static_cast<std::uint64_t>(max_n - 1));
    std::int64_t ki = 1 + static_cast<std::int64_t>(rng() % static_cast<std::uint64_t>(n - 1));
    std::int64_t kj = 1 + static_cast<std::int64_t>(rng() % static_cast<std::uint64_t>(n - 1));
    std::int64_t lo = std::max<std::int64_t>(0, ki + kj - n);
    std::int64_t hi = std::min(ki, kj);
    std::int64_t co = lo + static_cast<std::int64_t>(rng() % static_cast<std::uint64_t>(hi - lo + 1));
    return {n, ki, kj, co};
  }
};

}  // namespace testutil
