#include "saplingcf/splits.hpp"

#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

namespace saplingcf {

namespace {

// std::uniform_int_distribution varies across standard libraries; this
// rejection sampler keeps splits reproducible across toolchains.
std::uint64_t bounded(std::mt19937_64& rng, std::uint64_t bound) {
  std::uint64_t threshold = (0 - bound) % bound;
  for (;;) {
    std::uint64_t r = rng();
    if (r >= threshold) return r % bound;
  }
}

}  // namespace

SplitPair holdout_validation_split(const BipartiteGraph& g, double fraction, std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction < 1.0))
    throw std::invalid_argument("holdout fraction must be in (0,1)");

  std::mt19937_64 rng(seed);
  std::vector<std::pair<NodeId, NodeId>> train_edges, heldout_edges;
  std::vector<NodeId> row;
  for (NodeId u = 0; u < g.n_users(); ++u) {
    auto items = g.neighbors(Layer::users, u);
    if (items.empty()) continue;
    row.assign(items.begin(), items.end());
    auto k = static_cast<std::size_t>(row.size());
    auto h = static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(k)));
    // partial Fisher-Yates: the first h slots become the heldout sample
    for (std::size_t s = 0; s < h; ++s) {
      std::size_t pick = s + static_cast<std::size_t>(bounded(rng, k - s));
      std::swap(row[s], row[pick]);
    }
    for (std::size_t s = 0; s < h; ++s) heldout_edges.emplace_back(u, row[s]);
    for (std::size_t s = h; s < k; ++s) train_edges.emplace_back(u, row[s]);
  }

  SplitPair out;
  out.seed = seed;
  out.train = BipartiteGraph::from_edges(g.n_users(), g.n_items(), std::move(train_edges));
  out.heldout = BipartiteGraph::from_edges(g.n_users(), g.n_items(), std::move(heldout_edges));
  if (!g.labels(Layer::users).empty()) {
    out.train.set_labels(Layer::users, g.labels(Layer::users));
    out.heldout.set_labels(Layer::users, g.labels(Layer::users));
  }
  if (!g.labels(Layer::items).empty()) {
    out.train.set_labels(Layer::items, g.labels(Layer::items));
    out.heldout.set_labels(Layer::items, g.labels(Layer::items));
  }
  return out;
}

}  // namespace saplingcf
