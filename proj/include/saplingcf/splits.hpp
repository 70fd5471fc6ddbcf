#pragma once

#include <cstdint>

#include "saplingcf/bipartite_graph.hpp"

namespace saplingcf {

struct SplitPair {
  BipartiteGraph train;
  BipartiteGraph heldout;
  std::uint64_t seed = 0;
};

/// Per user, moves ceil(fraction * k_u) uniformly sampled items into the
/// heldout graph; the remainder stays in train. Seeded and reproducible:
/// the same (graph, fraction, seed) always yields the same split.
SplitPair holdout_validation_split(const BipartiteGraph& g, double fraction, std::uint64_t seed);

}  // namespace saplingcf
