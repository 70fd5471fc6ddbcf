#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "saplingcf/bipartite_graph.hpp"
#include "saplingcf/similarity.hpp"

namespace saplingcf {

struct SimEntry {
  NodeId j;
  double value;
};

/// Node-node similarity on one layer, stored as sparse sorted rows.
/// Untruncated signed metrics carry complete rows (background values
/// included); baselines carry the co-occurring support. The diagonal is
/// stored but excluded from filtering and projection.
struct SimilarityMatrix {
  Layer layer = Layer::users;
  NodeId n = 0;
  Metric metric = Metric::sapling;
  std::optional<int> truncation;
  std::vector<std::vector<SimEntry>> rows;

  double value(NodeId i, NodeId j) const;  // 0 when absent
  std::int64_t entry_count() const;
};

struct MatrixOptions {
  int workers = 0;
  // full materialization of dense-in-principle metrics is refused above
  // this many nodes; blocked/streamed paths serve larger layers
  NodeId dense_cap = 20000;
};

SimilarityMatrix materialize_similarity(const BipartiteGraph& g, Layer layer, Metric metric,
                                        const MatrixOptions& opts = {});

/// Per row, keeps the k entries of largest |value| (diagonal excluded from
/// the competition but preserved); ties break toward the smaller index.
SimilarityMatrix topk_filter(const SimilarityMatrix& m, int k);

/// Streamed equivalent of materialize + topk_filter that never holds full
/// rows for more than one block; works on layers of any size.
SimilarityMatrix topk_similarity(const BipartiteGraph& g, Layer layer, Metric metric, int k,
                                 const MatrixOptions& opts = {});

/// Calls fn(i, row) for i = 0..n-1 in ascending order; rows are produced
/// in parallel block by block. `row` is only valid during the call.
void stream_dense_rows(const SimilarityEngine& engine, int workers, NodeId block_size,
                       const std::function<void(NodeId, std::span<const double>)>& fn);

struct ProjectedEdge {
  NodeId src;
  NodeId dst;
  double weight;
};

/// Signed one-mode projection: each node emits out-edges to its k
/// highest-similarity neighbors by signed value (diagonal excluded,
/// exact zeros omitted, ties toward the smaller index).
std::vector<ProjectedEdge> project_network(const SimilarityMatrix& m, int k = 4);
std::vector<ProjectedEdge> project_network(const BipartiteGraph& g, Layer layer, Metric metric,
                                           int k = 4, const MatrixOptions& opts = {});

/// max |B_ij * k_j - B_ji * k_i| over sampled pairs; 0 for ProbS by the
/// algebraic identity behind its orientation.
double probs_orientation_residual(const BipartiteGraph& g, Layer layer, std::size_t max_pairs = 2000);

void write_similarity_csv(const SimilarityMatrix& m, const std::filesystem::path& path);
void write_projection_csv(std::span<const ProjectedEdge> edges, const std::filesystem::path& path,
                          const BipartiteGraph* g = nullptr, Layer layer = Layer::users);

/// Binary row-block format. Header: magic "SCFB", u32 version, u8 layer,
/// u8 metric id, u16 reserved, u64 n, i64 truncation (-1 = none); then per
/// row a u64 count followed by count * (i32 index, f64 value), little-endian.
void write_similarity_binary(const SimilarityMatrix& m, const std::filesystem::path& path);
SimilarityMatrix read_similarity_binary(const std::filesystem::path& path);

}  // namespace saplingcf
