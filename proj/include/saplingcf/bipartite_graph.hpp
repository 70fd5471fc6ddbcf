#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace saplingcf {

using NodeId = std::int32_t;
using EdgeCount = std::int64_t;

enum class Layer { users, items };

inline Layer other_layer(Layer l) { return l == Layer::users ? Layer::items : Layer::users; }
const char* layer_name(Layer l);
Layer parse_layer(const std::string& s);  // "users" | "items"

/// One orientation of the biadjacency matrix in compressed sparse row form.
/// Rows are sorted and duplicate-free.
struct CsrRows {
  std::vector<EdgeCount> offsets;  // size n+1
  std::vector<NodeId> indices;

  NodeId n() const { return static_cast<NodeId>(offsets.size()) - 1; }
  std::span<const NodeId> row(NodeId i) const {
    return {indices.data() + offsets[i], indices.data() + offsets[i + 1]};
  }
  NodeId degree(NodeId i) const { return static_cast<NodeId>(offsets[i + 1] - offsets[i]); }
  bool contains(NodeId i, NodeId j) const;
};

/// Immutable unweighted user-item network, kept in both orientations.
class BipartiteGraph {
 public:
  BipartiteGraph() = default;

  // Builds both orientations from an edge list. Duplicates are removed;
  // dedup_count (if given) receives the number of dropped pairs.
  static BipartiteGraph from_edges(NodeId n_users, NodeId n_items,
                                   std::vector<std::pair<NodeId, NodeId>> edges,
                                   std::size_t* dedup_count = nullptr);

  NodeId n_users() const { return user_rows_.n(); }
  NodeId n_items() const { return item_rows_.n(); }
  NodeId n(Layer l) const { return l == Layer::users ? n_users() : n_items(); }
  EdgeCount edge_count() const { return static_cast<EdgeCount>(user_rows_.indices.size()); }

  const CsrRows& rows(Layer l) const { return l == Layer::users ? user_rows_ : item_rows_; }
  const CsrRows& user_rows() const { return user_rows_; }
  const CsrRows& item_rows() const { return item_rows_; }

  std::span<const NodeId> neighbors(Layer l, NodeId i) const { return rows(l).row(i); }
  NodeId degree(Layer l, NodeId i) const { return rows(l).degree(i); }
  bool has_edge(NodeId user, NodeId item) const { return user_rows_.contains(user, item); }

  std::vector<std::pair<NodeId, NodeId>> edges() const;

  // Optional external identifiers; empty when the source had none.
  const std::vector<std::string>& labels(Layer l) const {
    return l == Layer::users ? user_labels_ : item_labels_;
  }
  void set_labels(Layer l, std::vector<std::string> labels);
  NodeId find_label(Layer l, const std::string& label) const;  // -1 when absent

 private:
  CsrRows user_rows_;
  CsrRows item_rows_;
  std::vector<std::string> user_labels_;
  std::vector<std::string> item_labels_;
};

struct DegreeVector {
  Layer layer;
  std::vector<NodeId> k;
  EdgeCount sum() const;
};

DegreeVector degrees(const BipartiteGraph& g, Layer layer);

struct CoOccurrence {
  NodeId j;
  NodeId count;
};

/// Shared-neighbor counts of node i against every other node of its layer.
/// Entries are sorted by j and carry count > 0; the diagonal (j == i, count
/// k_i) is included.
std::vector<CoOccurrence> co_occurrence_row(const BipartiteGraph& g, Layer layer, NodeId i);

struct FilteredGraph {
  BipartiteGraph graph;
  std::vector<NodeId> user_map;  // new index -> original index
  std::vector<NodeId> item_map;
};

/// Iteratively removes nodes with degree < min_deg until a fixed point,
/// then reindexes densely. Labels survive through the maps.
FilteredGraph filter_min_degree(const BipartiteGraph& g, NodeId min_deg);

}  // namespace saplingcf
