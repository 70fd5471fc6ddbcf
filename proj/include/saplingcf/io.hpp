#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "saplingcf/bipartite_graph.hpp"

namespace saplingcf {

enum class EdgeListFormat { auto_detect, adjacency, pairs };
EdgeListFormat parse_edge_list_format(const std::string& s);

struct LoadStats {
  std::size_t lines = 0;
  std::size_t duplicate_edges = 0;
};

/// Reads either format:
///   adjacency-lines: `u i1 i2 ... im` (one user per line, the public
///   benchmark split layout; a bare `u` declares a user with no items)
///   pair-lines: `u i` per line
/// Lines starting with '#' or '%' are comments; a comment containing
/// `users=<n>` / `items=<n>` fixes the layer sizes (otherwise max index + 1).
/// Duplicate edges are dropped with a count in stats. Label sidecars
/// (`<path>.users.labels`, `<path>.items.labels`) are picked up when present.
BipartiteGraph load_edge_list(const std::filesystem::path& path,
                              EdgeListFormat format = EdgeListFormat::auto_detect,
                              LoadStats* stats = nullptr);

void write_edge_list(const BipartiteGraph& g, const std::filesystem::path& path,
                     EdgeListFormat format = EdgeListFormat::adjacency,
                     bool write_label_sidecars = false);

/// Dense country x product volume table (CSV `country,product,value`).
struct ExportVolumes {
  std::vector<std::string> countries;
  std::vector<std::string> products;
  std::vector<double> values;  // row-major countries x products

  double at(std::size_t c, std::size_t p) const { return values[c * products.size() + p]; }
};

ExportVolumes load_export_volumes(const std::filesystem::path& path);

/// Edge (i,a) iff RCA_ia >= threshold with
/// RCA_ia = (E_ia / sum_l E_il) * (sum_kl E_kl / sum_k E_ka).
/// Rejects all-zero rows or columns (RCA undefined there).
BipartiteGraph rca_binarize(const ExportVolumes& volumes, double threshold = 1.0);

/// Sparse user x item rating values, both orientations.
struct Ratings {
  NodeId n_users = 0;
  NodeId n_items = 0;
  CsrRows user_rows;                // items per user
  std::vector<double> user_values;  // parallel to user_rows.indices
  CsrRows item_rows;                // users per item
  std::vector<double> item_values;

  double global_mean() const;
};

/// CSV `user,item,rating[,timestamp]`; integer ids. Duplicate (user,item)
/// pairs keep the last value in file order.
Ratings load_ratings(const std::filesystem::path& path);

Ratings ratings_from_triples(NodeId n_users, NodeId n_items,
                             std::vector<std::tuple<NodeId, NodeId, double>> triples);

/// Edge iff rating >= min_rating.
BipartiteGraph threshold_ratings(const Ratings& ratings, double min_rating);

}  // namespace saplingcf
