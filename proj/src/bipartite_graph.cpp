#include "saplingcf/bipartite_graph.hpp"

#include <algorithm>
#include <stdexcept>

namespace saplingcf {

const char* layer_name(Layer l) { return l == Layer::users ? "users" : "items"; }

Layer parse_layer(const std::string& s) {
  if (s == "users" || s == "user" || s == "u") return Layer::users;
  if (s == "items" || s == "item" || s == "i") return Layer::items;
  throw std::invalid_argument("unknown layer '" + s + "' (expected users|items)");
}

bool CsrRows::contains(NodeId i, NodeId j) const {
  auto r = row(i);
  return std::binary_search(r.begin(), r.end(), j);
}

namespace {

CsrRows build_csr(NodeId n_rows, const std::vector<std::pair<NodeId, NodeId>>& edges, bool transposed) {
  CsrRows csr;
  csr.offsets.assign(static_cast<std::size_t>(n_rows) + 1, 0);
  for (const auto& [u, v] : edges) csr.offsets[static_cast<std::size_t>(transposed ? v : u) + 1]++;
  for (std::size_t r = 0; r < static_cast<std::size_t>(n_rows); ++r) csr.offsets[r + 1] += csr.offsets[r];
  csr.indices.resize(edges.size());
  std::vector<EdgeCount> cursor(csr.offsets.begin(), csr.offsets.end() - 1);
  for (const auto& [u, v] : edges) {
    NodeId r = transposed ? v : u;
    csr.indices[static_cast<std::size_t>(cursor[r]++)] = transposed ? u : v;
  }
  // edges arrive sorted by (u,v); the transposed fill is sorted per row by
  // construction as well, but sort defensively when rows came out unordered
  for (NodeId r = 0; r < n_rows; ++r) {
    auto begin = csr.indices.begin() + csr.offsets[r];
    auto end = csr.indices.begin() + csr.offsets[r + 1];
    if (!std::is_sorted(begin, end)) std::sort(begin, end);
  }
  return csr;
}

}  // namespace

BipartiteGraph BipartiteGraph::from_edges(NodeId n_users, NodeId n_items,
                                          std::vector<std::pair<NodeId, NodeId>> edges,
                                          std::size_t* dedup_count) {
  for (const auto& [u, v] : edges) {
    if (u < 0 || v < 0 || u >= n_users || v >= n_items)
      throw std::out_of_range("edge (" + std::to_string(u) + "," + std::to_string(v) +
                              ") outside " + std::to_string(n_users) + "x" + std::to_string(n_items));
  }
  std::sort(edges.begin(), edges.end());
  std::size_t before = edges.size();
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  if (dedup_count) *dedup_count = before - edges.size();

  BipartiteGraph g;
  g.user_rows_ = build_csr(n_users, edges, false);
  g.item_rows_ = build_csr(n_items, edges, true);
  return g;
}

std::vector<std::pair<NodeId, NodeId>> BipartiteGraph::edges() const {
  std::vector<std::pair<NodeId, NodeId>> out;
  out.reserve(user_rows_.indices.size());
  for (NodeId u = 0; u < n_users(); ++u)
    for (NodeId it : user_rows_.row(u)) out.emplace_back(u, it);
  return out;
}

void BipartiteGraph::set_labels(Layer l, std::vector<std::string> labels) {
  if (!labels.empty() && static_cast<NodeId>(labels.size()) != n(l))
    throw std::invalid_argument("label count does not match node count on layer " +
                                std::string(layer_name(l)));
  (l == Layer::users ? user_labels_ : item_labels_) = std::move(labels);
}

NodeId BipartiteGraph::find_label(Layer l, const std::string& label) const {
  const auto& labels = this->labels(l);
  for (std::size_t i = 0; i < labels.size(); ++i)
    if (labels[i] == label) return static_cast<NodeId>(i);
  return -1;
}

DegreeVector degrees(const BipartiteGraph& g, Layer layer) {
  DegreeVector d{layer, {}};
  NodeId n = g.n(layer);
  d.k.resize(static_cast<std::size_t>(n));
  for (NodeId i = 0; i < n; ++i) d.k[static_cast<std::size_t>(i)] = g.degree(layer, i);
  return d;
}

EdgeCount DegreeVector::sum() const {
  EdgeCount s = 0;
  for (NodeId v : k) s += v;
  return s;
}

std::vector<CoOccurrence> co_occurrence_row(const BipartiteGraph& g, Layer layer, NodeId i) {
  if (i < 0 || i >= g.n(layer)) throw std::out_of_range("node index out of range");
  const CsrRows& primary = g.rows(layer);
  const CsrRows& secondary = g.rows(other_layer(layer));
  std::vector<NodeId> counts(static_cast<std::size_t>(primary.n()), 0);
  std::vector<NodeId> touched;
  for (NodeId mid : primary.row(i)) {
    for (NodeId j : secondary.row(mid)) {
      if (counts[static_cast<std::size_t>(j)]++ == 0) touched.push_back(j);
    }
  }
  std::sort(touched.begin(), touched.end());
  std::vector<CoOccurrence> out;
  out.reserve(touched.size());
  for (NodeId j : touched) out.push_back({j, counts[static_cast<std::size_t>(j)]});
  return out;
}

FilteredGraph filter_min_degree(const BipartiteGraph& g, NodeId min_deg) {
  if (min_deg < 0) throw std::invalid_argument("min_deg must be >= 0");
  std::vector<char> keep_user(static_cast<std::size_t>(g.n_users()), 1);
  std::vector<char> keep_item(static_cast<std::size_t>(g.n_items()), 1);
  std::vector<EdgeCount> du(g.n_users()), di(g.n_items());
  for (NodeId u = 0; u < g.n_users(); ++u) du[u] = g.degree(Layer::users, u);
  for (NodeId it = 0; it < g.n_items(); ++it) di[it] = g.degree(Layer::items, it);

  bool changed = true;
  while (changed) {
    changed = false;
    for (NodeId u = 0; u < g.n_users(); ++u) {
      if (keep_user[u] && du[u] < min_deg) {
        keep_user[u] = 0;
        changed = true;
        for (NodeId it : g.neighbors(Layer::users, u))
          if (keep_item[it]) --di[it];
      }
    }
    for (NodeId it = 0; it < g.n_items(); ++it) {
      if (keep_item[it] && di[it] < min_deg) {
        keep_item[it] = 0;
        changed = true;
        for (NodeId u : g.neighbors(Layer::items, it))
          if (keep_user[u]) --du[u];
      }
    }
  }

  FilteredGraph out;
  std::vector<NodeId> user_new(g.n_users(), -1), item_new(g.n_items(), -1);
  for (NodeId u = 0; u < g.n_users(); ++u)
    if (keep_user[u]) {
      user_new[u] = static_cast<NodeId>(out.user_map.size());
      out.user_map.push_back(u);
    }
  for (NodeId it = 0; it < g.n_items(); ++it)
    if (keep_item[it]) {
      item_new[it] = static_cast<NodeId>(out.item_map.size());
      out.item_map.push_back(it);
    }

  std::vector<std::pair<NodeId, NodeId>> edges;
  for (NodeId u = 0; u < g.n_users(); ++u) {
    if (!keep_user[u]) continue;
    for (NodeId it : g.neighbors(Layer::users, u))
      if (keep_item[it]) edges.emplace_back(user_new[u], item_new[it]);
  }
  out.graph = BipartiteGraph::from_edges(static_cast<NodeId>(out.user_map.size()),
                                         static_cast<NodeId>(out.item_map.size()), std::move(edges));

  for (Layer l : {Layer::users, Layer::items}) {
    const auto& src = g.labels(l);
    if (src.empty()) continue;
    const auto& map = l == Layer::users ? out.user_map : out.item_map;
    std::vector<std::string> labels;
    labels.reserve(map.size());
    for (NodeId orig : map) labels.push_back(src[static_cast<std::size_t>(orig)]);
    out.graph.set_labels(l, std::move(labels));
  }
  return out;
}

}  // namespace saplingcf
