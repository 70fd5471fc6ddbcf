#include "saplingcf/io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>
#include <tuple>

namespace saplingcf {

namespace {

[[noreturn]] void parse_fail(const std::filesystem::path& path, std::size_t line_no,
                             const std::string& what) {
  throw std::runtime_error(path.string() + ":" + std::to_string(line_no) + ": " + what);
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return std::move(buf).str();
}

bool parse_node_id(std::string_view tok, NodeId& out) {
  std::int64_t v = 0;
  auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || p != tok.data() + tok.size()) return false;
  if (v < 0 || v > std::numeric_limits<NodeId>::max()) return false;
  out = static_cast<NodeId>(v);
  return true;
}

// splits on spaces/tabs, returns views into `line`
void split_ws(std::string_view line, std::vector<std::string_view>& out) {
  out.clear();
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
}

void split_csv(std::string_view line, std::vector<std::string_view>& out) {
  out.clear();
  std::size_t start = 0;
  for (std::size_t i = 0; i <= line.size(); ++i) {
    if (i == line.size() || line[i] == ',') {
      std::string_view f = line.substr(start, i - start);
      while (!f.empty() && (f.back() == '\r' || f.back() == ' ')) f.remove_suffix(1);
      while (!f.empty() && f.front() == ' ') f.remove_prefix(1);
      out.push_back(f);
      start = i + 1;
    }
  }
}

std::optional<NodeId> header_count(std::string_view comment, std::string_view key) {
  std::size_t pos = comment.find(key);
  if (pos == std::string_view::npos) return std::nullopt;
  pos += key.size();
  NodeId v;
  std::size_t end = pos;
  while (end < comment.size() && std::isdigit(static_cast<unsigned char>(comment[end]))) ++end;
  if (end == pos || !parse_node_id(comment.substr(pos, end - pos), v)) return std::nullopt;
  return v;
}

std::vector<std::string> load_label_sidecar(const std::filesystem::path& path) {
  std::vector<std::string> labels;
  std::ifstream in(path);
  if (!in) return labels;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    labels.push_back(line);
  }
  return labels;
}

}  // namespace

EdgeListFormat parse_edge_list_format(const std::string& s) {
  if (s == "auto") return EdgeListFormat::auto_detect;
  if (s == "adjacency" || s == "adjacency-lines") return EdgeListFormat::adjacency;
  if (s == "pairs" || s == "pair-lines") return EdgeListFormat::pairs;
  throw std::invalid_argument("unknown edge list format '" + s + "'");
}

BipartiteGraph load_edge_list(const std::filesystem::path& path, EdgeListFormat format,
                              LoadStats* stats) {
  std::string content = read_file(path);
  std::vector<std::pair<NodeId, NodeId>> edges;
  std::optional<NodeId> declared_users, declared_items;
  NodeId max_user = -1, max_item = -1;
  std::vector<std::string_view> toks;
  std::size_t line_no = 0, data_lines = 0;

  std::size_t pos = 0;
  while (pos <= content.size()) {
    std::size_t eol = content.find('\n', pos);
    if (eol == std::string::npos) eol = content.size();
    std::string_view line(content.data() + pos, eol - pos);
    pos = eol + 1;
    ++line_no;
    if (pos > content.size() && line.empty()) break;

    if (!line.empty() && (line[0] == '#' || line[0] == '%')) {
      if (auto u = header_count(line, "users=")) declared_users = u;
      if (auto it = header_count(line, "items=")) declared_items = it;
      continue;
    }
    split_ws(line, toks);
    if (toks.empty()) continue;
    ++data_lines;

    if (format == EdgeListFormat::auto_detect && toks.size() != 2)
      format = EdgeListFormat::adjacency;

    NodeId u;
    if (!parse_node_id(toks[0], u))
      parse_fail(path, line_no, "invalid user id '" + std::string(toks[0]) + "'");
    max_user = std::max(max_user, u);

    if (format == EdgeListFormat::pairs || format == EdgeListFormat::auto_detect) {
      if (toks.size() != 2) parse_fail(path, line_no, "expected `user item` pair");
      NodeId it;
      if (!parse_node_id(toks[1], it))
        parse_fail(path, line_no, "invalid item id '" + std::string(toks[1]) + "'");
      max_item = std::max(max_item, it);
      edges.emplace_back(u, it);
    } else {
      for (std::size_t t = 1; t < toks.size(); ++t) {
        NodeId it;
        if (!parse_node_id(toks[t], it))
          parse_fail(path, line_no, "invalid item id '" + std::string(toks[t]) + "'");
        max_item = std::max(max_item, it);
        edges.emplace_back(u, it);
      }
    }
  }
  // a header-only file is a legitimate empty graph; no data and no header is not
  if (data_lines == 0 && !(declared_users && declared_items))
    throw std::runtime_error(path.string() + ": empty edge list");

  NodeId n_users = declared_users.value_or(max_user + 1);
  NodeId n_items = declared_items.value_or(max_item + 1);
  if (max_user >= n_users || max_item >= n_items)
    throw std::runtime_error(path.string() + ": index exceeds declared layer size");

  std::size_t dups = 0;
  BipartiteGraph g = BipartiteGraph::from_edges(n_users, n_items, std::move(edges), &dups);
  if (stats) {
    stats->lines = line_no;
    stats->duplicate_edges = dups;
  }

  auto user_labels = load_label_sidecar(path.string() + ".users.labels");
  auto item_labels = load_label_sidecar(path.string() + ".items.labels");
  if (static_cast<NodeId>(user_labels.size()) == g.n_users()) g.set_labels(Layer::users, std::move(user_labels));
  if (static_cast<NodeId>(item_labels.size()) == g.n_items()) g.set_labels(Layer::items, std::move(item_labels));
  return g;
}

void write_edge_list(const BipartiteGraph& g, const std::filesystem::path& path,
                     EdgeListFormat format, bool write_label_sidecars) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "# users=" << g.n_users() << " items=" << g.n_items() << "\n";
  if (format == EdgeListFormat::pairs) {
    for (NodeId u = 0; u < g.n_users(); ++u)
      for (NodeId it : g.neighbors(Layer::users, u)) out << u << ' ' << it << '\n';
  } else {
    for (NodeId u = 0; u < g.n_users(); ++u) {
      out << u;
      for (NodeId it : g.neighbors(Layer::users, u)) out << ' ' << it;
      out << '\n';
    }
  }
  if (!out) throw std::runtime_error("write failed: " + path.string());
  if (write_label_sidecars) {
    for (Layer l : {Layer::users, Layer::items}) {
      const auto& labels = g.labels(l);
      if (labels.empty()) continue;
      std::filesystem::path side = path.string() + "." + layer_name(l) + ".labels";
      std::ofstream ls(side);
      for (const auto& s : labels) ls << s << '\n';
    }
  }
}

ExportVolumes load_export_volumes(const std::filesystem::path& path) {
  std::string content = read_file(path);
  std::vector<std::string_view> fields;
  std::map<std::string, std::size_t> country_ix, product_ix;
  std::vector<std::tuple<std::size_t, std::size_t, double>> cells;

  std::size_t pos = 0, line_no = 0;
  bool header_seen = false;
  while (pos < content.size()) {
    std::size_t eol = content.find('\n', pos);
    if (eol == std::string::npos) eol = content.size();
    std::string_view line(content.data() + pos, eol - pos);
    pos = eol + 1;
    ++line_no;
    if (line.empty() || line == "\r") continue;
    split_csv(line, fields);
    if (!header_seen) {
      header_seen = true;
      if (fields.size() < 3 || fields[0] != "country" || fields[1] != "product" || fields[2] != "value")
        parse_fail(path, line_no, "expected header `country,product,value`");
      continue;
    }
    if (fields.size() < 3) parse_fail(path, line_no, "expected 3 fields");
    double v = 0;
    auto [p, ec] = std::from_chars(fields[2].data(), fields[2].data() + fields[2].size(), v);
    if (ec != std::errc() || p != fields[2].data() + fields[2].size() || v < 0 || !std::isfinite(v))
      parse_fail(path, line_no, "invalid non-negative value '" + std::string(fields[2]) + "'");
    auto c = country_ix.emplace(std::string(fields[0]), country_ix.size()).first->second;
    auto pr = product_ix.emplace(std::string(fields[1]), product_ix.size()).first->second;
    cells.emplace_back(c, pr, v);
  }
  if (!header_seen || cells.empty()) throw std::runtime_error(path.string() + ": no volume rows");

  ExportVolumes ev;
  ev.countries.resize(country_ix.size());
  ev.products.resize(product_ix.size());
  for (const auto& [name, ix] : country_ix) ev.countries[ix] = name;
  for (const auto& [name, ix] : product_ix) ev.products[ix] = name;
  ev.values.assign(ev.countries.size() * ev.products.size(), 0.0);
  for (const auto& [c, pr, v] : cells) ev.values[c * ev.products.size() + pr] = v;
  return ev;
}

BipartiteGraph rca_binarize(const ExportVolumes& volumes, double threshold) {
  if (threshold <= 0) throw std::invalid_argument("rca threshold must be > 0");
  const std::size_t nc = volumes.countries.size(), np = volumes.products.size();
  std::vector<double> row_sum(nc, 0.0), col_sum(np, 0.0);
  double total = 0.0;
  for (std::size_t c = 0; c < nc; ++c)
    for (std::size_t p = 0; p < np; ++p) {
      double v = volumes.at(c, p);
      row_sum[c] += v;
      col_sum[p] += v;
      total += v;
    }
  for (std::size_t c = 0; c < nc; ++c)
    if (row_sum[c] == 0.0)
      throw std::invalid_argument("RCA undefined: row '" + volumes.countries[c] + "' is all zero");
  for (std::size_t p = 0; p < np; ++p)
    if (col_sum[p] == 0.0)
      throw std::invalid_argument("RCA undefined: column '" + volumes.products[p] + "' is all zero");

  std::vector<std::pair<NodeId, NodeId>> edges;
  for (std::size_t c = 0; c < nc; ++c)
    for (std::size_t p = 0; p < np; ++p) {
      double rca = (volumes.at(c, p) / row_sum[c]) * (total / col_sum[p]);
      if (rca >= threshold) edges.emplace_back(static_cast<NodeId>(c), static_cast<NodeId>(p));
    }
  BipartiteGraph g = BipartiteGraph::from_edges(static_cast<NodeId>(nc), static_cast<NodeId>(np),
                                                std::move(edges));
  g.set_labels(Layer::users, volumes.countries);
  g.set_labels(Layer::items, volumes.products);
  return g;
}

double Ratings::global_mean() const {
  if (user_values.empty()) throw std::runtime_error("no ratings");
  double s = 0;
  for (double v : user_values) s += v;
  return s / static_cast<double>(user_values.size());
}

Ratings ratings_from_triples(NodeId n_users, NodeId n_items,
                             std::vector<std::tuple<NodeId, NodeId, double>> triples) {
  // keep the last value per (user,item) in input order
  std::stable_sort(triples.begin(), triples.end(), [](const auto& a, const auto& b) {
    return std::tie(std::get<0>(a), std::get<1>(a)) < std::tie(std::get<0>(b), std::get<1>(b));
  });
  std::vector<std::tuple<NodeId, NodeId, double>> dedup;
  dedup.reserve(triples.size());
  for (const auto& t : triples) {
    if (!dedup.empty() && std::get<0>(dedup.back()) == std::get<0>(t) &&
        std::get<1>(dedup.back()) == std::get<1>(t))
      dedup.back() = t;
    else
      dedup.push_back(t);
  }

  Ratings r;
  r.n_users = n_users;
  r.n_items = n_items;
  r.user_rows.offsets.assign(static_cast<std::size_t>(n_users) + 1, 0);
  r.item_rows.offsets.assign(static_cast<std::size_t>(n_items) + 1, 0);
  for (const auto& [u, it, v] : dedup) {
    if (u < 0 || u >= n_users || it < 0 || it >= n_items)
      throw std::out_of_range("rating index out of range");
    r.user_rows.offsets[static_cast<std::size_t>(u) + 1]++;
    r.item_rows.offsets[static_cast<std::size_t>(it) + 1]++;
  }
  for (NodeId u = 0; u < n_users; ++u) r.user_rows.offsets[u + 1] += r.user_rows.offsets[u];
  for (NodeId it = 0; it < n_items; ++it) r.item_rows.offsets[it + 1] += r.item_rows.offsets[it];
  r.user_rows.indices.resize(dedup.size());
  r.user_values.resize(dedup.size());
  r.item_rows.indices.resize(dedup.size());
  r.item_values.resize(dedup.size());
  std::vector<EdgeCount> ucur(r.user_rows.offsets.begin(), r.user_rows.offsets.end() - 1);
  std::vector<EdgeCount> icur(r.item_rows.offsets.begin(), r.item_rows.offsets.end() - 1);
  for (const auto& [u, it, v] : dedup) {
    r.user_rows.indices[static_cast<std::size_t>(ucur[u])] = it;
    r.user_values[static_cast<std::size_t>(ucur[u]++)] = v;
    r.item_rows.indices[static_cast<std::size_t>(icur[it])] = u;
    r.item_values[static_cast<std::size_t>(icur[it]++)] = v;
  }
  return r;
}

Ratings load_ratings(const std::filesystem::path& path) {
  std::string content = read_file(path);
  std::vector<std::string_view> fields;
  std::vector<std::tuple<NodeId, NodeId, double>> triples;
  NodeId max_user = -1, max_item = -1;

  std::size_t pos = 0, line_no = 0;
  bool header_seen = false;
  while (pos < content.size()) {
    std::size_t eol = content.find('\n', pos);
    if (eol == std::string::npos) eol = content.size();
    std::string_view line(content.data() + pos, eol - pos);
    pos = eol + 1;
    ++line_no;
    if (line.empty() || line == "\r") continue;
    split_csv(line, fields);
    if (!header_seen) {
      header_seen = true;
      if (fields.size() < 3 || fields[0] != "user" || fields[1] != "item" || fields[2] != "rating")
        parse_fail(path, line_no, "expected header `user,item,rating[,timestamp]`");
      continue;
    }
    if (fields.size() < 3) parse_fail(path, line_no, "expected at least 3 fields");
    NodeId u, it;
    if (!parse_node_id(fields[0], u)) parse_fail(path, line_no, "invalid user id");
    if (!parse_node_id(fields[1], it)) parse_fail(path, line_no, "invalid item id");
    double v = 0;
    auto [p, ec] = std::from_chars(fields[2].data(), fields[2].data() + fields[2].size(), v);
    if (ec != std::errc() || p != fields[2].data() + fields[2].size() || !std::isfinite(v))
      parse_fail(path, line_no, "invalid rating '" + std::string(fields[2]) + "'");
    max_user = std::max(max_user, u);
    max_item = std::max(max_item, it);
    triples.emplace_back(u, it, v);
  }
  if (triples.empty()) throw std::runtime_error(path.string() + ": no ratings");
  return ratings_from_triples(max_user + 1, max_item + 1, std::move(triples));
}

BipartiteGraph threshold_ratings(const Ratings& ratings, double min_rating) {
  std::vector<std::pair<NodeId, NodeId>> edges;
  for (NodeId u = 0; u < ratings.n_users; ++u) {
    auto row = ratings.user_rows.row(u);
    for (std::size_t k = 0; k < row.size(); ++k) {
      if (ratings.user_values[static_cast<std::size_t>(ratings.user_rows.offsets[u]) + k] >= min_rating)
        edges.emplace_back(u, row[k]);
    }
  }
  return BipartiteGraph::from_edges(ratings.n_users, ratings.n_items, std::move(edges));
}

}  // namespace saplingcf
