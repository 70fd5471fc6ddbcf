#include "saplingcf/similarity_matrix.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iostream>
#include <random>
#include <stdexcept>

#include "saplingcf/parallel.hpp"

namespace saplingcf {

double SimilarityMatrix::value(NodeId i, NodeId j) const {
  const auto& row = rows[static_cast<std::size_t>(i)];
  auto it = std::lower_bound(row.begin(), row.end(), j,
                             [](const SimEntry& e, NodeId jj) { return e.j < jj; });
  return (it != row.end() && it->j == j) ? it->value : 0.0;
}

std::int64_t SimilarityMatrix::entry_count() const {
  std::int64_t c = 0;
  for (const auto& r : rows) c += static_cast<std::int64_t>(r.size());
  return c;
}

namespace {

void warn_degenerate(const SimilarityEngine& engine) {
  if (engine.degenerate_count() > 0) {
    std::cerr << "warning: " << engine.degenerate_count() << " node(s) on layer "
              << layer_name(engine.layer()) << " have degree 0 or degree N; their "
              << metric_name(engine.metric()) << " rows/columns are set to 0\n";
  }
}

}  // namespace

SimilarityMatrix materialize_similarity(const BipartiteGraph& g, Layer layer, Metric metric,
                                        const MatrixOptions& opts) {
  SimilarityEngine engine(g, layer, metric);
  warn_degenerate(engine);
  const NodeId n = engine.n();
  if (n < 2) throw std::invalid_argument("similarity needs at least 2 nodes on the layer");
  const bool dense = metric_is_signed(metric);
  if (dense && n > opts.dense_cap)
    throw std::runtime_error(std::string(metric_name(metric)) + " rows are dense in principle; "
                             "refusing full materialization of " + std::to_string(n) +
                             " nodes (cap " + std::to_string(opts.dense_cap) +
                             "); use streaming or top-k filtering");

  SimilarityMatrix m;
  m.layer = layer;
  m.n = n;
  m.metric = metric;
  m.rows.resize(static_cast<std::size_t>(n));

  const int workers = resolve_workers(opts.workers);
  std::vector<SimilarityEngine::RowScratch> scratch(static_cast<std::size_t>(workers));
  for (auto& s : scratch) s = engine.make_scratch();

  parallel_chunks(n, workers, 64, [&](int w, std::int64_t begin, std::int64_t end) {
    std::vector<SimilarityEngine::Entry> entries;
    std::vector<double> row_buf(dense ? static_cast<std::size_t>(n) : 0);
    for (std::int64_t i = begin; i < end; ++i) {
      auto id = static_cast<NodeId>(i);
      auto& out = m.rows[static_cast<std::size_t>(i)];
      if (dense) {
        engine.dense_row(id, scratch[static_cast<std::size_t>(w)], row_buf);
        for (NodeId j = 0; j < n; ++j)
          if (row_buf[static_cast<std::size_t>(j)] != 0.0)
            out.push_back({j, row_buf[static_cast<std::size_t>(j)]});
      } else {
        engine.touched_row(id, scratch[static_cast<std::size_t>(w)], entries, /*sorted=*/true);
        out.reserve(entries.size());
        for (const auto& e : entries) out.push_back({e.j, e.value});
      }
    }
  });
  return m;
}

namespace {

// candidate ordering for |value| top-k: larger magnitude first, smaller
// index wins ties
bool abs_before(double va, NodeId ja, double vb, NodeId jb) {
  double aa = std::abs(va), ab = std::abs(vb);
  if (aa != ab) return aa > ab;
  return ja < jb;
}

std::vector<SimEntry> select_topk_row(std::vector<SimEntry>&& candidates, NodeId diag,
                                      double diag_value, bool has_diag, int k) {
  if (static_cast<std::size_t>(k) < candidates.size()) {
    std::nth_element(candidates.begin(), candidates.begin() + k, candidates.end(),
                     [](const SimEntry& a, const SimEntry& b) {
                       return abs_before(a.value, a.j, b.value, b.j);
                     });
    candidates.resize(static_cast<std::size_t>(k));
  }
  if (has_diag) candidates.push_back({diag, diag_value});
  std::sort(candidates.begin(), candidates.end(),
            [](const SimEntry& a, const SimEntry& b) { return a.j < b.j; });
  return std::move(candidates);
}

}  // namespace

SimilarityMatrix topk_filter(const SimilarityMatrix& m, int k) {
  if (k < 1) throw std::invalid_argument("top-k requires k >= 1");
  SimilarityMatrix out;
  out.layer = m.layer;
  out.n = m.n;
  out.metric = m.metric;
  out.truncation = k;
  out.rows.resize(m.rows.size());
  for (std::size_t i = 0; i < m.rows.size(); ++i) {
    auto diag = static_cast<NodeId>(i);
    std::vector<SimEntry> cands;
    cands.reserve(m.rows[i].size());
    bool has_diag = false;
    double diag_value = 0;
    for (const auto& e : m.rows[i]) {
      if (e.j == diag) {
        has_diag = true;
        diag_value = e.value;
      } else {
        cands.push_back(e);
      }
    }
    out.rows[i] = select_topk_row(std::move(cands), diag, diag_value, has_diag, k);
  }
  return out;
}

void stream_dense_rows(const SimilarityEngine& engine, int workers, NodeId block_size,
                       const std::function<void(NodeId, std::span<const double>)>& fn) {
  const NodeId n = engine.n();
  if (block_size < 1) block_size = 1;
  workers = resolve_workers(workers);
  std::vector<SimilarityEngine::RowScratch> scratch(static_cast<std::size_t>(workers));
  for (auto& s : scratch) s = engine.make_scratch();
  std::vector<double> block(static_cast<std::size_t>(std::min(block_size, n)) *
                            static_cast<std::size_t>(n));
  for (NodeId row0 = 0; row0 < n; row0 += block_size) {
    const NodeId rows_here = std::min<NodeId>(block_size, n - row0);
    parallel_chunks(rows_here, workers, 8, [&](int w, std::int64_t begin, std::int64_t end) {
      for (std::int64_t r = begin; r < end; ++r) {
        engine.dense_row(static_cast<NodeId>(row0 + r), scratch[static_cast<std::size_t>(w)],
                         {block.data() + static_cast<std::size_t>(r) * static_cast<std::size_t>(n),
                          static_cast<std::size_t>(n)});
      }
    });
    for (NodeId r = 0; r < rows_here; ++r)
      fn(row0 + r,
         {block.data() + static_cast<std::size_t>(r) * static_cast<std::size_t>(n),
          static_cast<std::size_t>(n)});
  }
}

SimilarityMatrix topk_similarity(const BipartiteGraph& g, Layer layer, Metric metric, int k,
                                 const MatrixOptions& opts) {
  if (k < 1) throw std::invalid_argument("top-k requires k >= 1");
  SimilarityEngine engine(g, layer, metric);
  warn_degenerate(engine);
  const NodeId n = engine.n();
  SimilarityMatrix out;
  out.layer = layer;
  out.n = n;
  out.metric = metric;
  out.truncation = k;
  out.rows.resize(static_cast<std::size_t>(n));

  const int workers = resolve_workers(opts.workers);
  std::vector<SimilarityEngine::RowScratch> scratch(static_cast<std::size_t>(workers));
  for (auto& s : scratch) s = engine.make_scratch();
  parallel_chunks(n, workers, 32, [&](int w, std::int64_t begin, std::int64_t end) {
    std::vector<double> row(static_cast<std::size_t>(n));
    for (std::int64_t i = begin; i < end; ++i) {
      auto id = static_cast<NodeId>(i);
      engine.dense_row(id, scratch[static_cast<std::size_t>(w)], row);
      std::vector<SimEntry> cands;
      cands.reserve(static_cast<std::size_t>(n) / 4 + 8);
      for (NodeId j = 0; j < n; ++j)
        if (j != id && row[static_cast<std::size_t>(j)] != 0.0)
          cands.push_back({j, row[static_cast<std::size_t>(j)]});
      bool has_diag = row[static_cast<std::size_t>(id)] != 0.0;
      out.rows[static_cast<std::size_t>(i)] =
          select_topk_row(std::move(cands), id, row[static_cast<std::size_t>(id)], has_diag, k);
    }
  });
  return out;
}

namespace {

std::vector<ProjectedEdge> project_rows(
    NodeId n, int k,
    const std::function<void(NodeId, std::vector<SimEntry>&)>& row_candidates) {
  if (k < 1) throw std::invalid_argument("projection requires k >= 1");
  std::vector<ProjectedEdge> edges;
  std::vector<SimEntry> cands;
  for (NodeId i = 0; i < n; ++i) {
    cands.clear();
    row_candidates(i, cands);
    // highest signed value first, ties toward the smaller index
    auto by_value = [](const SimEntry& a, const SimEntry& b) {
      if (a.value != b.value) return a.value > b.value;
      return a.j < b.j;
    };
    std::size_t keep = std::min<std::size_t>(static_cast<std::size_t>(k), cands.size());
    std::partial_sort(cands.begin(), cands.begin() + static_cast<std::ptrdiff_t>(keep),
                      cands.end(), by_value);
    for (std::size_t t = 0; t < keep; ++t) edges.push_back({i, cands[t].j, cands[t].value});
  }
  return edges;
}

}  // namespace

std::vector<ProjectedEdge> project_network(const SimilarityMatrix& m, int k) {
  return project_rows(m.n, k, [&](NodeId i, std::vector<SimEntry>& cands) {
    for (const auto& e : m.rows[static_cast<std::size_t>(i)])
      if (e.j != i && e.value != 0.0) cands.push_back(e);
  });
}

std::vector<ProjectedEdge> project_network(const BipartiteGraph& g, Layer layer, Metric metric,
                                           int k, const MatrixOptions& opts) {
  SimilarityEngine engine(g, layer, metric);
  warn_degenerate(engine);
  const NodeId n = engine.n();
  // collect per-row top-k first (streamed), then emit
  std::vector<std::vector<SimEntry>> kept(static_cast<std::size_t>(n));
  const int workers = resolve_workers(opts.workers);
  std::vector<SimilarityEngine::RowScratch> scratch(static_cast<std::size_t>(workers));
  for (auto& s : scratch) s = engine.make_scratch();
  parallel_chunks(n, workers, 32, [&](int w, std::int64_t begin, std::int64_t end) {
    std::vector<double> row(static_cast<std::size_t>(n));
    for (std::int64_t i = begin; i < end; ++i) {
      auto id = static_cast<NodeId>(i);
      engine.dense_row(id, scratch[static_cast<std::size_t>(w)], row);
      auto& cands = kept[static_cast<std::size_t>(i)];
      for (NodeId j = 0; j < n; ++j)
        if (j != id && row[static_cast<std::size_t>(j)] != 0.0)
          cands.push_back({j, row[static_cast<std::size_t>(j)]});
      auto by_value = [](const SimEntry& a, const SimEntry& b) {
        if (a.value != b.value) return a.value > b.value;
        return a.j < b.j;
      };
      std::size_t keep = std::min<std::size_t>(static_cast<std::size_t>(k), cands.size());
      std::partial_sort(cands.begin(), cands.begin() + static_cast<std::ptrdiff_t>(keep),
                        cands.end(), by_value);
      cands.resize(keep);
    }
  });
  std::vector<ProjectedEdge> edges;
  for (NodeId i = 0; i < n; ++i)
    for (const auto& e : kept[static_cast<std::size_t>(i)]) edges.push_back({i, e.j, e.value});
  return edges;
}

double probs_orientation_residual(const BipartiteGraph& g, Layer layer, std::size_t max_pairs) {
  SimilarityEngine engine(g, layer, Metric::probs);
  const NodeId n = engine.n();
  if (n < 2) return 0.0;
  std::mt19937_64 rng(12345);
  double worst = 0.0;
  for (std::size_t t = 0; t < max_pairs; ++t) {
    auto i = static_cast<NodeId>(rng() % static_cast<std::uint64_t>(n));
    auto j = static_cast<NodeId>(rng() % static_cast<std::uint64_t>(n));
    if (i == j) continue;
    double bij = engine.pair_value(i, j);
    double bji = engine.pair_value(j, i);
    double residual = std::abs(bij * static_cast<double>(engine.degree_of(j)) -
                               bji * static_cast<double>(engine.degree_of(i)));
    worst = std::max(worst, residual);
  }
  return worst;
}

void write_similarity_csv(const SimilarityMatrix& m, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "i,j,value\n";
  out.precision(17);
  for (NodeId i = 0; i < m.n; ++i)
    for (const auto& e : m.rows[static_cast<std::size_t>(i)])
      out << i << ',' << e.j << ',' << e.value << '\n';
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

void write_projection_csv(std::span<const ProjectedEdge> edges, const std::filesystem::path& path,
                          const BipartiteGraph* g, Layer layer) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "src,dst,weight\n";
  out.precision(17);
  const std::vector<std::string>* labels = nullptr;
  if (g && !g->labels(layer).empty()) labels = &g->labels(layer);
  for (const auto& e : edges) {
    if (labels)
      out << (*labels)[static_cast<std::size_t>(e.src)] << ','
          << (*labels)[static_cast<std::size_t>(e.dst)] << ',' << e.weight << '\n';
    else
      out << e.src << ',' << e.dst << ',' << e.weight << '\n';
  }
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

namespace {

constexpr char kMagic[4] = {'S', 'C', 'F', 'B'};
constexpr std::uint32_t kVersion = 1;

template <typename T>
void put(std::ofstream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::ifstream& in) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!in) throw std::runtime_error("unexpected end of similarity file");
  return v;
}

}  // namespace

void write_similarity_binary(const SimilarityMatrix& m, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out.write(kMagic, 4);
  put(out, kVersion);
  put(out, static_cast<std::uint8_t>(m.layer == Layer::users ? 0 : 1));
  put(out, static_cast<std::uint8_t>(m.metric));
  put(out, static_cast<std::uint16_t>(0));
  put(out, static_cast<std::uint64_t>(m.n));
  put(out, static_cast<std::int64_t>(m.truncation ? *m.truncation : -1));
  for (const auto& row : m.rows) {
    put(out, static_cast<std::uint64_t>(row.size()));
    for (const auto& e : row) {
      put(out, static_cast<std::int32_t>(e.j));
      put(out, e.value);
    }
  }
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

SimilarityMatrix read_similarity_binary(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kMagic, 4) != 0)
    throw std::runtime_error(path.string() + ": not a similarity block file");
  auto version = get<std::uint32_t>(in);
  if (version != kVersion) throw std::runtime_error("unsupported similarity file version");
  SimilarityMatrix m;
  m.layer = get<std::uint8_t>(in) == 0 ? Layer::users : Layer::items;
  m.metric = static_cast<Metric>(get<std::uint8_t>(in));
  get<std::uint16_t>(in);
  m.n = static_cast<NodeId>(get<std::uint64_t>(in));
  auto trunc = get<std::int64_t>(in);
  if (trunc >= 0) m.truncation = static_cast<int>(trunc);
  m.rows.resize(static_cast<std::size_t>(m.n));
  for (auto& row : m.rows) {
    auto count = get<std::uint64_t>(in);
    row.resize(count);
    for (auto& e : row) {
      e.j = get<std::int32_t>(in);
      e.value = get<double>(in);
    }
  }
  return m;
}

}  // namespace saplingcf
