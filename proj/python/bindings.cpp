#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <optional>

#include "saplingcf/bipartite_graph.hpp"
#include "saplingcf/evaluation.hpp"
#include "saplingcf/io.hpp"
#include "saplingcf/recommender.hpp"
#include "saplingcf/similarity.hpp"
#include "saplingcf/similarity_matrix.hpp"
#include "saplingcf/splits.hpp"

namespace py = pybind11;
using namespace saplingcf;

namespace {

Layer layer_arg(const std::string& s) { return parse_layer(s); }
Metric metric_arg(const std::string& s) { return parse_metric(s); }

ScorerOptions scorer_options(int workers, int block_size, std::optional<int> topk,
                             bool include_self) {
  ScorerOptions opts;
  opts.workers = workers;
  opts.block_size = block_size;
  opts.topk = topk;
  opts.include_self = include_self;
  return opts;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "memory-based collaborative filtering on unweighted bipartite networks";

  py::class_<BipartiteGraph>(m, "BipartiteGraph")
      .def_static(
          "from_edges",
          [](NodeId n_users, NodeId n_items, std::vector<std::pair<NodeId, NodeId>> edges) {
            return BipartiteGraph::from_edges(n_users, n_items, std::move(edges));
          },
          py::arg("n_users"), py::arg("n_items"), py::arg("edges"))
      .def_property_readonly("n_users", &BipartiteGraph::n_users)
      .def_property_readonly("n_items", &BipartiteGraph::n_items)
      .def_property_readonly("edge_count", &BipartiteGraph::edge_count)
      .def("degree",
           [](const BipartiteGraph& g, const std::string& layer, NodeId i) {
             return g.degree(layer_arg(layer), i);
           })
      .def("degrees",
           [](const BipartiteGraph& g, const std::string& layer) {
             return degrees(g, layer_arg(layer)).k;
           })
      .def("neighbors",
           [](const BipartiteGraph& g, const std::string& layer, NodeId i) {
             auto row = g.neighbors(layer_arg(layer), i);
             return std::vector<NodeId>(row.begin(), row.end());
           })
      .def("has_edge", &BipartiteGraph::has_edge)
      .def("edges", &BipartiteGraph::edges)
      .def("labels",
           [](const BipartiteGraph& g, const std::string& layer) {
             return g.labels(layer_arg(layer));
           })
      .def("__repr__", [](const BipartiteGraph& g) {
        return "BipartiteGraph(" + std::to_string(g.n_users()) + " users, " +
               std::to_string(g.n_items()) + " items, " + std::to_string(g.edge_count()) +
               " edges)";
      });

  m.def(
      "load_edge_list",
      [](const std::filesystem::path& path, const std::string& format) {
        return load_edge_list(path, parse_edge_list_format(format));
      },
      py::arg("path"), py::arg("format") = "auto");
  m.def("write_edge_list",
        [](const BipartiteGraph& g, const std::filesystem::path& path, const std::string& format) {
          write_edge_list(g, path, parse_edge_list_format(format));
        },
        py::arg("graph"), py::arg("path"), py::arg("format") = "adjacency");
  m.def("co_occurrence_row",
        [](const BipartiteGraph& g, const std::string& layer, NodeId i) {
          std::vector<std::pair<NodeId, NodeId>> out;
          for (const auto& e : co_occurrence_row(g, layer_arg(layer), i))
            out.emplace_back(e.j, e.count);
          return out;
        },
        py::arg("graph"), py::arg("layer"), py::arg("i"));
  m.def("filter_min_degree",
        [](const BipartiteGraph& g, NodeId min_deg) {
          auto f = filter_min_degree(g, min_deg);
          return py::make_tuple(std::move(f.graph), f.user_map, f.item_map);
        },
        py::arg("graph"), py::arg("min_degree"));
  m.def("holdout_validation_split",
        [](const BipartiteGraph& g, double fraction, std::uint64_t seed) {
          auto s = holdout_validation_split(g, fraction, seed);
          return py::make_tuple(std::move(s.train), std::move(s.heldout));
        },
        py::arg("graph"), py::arg("fraction") = 0.10, py::arg("seed") = 42);

  m.def("gini_impurity", &gini_impurity, py::arg("p1"));
  m.def("delta_gini",
        [](std::int64_t n, std::int64_t ki, std::int64_t kj, std::int64_t co) {
          return delta_gini(decision_sapling_from_counts(n, ki, kj, co));
        },
        py::arg("n_total"), py::arg("k_i"), py::arg("k_j"), py::arg("co"));
  m.def("sapling_value", &sapling_value, py::arg("n_total"), py::arg("k_i"), py::arg("k_j"),
        py::arg("co"));
  m.def("metric_value",
        [](const std::string& metric, std::int64_t n, std::int64_t ki, std::int64_t kj,
           std::int64_t co, double w) { return metric_value(metric_arg(metric), n, ki, kj, co, w); },
        py::arg("metric"), py::arg("n_total"), py::arg("k_i"), py::arg("k_j"), py::arg("co"),
        py::arg("w") = 0.0);
  m.def("decision_sapling",
        [](const BipartiteGraph& g, const std::string& layer, NodeId i, NodeId j) {
          auto ds = decision_sapling(g, layer_arg(layer), i, j);
          py::dict d;
          d["n_total"] = ds.n_total;
          d["bean"] = py::make_tuple(ds.bean_pos, ds.bean_neg);
          d["right_leaf"] = py::make_tuple(ds.right_pos, ds.right_neg);
          d["left_leaf"] = py::make_tuple(ds.left_pos, ds.left_neg);
          d["singular"] = ds.singular();
          if (!ds.singular()) d["delta_gini"] = delta_gini(ds);
          d["sapling_similarity"] =
              sapling_value(ds.n_total, ds.bean_pos, ds.right_total(), ds.right_pos);
          return d;
        },
        py::arg("graph"), py::arg("layer"), py::arg("i"), py::arg("j"));
  m.def("metrics", [] {
    std::vector<std::string> names;
    for (Metric m : all_metrics()) names.emplace_back(metric_name(m));
    return names;
  });

  m.def("similarity_rows",
        [](const BipartiteGraph& g, const std::string& layer, const std::string& metric,
           std::optional<int> topk, int workers) {
          MatrixOptions opts;
          opts.workers = workers;
          SimilarityMatrix mat = topk ? topk_similarity(g, layer_arg(layer), metric_arg(metric),
                                                        *topk, opts)
                                      : materialize_similarity(g, layer_arg(layer),
                                                               metric_arg(metric), opts);
          std::vector<std::vector<std::pair<NodeId, double>>> rows;
          rows.reserve(mat.rows.size());
          for (const auto& row : mat.rows) {
            std::vector<std::pair<NodeId, double>> r;
            r.reserve(row.size());
            for (const auto& e : row) r.emplace_back(e.j, e.value);
            rows.push_back(std::move(r));
          }
          return rows;
        },
        py::arg("graph"), py::arg("layer"), py::arg("metric") = "sapling",
        py::arg("topk") = std::nullopt, py::arg("workers") = 0,
        "Sparse similarity rows as [(j, value), ...] per node.");

  m.def("project_network",
        [](const BipartiteGraph& g, const std::string& layer, const std::string& metric, int k,
           int workers) {
          MatrixOptions opts;
          opts.workers = workers;
          std::vector<std::tuple<NodeId, NodeId, double>> out;
          for (const auto& e : project_network(g, layer_arg(layer), metric_arg(metric), k, opts))
            out.emplace_back(e.src, e.dst, e.weight);
          return out;
        },
        py::arg("graph"), py::arg("layer"), py::arg("metric") = "sapling", py::arg("k") = 4,
        py::arg("workers") = 0);

  m.def("scores",
        [](const BipartiteGraph& g, const std::string& metric, const std::string& mode,
           double gamma, std::optional<int> topk, bool include_self, int workers) {
          BlockedScorer scorer(g, metric_arg(metric), parse_mode(mode),
                               scorer_options(workers, 1024, topk, include_self));
          return scorer.materialize(gamma).rows;
        },
        py::arg("graph"), py::arg("metric") = "sapling", py::arg("mode") = "hybrid",
        py::arg("gamma") = 0.5, py::arg("topk") = std::nullopt, py::arg("include_self") = true,
        py::arg("workers") = 0,
        "Dense per-user score rows (Eq. 11/12/13 of the similarity scoring scheme).");

  m.def("top_n",
        [](const BipartiteGraph& g, const std::string& metric, const std::string& mode,
           double gamma, int n, bool exclude_train, int workers) {
          BlockedScorer scorer(g, metric_arg(metric), parse_mode(mode),
                               scorer_options(workers, 1024, std::nullopt, true));
          const ScoreMode sm = parse_mode(mode);
          std::vector<std::vector<NodeId>> result(static_cast<std::size_t>(g.n_users()));
          std::span<const NodeId> none;
          scorer.for_each_user([&](NodeId u, std::span<const double> su,
                                   std::span<const double> si) {
            thread_local std::vector<double> combo;
            std::span<const double> scores;
            if (sm == ScoreMode::hybrid) {
              combo.resize(su.size());
              for (std::size_t a = 0; a < combo.size(); ++a)
                combo[a] = (1.0 - gamma) * su[a] + gamma * si[a];
              scores = combo;
            } else if (sm == ScoreMode::item_based) {
              scores = si;
            } else {
              scores = su;
            }
            auto top = top_n_row(u, scores,
                                 exclude_train ? g.neighbors(Layer::users, u) : none, n);
            result[static_cast<std::size_t>(u)] = std::move(top.items);
          });
          return result;
        },
        py::arg("graph"), py::arg("metric") = "sapling", py::arg("mode") = "hybrid",
        py::arg("gamma") = 0.5, py::arg("n") = 20, py::arg("exclude_train") = true,
        py::arg("workers") = 0);

  m.def("precision_at_k",
        [](const std::vector<NodeId>& ranked, std::vector<NodeId> relevant, int k) {
          std::sort(relevant.begin(), relevant.end());
          return precision_at_k(ranked, relevant, k);
        },
        py::arg("ranked"), py::arg("relevant"), py::arg("k") = 20);
  m.def("recall_at_k",
        [](const std::vector<NodeId>& ranked, std::vector<NodeId> relevant, int k) {
          std::sort(relevant.begin(), relevant.end());
          return recall_at_k(ranked, relevant, k);
        },
        py::arg("ranked"), py::arg("relevant"), py::arg("k") = 20);
  m.def("ndcg_at_k",
        [](const std::vector<NodeId>& ranked, std::vector<NodeId> relevant, int k) {
          std::sort(relevant.begin(), relevant.end());
          return ndcg_at_k(ranked, relevant, k);
        },
        py::arg("ranked"), py::arg("relevant"), py::arg("k") = 20);
  m.def("mae_rmse",
        [](const std::vector<double>& predicted, const std::vector<double>& actual) {
          return mae_rmse(predicted, actual);
        },
        py::arg("predicted"), py::arg("actual"));

  m.def("tune_gamma",
        [](const BipartiteGraph& train, const std::string& metric, std::vector<double> grid,
           std::uint64_t seed, double fraction, int k, int workers) {
          if (grid.empty()) grid = default_gamma_grid();
          auto r = tune_gamma(train, metric_arg(metric), grid, seed,
                              scorer_options(workers, 1024, std::nullopt, true), fraction, k);
          py::dict d;
          d["best_gamma"] = r.best_gamma;
          d["gamma"] = r.curve.gamma;
          d["ndcg"] = r.curve.ndcg;
          d["evaluated_users"] = r.evaluated_users;
          d["skipped_users"] = r.skipped_users;
          return d;
        },
        py::arg("train"), py::arg("metric") = "sapling", py::arg("grid") = std::vector<double>{},
        py::arg("seed") = 42, py::arg("fraction") = 0.10, py::arg("k") = 20,
        py::arg("workers") = 0);

  m.def("evaluate",
        [](const BipartiteGraph& train, const BipartiteGraph& test, const std::string& metric,
           const std::string& mode, std::optional<double> gamma, bool tune, int k,
           std::uint64_t seed, int workers) {
          BenchmarkConfig cfg;
          cfg.metric = metric_arg(metric);
          cfg.mode = parse_mode(mode);
          cfg.gamma = gamma;
          if (tune) cfg.tune_grid = default_gamma_grid();
          cfg.k = k;
          cfg.seed = seed;
          cfg.scorer.workers = workers;
          auto r = run_benchmark(train, test, cfg);
          py::dict d;
          d["precision"] = r.precision;
          d["recall"] = r.recall;
          d["ndcg"] = r.ndcg;
          d["k"] = r.k;
          d["gamma"] = r.gamma;
          d["evaluated_users"] = r.evaluated_users;
          d["skipped_users"] = r.skipped_users;
          return d;
        },
        py::arg("train"), py::arg("test"), py::arg("metric") = "sapling",
        py::arg("mode") = "hybrid", py::arg("gamma") = std::nullopt, py::arg("tune") = false,
        py::arg("k") = 20, py::arg("seed") = 42, py::arg("workers") = 0);
}
