#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "saplingcf/evaluation.hpp"
#include "saplingcf/io.hpp"
#include "saplingcf/recommender.hpp"
#include "saplingcf/similarity.hpp"
#include "saplingcf/similarity_matrix.hpp"
#include "saplingcf/splits.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace saplingcf;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitData = 3;
constexpr int kExitCompute = 4;

struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

BipartiteGraph load_graph(const fs::path& path, LoadStats* stats = nullptr) {
  if (!fs::exists(path)) throw DataError("file not found: " + path.string());
  try {
    return load_edge_list(path, EdgeListFormat::auto_detect, stats);
  } catch (const std::exception& e) {
    throw DataError(e.what());
  }
}

NodeId resolve_node(const BipartiteGraph& g, Layer layer, const std::string& token) {
  NodeId by_label = g.find_label(layer, token);
  if (by_label >= 0) return by_label;
  try {
    std::size_t used = 0;
    long v = std::stol(token, &used);
    if (used == token.size() && v >= 0 && v < g.n(layer)) return static_cast<NodeId>(v);
  } catch (...) {
  }
  throw DataError("unknown " + std::string(layer_name(layer)) + " node '" + token + "'");
}

std::vector<double> parse_grid(const std::string& s) {
  std::vector<double> grid;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (tok.empty()) continue;
    grid.push_back(std::stod(tok));
  }
  return grid;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

json report_to_json(const EvalReport& r) {
  json j;
  j["config"] = {{"dataset", r.dataset_id}, {"metric", r.metric}, {"mode", r.mode},
                 {"gamma", r.gamma},        {"tuned", r.tuned},   {"k", r.k},
                 {"seed", r.seed},          {"include_self", r.include_self},
                 {"exclude_train_items", r.exclude_train}};
  if (r.topk) j["config"]["topk"] = *r.topk;
  j["data"] = {{"users", r.n_users},
               {"items", r.n_items},
               {"train_edges", r.train_edges},
               {"test_edges", r.test_edges}};
  j["results"] = {{"evaluated_users", r.evaluated_users},
                  {"skipped_users", r.skipped_users},
                  {"precision", r.precision},
                  {"recall", r.recall},
                  {"ndcg", r.ndcg}};
  if (r.tuned) {
    j["gamma_curve"] = json::array();
    for (std::size_t i = 0; i < r.curve.gamma.size(); ++i)
      j["gamma_curve"].push_back({{"gamma", r.curve.gamma[i]}, {"ndcg", r.curve.ndcg[i]}});
  }
  j["timing"] = {{"total_seconds", r.total_seconds},
                 {"workers", r.workers},
                 {"block_size", r.block_size}};
  return j;
}

// ---- run ------------------------------------------------------------------

struct RunArgs {
  std::string train, test, dataset = "dataset";
  std::string metric = "sapling", mode = "hybrid", format = "text";
  double gamma = -1.0;
  bool tune = false;
  std::string grid;
  int k = 20;
  std::uint64_t seed = 42;
  int workers = 0;
  int block_size = 1024;
  int topk = 0;
  bool no_exclude_train = false;
  bool no_include_self = false;
  bool write_rankings = false;
  std::string outdir = "out";
};

int cmd_run(const RunArgs& a, bool gamma_given) {
  BenchmarkConfig cfg;
  cfg.dataset_id = a.dataset;
  cfg.train_path = a.train;
  cfg.test_path = a.test;
  cfg.metric = parse_metric(a.metric);
  cfg.mode = parse_mode(a.mode);
  if (cfg.mode == ScoreMode::hybrid) {
    if (gamma_given && a.tune)
      throw CLI::ValidationError("run", "gamma and tune are mutually exclusive; set exactly one");
    if (!gamma_given && !a.tune)
      throw CLI::ValidationError("run", "hybrid mode needs exactly one of gamma / tune");
    if (a.tune)
      cfg.tune_grid = a.grid.empty() ? default_gamma_grid() : parse_grid(a.grid);
    else
      cfg.gamma = a.gamma;
  } else if (gamma_given || a.tune) {
    throw CLI::ValidationError("run", "gamma / tune only apply to hybrid mode");
  }
  cfg.k = a.k;
  cfg.seed = a.seed;
  cfg.scorer.workers = a.workers;
  cfg.scorer.block_size = a.block_size;
  if (a.topk > 0) cfg.scorer.topk = a.topk;
  cfg.scorer.include_self = !a.no_include_self;
  cfg.exclude_train = !a.no_exclude_train;
  cfg.output_dir = a.outdir;
  cfg.write_rankings = a.write_rankings;

  if (!fs::exists(cfg.train_path)) throw DataError("train file not found: " + a.train);
  if (!fs::exists(cfg.test_path)) throw DataError("test file not found: " + a.test);

  EvalReport report = run_benchmark(cfg);
  if (a.format == "structured") {
    std::cout << report_to_json(report).dump(2) << "\n";
  } else {
    std::cout << "dataset " << report.dataset_id << ", " << report.metric << " " << report.mode;
    if (report.mode == "hybrid") std::cout << " (gamma " << fmt(report.gamma) << ")";
    std::cout << "\n";
    std::cout << "evaluated " << report.evaluated_users << " users (skipped "
              << report.skipped_users << " without test items)\n";
    std::cout << "precision@" << report.k << " = " << fmt(report.precision) << "\n";
    std::cout << "recall@" << report.k << "    = " << fmt(report.recall) << "\n";
    std::cout << "ndcg@" << report.k << "      = " << fmt(report.ndcg) << "\n";
    std::cout << "report: " << (fs::path(a.outdir) / (report.stem() + ".report")).string() << "\n";
  }
  return 0;
}

// ---- tune -----------------------------------------------------------------

int cmd_tune(const std::string& train_path, const std::string& metric_s, const std::string& grid_s,
             std::uint64_t seed, int workers, int block_size, int topk, int k, double fraction,
             const std::string& outdir, const std::string& format) {
  BipartiteGraph train = load_graph(train_path);
  ScorerOptions opts;
  opts.workers = workers;
  opts.block_size = block_size;
  if (topk > 0) opts.topk = topk;
  std::vector<double> grid = grid_s.empty() ? default_gamma_grid() : parse_grid(grid_s);
  TuneResult r = tune_gamma(train, parse_metric(metric_s), grid, seed, opts, fraction, k);

  if (!outdir.empty()) {
    fs::create_directories(outdir);
    fs::path curve_path = fs::path(outdir) / ("tune_" + metric_s + "_curve.csv");
    std::ofstream out(curve_path);
    out << "gamma,ndcg\n";
    out.precision(17);
    for (std::size_t i = 0; i < r.curve.gamma.size(); ++i)
      out << r.curve.gamma[i] << ',' << r.curve.ndcg[i] << '\n';
  }
  if (format == "structured") {
    json j;
    j["best_gamma"] = r.best_gamma;
    j["seed"] = r.seed;
    j["evaluated_users"] = r.evaluated_users;
    j["skipped_users"] = r.skipped_users;
    j["curve"] = json::array();
    for (std::size_t i = 0; i < r.curve.gamma.size(); ++i)
      j["curve"].push_back({{"gamma", r.curve.gamma[i]}, {"ndcg", r.curve.ndcg[i]}});
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << "best gamma = " << fmt(r.best_gamma) << " (validation ndcg@" << k << ", seed "
              << seed << ", " << r.evaluated_users << " users, " << r.skipped_users
              << " skipped)\n";
    for (std::size_t i = 0; i < r.curve.gamma.size(); ++i)
      std::cout << "  gamma " << fmt(r.curve.gamma[i]) << " -> " << fmt(r.curve.ndcg[i]) << "\n";
  }
  return 0;
}

// ---- similarity -----------------------------------------------------------

int cmd_similarity(const std::string& train_path, const std::string& layer_s,
                   const std::string& metric_s, int topk, const std::string& output, bool binary,
                   int workers, int dense_cap) {
  BipartiteGraph g = load_graph(train_path);
  Layer layer = parse_layer(layer_s);
  Metric metric = parse_metric(metric_s);
  MatrixOptions opts;
  opts.workers = workers;
  if (dense_cap > 0) opts.dense_cap = dense_cap;
  SimilarityMatrix m = topk > 0 ? topk_similarity(g, layer, metric, topk, opts)
                                : materialize_similarity(g, layer, metric, opts);
  if (binary)
    write_similarity_binary(m, output);
  else
    write_similarity_csv(m, output);
  std::cerr << "wrote " << m.entry_count() << " entries for " << m.n << " nodes\n";
  std::cout << output << "\n";
  return 0;
}

// ---- explain --------------------------------------------------------------

int cmd_explain(const std::string& train_path, const std::string& layer_s, const std::string& a,
                const std::string& b, const std::string& format) {
  BipartiteGraph g = load_graph(train_path);
  Layer layer = parse_layer(layer_s);
  NodeId na = resolve_node(g, layer, a);
  NodeId nb = resolve_node(g, layer, b);
  if (na == nb) throw CLI::ValidationError("explain", "need two distinct nodes");
  DecisionSapling ds = decision_sapling(g, layer, na, nb);

  const bool singular = ds.singular();
  double dgi = 0.0;
  if (!singular) dgi = delta_gini(ds);
  double value = sapling_value(ds.n_total, ds.bean_pos, ds.right_total(), ds.right_pos);
  const std::int64_t lhs = ds.right_pos * ds.n_total;
  const std::int64_t rhs = ds.bean_pos * ds.right_total();

  std::string note;
  if (singular)
    note = "singular sapling (degree 0 or N); similarity defined as 0";
  else if (ds.right_neg == 0 && ds.left_pos == 0)
    note = "pure leaves: j's links pin down i's links exactly";
  else if (lhs == rhs)
    note = "no information gained: leaf fractions equal the bean fraction";

  if (format == "structured") {
    json j;
    j["layer"] = layer_name(layer);
    j["node_a"] = na;
    j["node_b"] = nb;
    if (!g.labels(layer).empty()) {
      j["label_a"] = g.labels(layer)[static_cast<std::size_t>(na)];
      j["label_b"] = g.labels(layer)[static_cast<std::size_t>(nb)];
    }
    j["n_total"] = ds.n_total;
    j["bean"] = {{"pos", ds.bean_pos}, {"neg", ds.bean_neg}, {"frac", ds.bean_frac()}};
    j["right_leaf"] = {{"pos", ds.right_pos},
                       {"neg", ds.right_neg},
                       {"frac", singular ? 0.0 : ds.right_frac()},
                       {"weight", ds.f_right()}};
    j["left_leaf"] = {{"pos", ds.left_pos},
                      {"neg", ds.left_neg},
                      {"frac", singular ? 0.0 : ds.left_frac()},
                      {"weight", ds.f_left()}};
    j["singular"] = singular;
    if (!singular) {
      j["delta_gini"] = dgi;
      j["sign_rule"] = {{"co_times_n", lhs}, {"ki_times_kj", rhs},
                        {"sign", lhs > rhs ? "+" : (lhs < rhs ? "-" : "0")}};
    }
    j["sapling_similarity"] = value;
    if (!note.empty()) j["note"] = note;
    std::cout << j.dump(2) << "\n";
  } else {
    auto pct = [](double v) { return fmt(100.0 * v) + std::string("%"); };
    std::cout << "decision sapling on layer " << layer_name(layer) << ": node " << na;
    if (!g.labels(layer).empty()) std::cout << " (" << g.labels(layer)[na] << ")";
    std::cout << " with respect to node " << nb;
    if (!g.labels(layer).empty()) std::cout << " (" << g.labels(layer)[nb] << ")";
    std::cout << "\n";
    std::cout << "candidates N = " << ds.n_total << "\n";
    std::cout << "bean:       " << ds.bean_pos << " in / " << ds.bean_neg << " out  ("
              << pct(ds.bean_frac()) << " in)\n";
    std::cout << "right leaf: " << ds.right_pos << " in / " << ds.right_neg << " out  ("
              << (singular ? "-" : pct(ds.right_frac())) << " in, weight " << pct(ds.f_right())
              << ")\n";
    std::cout << "left leaf:  " << ds.left_pos << " in / " << ds.left_neg << " out  ("
              << (singular ? "-" : pct(ds.left_frac())) << " in, weight " << pct(ds.f_left())
              << ")\n";
    if (!singular) {
      std::cout << "gini impurity: bean " << fmt(gini_impurity(ds.bean_frac())) << ", right "
                << fmt(gini_impurity(ds.right_frac())) << ", left "
                << fmt(gini_impurity(ds.left_frac())) << "\n";
      std::cout << "delta_gini = " << fmt(dgi) << "\n";
      std::cout << "sign rule: CO*N = " << lhs << (lhs >= rhs ? " >= " : " < ")
                << "k_i*k_j = " << rhs << "  ->  " << (lhs > rhs ? "positive" : (lhs < rhs ? "negative" : "zero"))
                << "\n";
    }
    std::cout << "sapling similarity = " << (value > 0 ? "+" : "") << fmt(value) << "\n";
    if (!note.empty()) std::cout << "note: " << note << "\n";
  }
  return 0;
}

// ---- project ----------------------------------------------------------------

int cmd_project(const std::string& train_path, const std::string& layer_s,
                const std::string& metric_s, int k, const std::string& output, int workers) {
  BipartiteGraph g = load_graph(train_path);
  Layer layer = parse_layer(layer_s);
  MatrixOptions opts;
  opts.workers = workers;
  auto edges = project_network(g, layer, parse_metric(metric_s), k, opts);
  write_projection_csv(edges, output, &g, layer);
  if (edges.empty()) std::cerr << "warning: projection is empty (no nonzero similarities)\n";
  std::cerr << "projected " << g.n(layer) << " nodes, " << edges.size() << " directed edges\n";
  std::cout << output << "\n";
  return 0;
}

// ---- split ------------------------------------------------------------------

int cmd_split(const std::string& input, double fraction, std::uint64_t seed,
              const std::string& out_train, const std::string& out_heldout) {
  BipartiteGraph g = load_graph(input);
  SplitPair split = holdout_validation_split(g, fraction, seed);
  write_edge_list(split.train, out_train);
  write_edge_list(split.heldout, out_heldout);
  std::cerr << "split " << g.edge_count() << " edges into " << split.train.edge_count()
            << " train / " << split.heldout.edge_count() << " heldout (seed " << seed << ")\n";
  std::cout << out_train << "\n" << out_heldout << "\n";
  return 0;
}

// ---- ingest -----------------------------------------------------------------

int cmd_ingest(const std::string& input, const std::string& kind, double rca_threshold,
               double min_rating, int min_degree, const std::string& output,
               const std::string& out_format, bool write_labels, const std::string& format) {
  if (!fs::exists(input)) throw DataError("input file not found: " + input);
  BipartiteGraph g;
  try {
    if (kind == "export-volumes") {
      g = rca_binarize(load_export_volumes(input), rca_threshold);
    } else if (kind == "ratings") {
      g = threshold_ratings(load_ratings(input), min_rating);
    } else {
      throw CLI::ValidationError("ingest", "kind must be export-volumes or ratings");
    }
  } catch (const CLI::ValidationError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw DataError(e.what());
  } catch (const std::runtime_error& e) {
    throw DataError(e.what());
  }
  if (min_degree > 0) {
    FilteredGraph f = filter_min_degree(g, min_degree);
    std::cerr << "degree filter kept " << f.graph.n_users() << "/" << g.n_users() << " users, "
              << f.graph.n_items() << "/" << g.n_items() << " items\n";
    g = std::move(f.graph);
  }
  write_edge_list(g, output, parse_edge_list_format(out_format), write_labels);
  if (format == "structured") {
    json j{{"output", output},
           {"users", g.n_users()},
           {"items", g.n_items()},
           {"edges", g.edge_count()}};
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << "users=" << g.n_users() << " items=" << g.n_items() << " edges=" << g.edge_count()
              << " -> " << output << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"saplingcf: memory-based collaborative filtering on unweighted bipartite networks"};
  app.require_subcommand(1);

  std::string format = "text";

  // run
  RunArgs run;
  auto* run_cmd = app.add_subcommand("run", "full pipeline: load split, score, evaluate, report");
  run_cmd->set_config("--config", "", "config file (key = value; flags override)");
  run_cmd->add_option("--train", run.train, "train edge list")->required();
  run_cmd->add_option("--test", run.test, "test edge list")->required();
  run_cmd->add_option("--dataset", run.dataset, "dataset id used in artifact names");
  run_cmd->add_option("--metric", run.metric, "similarity metric");
  run_cmd->add_option("--mode", run.mode, "user|item|hybrid|pa");
  auto* gamma_opt = run_cmd->add_option("--gamma", run.gamma, "hybrid weight in [0,1]");
  run_cmd->add_flag("--tune", run.tune, "pick gamma on a seeded validation split");
  run_cmd->add_option("--grid", run.grid, "comma-separated gamma grid for --tune");
  run_cmd->add_option("--k", run.k, "ranking cutoff");
  run_cmd->add_option("--seed", run.seed, "seed for splits and reports");
  run_cmd->add_option("--workers", run.workers, "worker threads (0 = all cores)");
  run_cmd->add_option("--block-size", run.block_size, "users per scoring block");
  run_cmd->add_option("--topk", run.topk, "top-k similarity filtering before scoring");
  run_cmd->add_flag("--no-exclude-train", run.no_exclude_train,
                    "rank train items too (benchmark convention keeps them out)");
  run_cmd->add_flag("--no-include-self", run.no_include_self,
                    "drop the l = i term from the score sums");
  run_cmd->add_flag("--write-rankings", run.write_rankings, "write per-user ranked lists");
  run_cmd->add_option("--outdir", run.outdir, "artifact directory");
  run_cmd->add_option("--format", run.format, "text|structured")
      ->check(CLI::IsMember({"text", "structured"}));

  // tune
  std::string t_train, t_metric = "sapling", t_grid, t_outdir;
  std::uint64_t t_seed = 42;
  int t_workers = 0, t_block = 1024, t_topk = 0, t_k = 20;
  double t_fraction = 0.10;
  auto* tune_cmd = app.add_subcommand("tune", "gamma grid search on a seeded validation split");
  tune_cmd->add_option("--train", t_train, "train edge list")->required();
  tune_cmd->add_option("--metric", t_metric, "similarity metric");
  tune_cmd->add_option("--grid", t_grid, "comma-separated gamma grid");
  tune_cmd->add_option("--seed", t_seed, "split seed");
  tune_cmd->add_option("--workers", t_workers, "worker threads");
  tune_cmd->add_option("--block-size", t_block, "users per scoring block");
  tune_cmd->add_option("--topk", t_topk, "top-k similarity filtering");
  tune_cmd->add_option("--k", t_k, "ranking cutoff");
  tune_cmd->add_option("--fraction", t_fraction, "validation holdout fraction");
  tune_cmd->add_option("--outdir", t_outdir, "write the gamma curve CSV here");
  tune_cmd->add_option("--format", format, "text|structured")
      ->check(CLI::IsMember({"text", "structured"}));

  // similarity
  std::string s_train, s_layer = "users", s_metric = "sapling", s_output;
  int s_topk = 0, s_workers = 0, s_cap = 0;
  bool s_binary = false;
  auto* sim_cmd = app.add_subcommand("similarity", "export a similarity matrix");
  sim_cmd->add_option("--train", s_train, "train edge list")->required();
  sim_cmd->add_option("--layer", s_layer, "users|items");
  sim_cmd->add_option("--metric", s_metric, "similarity metric");
  sim_cmd->add_option("--topk", s_topk, "keep only the k largest |value| per row");
  sim_cmd->add_option("--output", s_output, "output path")->required();
  sim_cmd->add_flag("--binary", s_binary, "write the binary row-block format instead of CSV");
  sim_cmd->add_option("--workers", s_workers, "worker threads");
  sim_cmd->add_option("--dense-cap", s_cap, "full materialization cap for signed metrics");

  // explain
  std::string e_train, e_layer = "users", e_a, e_b;
  auto* explain_cmd = app.add_subcommand("explain", "decision sapling behind one similarity value");
  explain_cmd->add_option("--train", e_train, "train edge list")->required();
  explain_cmd->add_option("--layer", e_layer, "users|items");
  explain_cmd->add_option("node_a", e_a, "first node (index or label)")->required();
  explain_cmd->add_option("node_b", e_b, "second node (index or label)")->required();
  explain_cmd->add_option("--format", format, "text|structured")
      ->check(CLI::IsMember({"text", "structured"}));

  // project
  std::string p_train, p_layer = "users", p_metric = "sapling", p_output;
  int p_k = 4, p_workers = 0;
  auto* project_cmd = app.add_subcommand("project", "signed top-k one-mode projection");
  project_cmd->add_option("--train", p_train, "train edge list")->required();
  project_cmd->add_option("--layer", p_layer, "users|items");
  project_cmd->add_option("--metric", p_metric, "similarity metric");
  project_cmd->add_option("--k", p_k, "out-edges per node");
  project_cmd->add_option("--output", p_output, "output CSV")->required();
  project_cmd->add_option("--workers", p_workers, "worker threads");

  // split
  std::string sp_input, sp_train, sp_heldout;
  double sp_fraction = 0.10;
  std::uint64_t sp_seed = 42;
  auto* split_cmd = app.add_subcommand("split", "seeded per-user holdout split");
  split_cmd->add_option("--input", sp_input, "edge list to split")->required();
  split_cmd->add_option("--fraction", sp_fraction, "heldout fraction per user (ceil)");
  split_cmd->add_option("--seed", sp_seed, "seed");
  split_cmd->add_option("--out-train", sp_train, "train output")->required();
  split_cmd->add_option("--out-heldout", sp_heldout, "heldout output")->required();

  // ingest
  std::string i_input, i_kind, i_output, i_format_out = "adjacency";
  double i_rca = 1.0, i_min_rating = 3.0;
  int i_min_degree = 0;
  bool i_labels = false;
  auto* ingest_cmd = app.add_subcommand("ingest", "build an edge list from raw CSV data");
  ingest_cmd->add_option("--input", i_input, "CSV input")->required();
  ingest_cmd->add_option("--kind", i_kind, "export-volumes|ratings")->required();
  ingest_cmd->add_option("--rca-threshold", i_rca, "RCA binarization threshold");
  ingest_cmd->add_option("--min-rating", i_min_rating, "rating threshold");
  ingest_cmd->add_option("--min-degree", i_min_degree, "iterative degree filter");
  ingest_cmd->add_option("--output", i_output, "edge list output")->required();
  ingest_cmd->add_option("--format-out", i_format_out, "adjacency|pairs");
  ingest_cmd->add_flag("--write-labels", i_labels, "write label sidecar files");
  ingest_cmd->add_option("--format", format, "text|structured")
      ->check(CLI::IsMember({"text", "structured"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  }

  try {
    if (run_cmd->parsed()) return cmd_run(run, gamma_opt->count() > 0);
    if (tune_cmd->parsed())
      return cmd_tune(t_train, t_metric, t_grid, t_seed, t_workers, t_block, t_topk, t_k,
                      t_fraction, t_outdir, format);
    if (sim_cmd->parsed())
      return cmd_similarity(s_train, s_layer, s_metric, s_topk, s_output, s_binary, s_workers,
                            s_cap);
    if (explain_cmd->parsed()) return cmd_explain(e_train, e_layer, e_a, e_b, format);
    if (project_cmd->parsed())
      return cmd_project(p_train, p_layer, p_metric, p_k, p_output, p_workers);
    if (split_cmd->parsed()) return cmd_split(sp_input, sp_fraction, sp_seed, sp_train, sp_heldout);
    if (ingest_cmd->parsed())
      return cmd_ingest(i_input, i_kind, i_rca, i_min_rating, i_min_degree, i_output, i_format_out,
                        i_labels, format);
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const DataError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitCompute;
  }
  return 0;
}
