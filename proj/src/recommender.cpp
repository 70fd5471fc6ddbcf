#include "saplingcf/recommender.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "saplingcf/parallel.hpp"

namespace saplingcf {

const char* mode_name(ScoreMode m) {
  switch (m) {
    case ScoreMode::user_based: return "user";
    case ScoreMode::item_based: return "item";
    case ScoreMode::hybrid: return "hybrid";
    case ScoreMode::preferential_attachment: return "pa";
  }
  return "?";
}

ScoreMode parse_mode(const std::string& s) {
  if (s == "user" || s == "user_based" || s == "ub") return ScoreMode::user_based;
  if (s == "item" || s == "item_based" || s == "ib") return ScoreMode::item_based;
  if (s == "hybrid" || s == "sscf") return ScoreMode::hybrid;
  if (s == "pa" || s == "preferential_attachment") return ScoreMode::preferential_attachment;
  throw std::invalid_argument("unknown mode '" + s + "' (expected user|item|hybrid|pa)");
}

ScoreMatrix score_user_based(const SimilarityMatrix& b_user, const BipartiteGraph& g,
                             bool include_self) {
  if (b_user.layer != Layer::users || b_user.n != g.n_users())
    throw std::invalid_argument("user similarity matrix does not match the graph");
  ScoreMatrix s;
  s.n_users = g.n_users();
  s.n_items = g.n_items();
  s.mode = ScoreMode::user_based;
  s.metric = b_user.metric;
  s.rows.assign(static_cast<std::size_t>(s.n_users),
                std::vector<double>(static_cast<std::size_t>(s.n_items), 0.0));
  for (NodeId i = 0; i < s.n_users; ++i) {
    auto& row = s.rows[static_cast<std::size_t>(i)];
    double den = 0.0;
    for (const auto& e : b_user.rows[static_cast<std::size_t>(i)]) {
      if (!include_self && e.j == i) continue;
      den += std::abs(e.value);
      for (NodeId alpha : g.neighbors(Layer::users, e.j))
        row[static_cast<std::size_t>(alpha)] += e.value;
    }
    if (den > 0.0)
      for (double& v : row) v /= den;
    else
      std::fill(row.begin(), row.end(), 0.0);
  }
  return s;
}

ScoreMatrix score_item_based(const SimilarityMatrix& b_item, const BipartiteGraph& g,
                             bool include_self) {
  if (b_item.layer != Layer::items || b_item.n != g.n_items())
    throw std::invalid_argument("item similarity matrix does not match the graph");
  ScoreMatrix s;
  s.n_users = g.n_users();
  s.n_items = g.n_items();
  s.mode = ScoreMode::item_based;
  s.metric = b_item.metric;
  s.rows.assign(static_cast<std::size_t>(s.n_users),
                std::vector<double>(static_cast<std::size_t>(s.n_items), 0.0));
  std::vector<double> den(static_cast<std::size_t>(s.n_items), 0.0);
  for (NodeId alpha = 0; alpha < s.n_items; ++alpha)
    for (const auto& e : b_item.rows[static_cast<std::size_t>(alpha)]) {
      if (!include_self && e.j == alpha) continue;
      den[static_cast<std::size_t>(alpha)] += std::abs(e.value);
    }
  for (NodeId i = 0; i < s.n_users; ++i) {
    auto& row = s.rows[static_cast<std::size_t>(i)];
    for (NodeId alpha = 0; alpha < s.n_items; ++alpha) {
      if (den[static_cast<std::size_t>(alpha)] == 0.0) continue;
      double num = 0.0;
      for (NodeId lambda : g.neighbors(Layer::users, i)) {
        if (!include_self && lambda == alpha) continue;
        num += b_item.value(alpha, lambda);
      }
      row[static_cast<std::size_t>(alpha)] = num / den[static_cast<std::size_t>(alpha)];
    }
  }
  return s;
}

ScoreMatrix score_hybrid(const ScoreMatrix& s_user, const ScoreMatrix& s_item, double gamma) {
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw std::invalid_argument("gamma must lie in [0,1]");
  if (s_user.n_users != s_item.n_users || s_user.n_items != s_item.n_items)
    throw std::invalid_argument("score matrix dimensions differ");
  ScoreMatrix s = s_user;
  s.mode = ScoreMode::hybrid;
  s.gamma = gamma;
  for (std::size_t i = 0; i < s.rows.size(); ++i)
    for (std::size_t a = 0; a < s.rows[i].size(); ++a)
      s.rows[i][a] = (1.0 - gamma) * s_user.rows[i][a] + gamma * s_item.rows[i][a];
  return s;
}

ScoreMatrix preferential_attachment_scores(const BipartiteGraph& g) {
  ScoreMatrix s;
  s.n_users = g.n_users();
  s.n_items = g.n_items();
  s.mode = ScoreMode::preferential_attachment;
  s.rows.assign(static_cast<std::size_t>(s.n_users),
                std::vector<double>(static_cast<std::size_t>(s.n_items), 0.0));
  for (NodeId i = 0; i < s.n_users; ++i) {
    auto ki = static_cast<double>(g.degree(Layer::users, i));
    for (NodeId a = 0; a < s.n_items; ++a)
      s.rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(a)] =
          ki * static_cast<double>(g.degree(Layer::items, a));
  }
  return s;
}

RankedList top_n_row(NodeId user, std::span<const double> scores,
                     std::span<const NodeId> exclude, int n) {
  if (n < 1) throw std::invalid_argument("top-n requires n >= 1");
  RankedList out;
  out.user = user;
  // bounded selection: `worst` is the entry that loses first (lowest score,
  // then largest index)
  struct Cand {
    double score;
    NodeId item;
  };
  std::vector<Cand> heap;  // min-heap on (score asc, index desc)
  auto worse = [](const Cand& a, const Cand& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.item < b.item;
  };
  heap.reserve(static_cast<std::size_t>(n) + 1);
  std::size_t ex = 0;
  for (NodeId a = 0; a < static_cast<NodeId>(scores.size()); ++a) {
    while (ex < exclude.size() && exclude[ex] < a) ++ex;
    if (ex < exclude.size() && exclude[ex] == a) continue;
    Cand c{scores[static_cast<std::size_t>(a)], a};
    if (heap.size() < static_cast<std::size_t>(n)) {
      heap.push_back(c);
      std::push_heap(heap.begin(), heap.end(), worse);
    } else if (worse(c, heap.front())) {
      std::pop_heap(heap.begin(), heap.end(), worse);
      heap.back() = c;
      std::push_heap(heap.begin(), heap.end(), worse);
    }
  }
  std::sort(heap.begin(), heap.end(), [](const Cand& a, const Cand& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.item < b.item;
  });
  out.items.reserve(heap.size());
  out.scores.reserve(heap.size());
  for (const Cand& c : heap) {
    out.items.push_back(c.item);
    out.scores.push_back(c.score);
  }
  return out;
}

std::vector<RankedList> top_n(const ScoreMatrix& s, const BipartiteGraph& train, int n,
                              bool exclude_train) {
  if (s.n_users != train.n_users() || s.n_items != train.n_items())
    throw std::invalid_argument("score matrix does not match the train graph");
  std::vector<RankedList> out;
  out.reserve(static_cast<std::size_t>(s.n_users));
  std::span<const NodeId> empty;
  for (NodeId u = 0; u < s.n_users; ++u)
    out.push_back(top_n_row(u, s.rows[static_cast<std::size_t>(u)],
                            exclude_train ? train.neighbors(Layer::users, u) : empty, n));
  return out;
}

BlockedScorer::BlockedScorer(const BipartiteGraph& train, Metric metric, ScoreMode mode,
                             const ScorerOptions& opts)
    : train_(&train), metric_(metric), mode_(mode), opts_(opts) {
  want_user_ = mode == ScoreMode::user_based || mode == ScoreMode::hybrid ||
               mode == ScoreMode::preferential_attachment;
  want_item_ = mode == ScoreMode::item_based || mode == ScoreMode::hybrid;
  if (mode == ScoreMode::preferential_attachment) return;
  if (opts_.topk) {
    build_topk_sides();
  } else {
    if (want_user_) build_user_side();
    if (want_item_) build_item_side();
  }
}

void BlockedScorer::build_user_side() {
  user_engine_.emplace(*train_, Layer::users, metric_);
  t_item_.assign(static_cast<std::size_t>(train_->n_items()), 0.0);
  for (NodeId l = 0; l < train_->n_users(); ++l) {
    const double al = user_engine_->background_factor(l);
    if (al == 0.0) continue;
    for (NodeId a : train_->neighbors(Layer::users, l)) t_item_[static_cast<std::size_t>(a)] += al;
  }
}

void BlockedScorer::build_item_side() {
  item_engine_.emplace(*train_, Layer::items, metric_);
  const NodeId n = train_->n_items();
  item_rows_.assign(static_cast<std::size_t>(n), {});
  item_denom_.assign(static_cast<std::size_t>(n), 0.0);
  item_diag_raw_.assign(static_cast<std::size_t>(n), 0.0);
  item_a_.assign(static_cast<std::size_t>(n), 0.0);
  for (NodeId a = 0; a < n; ++a) item_a_[static_cast<std::size_t>(a)] = item_engine_->background_factor(a);

  const bool symmetric = metric_is_symmetric(metric_);
  const int workers = resolve_workers(opts_.workers);
  std::vector<SimilarityEngine::RowScratch> scratch(static_cast<std::size_t>(workers));
  for (auto& s : scratch) s = item_engine_->make_scratch();
  parallel_chunks(n, workers, 64, [&](int w, std::int64_t begin, std::int64_t end) {
    std::vector<SimilarityEngine::Entry> entries;
    for (std::int64_t li = begin; li < end; ++li) {
      auto lambda = static_cast<NodeId>(li);
      auto stats = item_engine_->touched_row(lambda, scratch[static_cast<std::size_t>(w)], entries,
                                             /*sorted=*/false);
      item_denom_[static_cast<std::size_t>(li)] = item_engine_->row_abs_sum(lambda, stats);
      const double a_lambda = item_a_[static_cast<std::size_t>(li)];
      const double k_lambda = static_cast<double>(item_engine_->degree_of(lambda));
      auto& row = item_rows_[static_cast<std::size_t>(li)];
      row.reserve(entries.size());
      for (const auto& e : entries) {
        // store B_{beta,lambda}; only ProbS needs the reorientation
        double v = e.value;
        if (!symmetric)
          v = e.value * static_cast<double>(item_engine_->degree_of(e.j)) / k_lambda;
        if (e.j == lambda) item_diag_raw_[static_cast<std::size_t>(li)] = v;
        row.push_back({e.j, v + item_a_[static_cast<std::size_t>(e.j)] * a_lambda});
      }
    }
  });
}

void BlockedScorer::build_topk_sides() {
  const int k = *opts_.topk;
  MatrixOptions mo;
  mo.workers = opts_.workers;
  if (want_user_) topk_user_ = topk_similarity(*train_, Layer::users, metric_, k, mo);
  if (want_item_) {
    SimilarityMatrix item = topk_similarity(*train_, Layer::items, metric_, k, mo);
    const NodeId n = train_->n_items();
    topk_item_denom_.assign(static_cast<std::size_t>(n), 0.0);
    topk_item_diag_.assign(static_cast<std::size_t>(n), 0.0);
    // transpose for per-user column walks, remembering row denominators
    SimilarityMatrix t;
    t.layer = Layer::items;
    t.n = n;
    t.metric = metric_;
    t.truncation = item.truncation;
    t.rows.assign(static_cast<std::size_t>(n), {});
    for (NodeId a = 0; a < n; ++a) {
      for (const auto& e : item.rows[static_cast<std::size_t>(a)]) {
        if (e.j == a) topk_item_diag_[static_cast<std::size_t>(a)] = e.value;
        topk_item_denom_[static_cast<std::size_t>(a)] += std::abs(e.value);
        t.rows[static_cast<std::size_t>(e.j)].push_back({a, e.value});
      }
    }
    topk_item_t_ = std::move(t);
  }
}

void BlockedScorer::user_row(NodeId i, SimilarityEngine::RowScratch& scratch,
                             std::vector<SimilarityEngine::Entry>& entries,
                             std::span<double> out) const {
  std::fill(out.begin(), out.end(), 0.0);
  if (mode_ == ScoreMode::preferential_attachment) {
    auto ki = static_cast<double>(train_->degree(Layer::users, i));
    for (NodeId a = 0; a < train_->n_items(); ++a)
      out[static_cast<std::size_t>(a)] = ki * static_cast<double>(train_->degree(Layer::items, a));
    return;
  }

  if (topk_user_) {
    double den = 0.0;
    for (const auto& e : topk_user_->rows[static_cast<std::size_t>(i)]) {
      if (!opts_.include_self && e.j == i) continue;
      den += std::abs(e.value);
      for (NodeId a : train_->neighbors(Layer::users, e.j))
        out[static_cast<std::size_t>(a)] += e.value;
    }
    if (den > 0.0)
      for (double& v : out) v /= den;
    else
      std::fill(out.begin(), out.end(), 0.0);
    return;
  }

  const auto& engine = *user_engine_;
  auto stats = engine.touched_row(i, scratch, entries, /*sorted=*/false);
  const double ai = engine.background_factor(i);
  double den = engine.row_abs_sum(i, stats);
  for (const auto& e : entries) {
    if (!opts_.include_self && e.j == i) {
      den -= std::abs(e.value);
      continue;
    }
    const double btil = e.value + ai * engine.background_factor(e.j);
    for (NodeId a : train_->neighbors(Layer::users, e.j))
      out[static_cast<std::size_t>(a)] += btil;
  }
  if (ai != 0.0) {
    for (std::size_t a = 0; a < out.size(); ++a) out[a] -= ai * t_item_[a];
    if (!opts_.include_self) {
      // the background completion replaced the skipped self term; undo it
      for (NodeId a : train_->neighbors(Layer::users, i))
        out[static_cast<std::size_t>(a)] += ai * ai;
    }
  }
  if (den > 0.0)
    for (double& v : out) v /= den;
  else
    std::fill(out.begin(), out.end(), 0.0);
}

void BlockedScorer::item_row(NodeId i, std::span<double> out) const {
  std::fill(out.begin(), out.end(), 0.0);

  if (topk_item_t_) {
    for (NodeId lambda : train_->neighbors(Layer::users, i))
      for (const auto& e : topk_item_t_->rows[static_cast<std::size_t>(lambda)])
        out[static_cast<std::size_t>(e.j)] += e.value;
    if (!opts_.include_self)
      for (NodeId lambda : train_->neighbors(Layer::users, i))
        out[static_cast<std::size_t>(lambda)] -= topk_item_diag_[static_cast<std::size_t>(lambda)];
    for (std::size_t a = 0; a < out.size(); ++a) {
      double den = topk_item_denom_[a];
      if (!opts_.include_self) den -= std::abs(topk_item_diag_[a]);
      out[a] = den > 0.0 ? out[a] / den : 0.0;
    }
    return;
  }

  double t_i = 0.0;
  for (NodeId lambda : train_->neighbors(Layer::users, i)) {
    t_i += item_a_[static_cast<std::size_t>(lambda)];
    for (const auto& e : item_rows_[static_cast<std::size_t>(lambda)])
      out[static_cast<std::size_t>(e.j)] += e.value;
  }
  if (!opts_.include_self) {
    for (NodeId lambda : train_->neighbors(Layer::users, i))
      out[static_cast<std::size_t>(lambda)] -= item_diag_raw_[static_cast<std::size_t>(lambda)];
  }
  const bool background = item_engine_->background_factor_sum() != 0.0;
  for (std::size_t a = 0; a < out.size(); ++a) {
    double num = out[a];
    if (background) num -= item_a_[a] * t_i;
    double den = item_denom_[a];
    if (!opts_.include_self) den -= std::abs(item_diag_raw_[a]);
    out[a] = den > 0.0 ? num / den : 0.0;
  }
}

void BlockedScorer::for_each_user(const RowFn& fn) const {
  const NodeId n_users = train_->n_users();
  const auto n_items = static_cast<std::size_t>(train_->n_items());
  const int workers = resolve_workers(opts_.workers);
  const NodeId grain = std::max<NodeId>(1, opts_.block_size);

  std::vector<SimilarityEngine::RowScratch> scratch(static_cast<std::size_t>(workers));
  if (user_engine_)
    for (auto& s : scratch) s = user_engine_->make_scratch();

  parallel_chunks(n_users, workers, grain, [&](int w, std::int64_t begin, std::int64_t end) {
    std::vector<double> su(want_user_ ? n_items : 0);
    std::vector<double> si(want_item_ ? n_items : 0);
    std::vector<SimilarityEngine::Entry> entries;
    for (std::int64_t u = begin; u < end; ++u) {
      auto id = static_cast<NodeId>(u);
      if (want_user_) user_row(id, scratch[static_cast<std::size_t>(w)], entries, su);
      if (want_item_) item_row(id, si);
      fn(id, want_user_ ? std::span<const double>(su) : std::span<const double>(),
         want_item_ ? std::span<const double>(si) : std::span<const double>());
    }
  });
}

ScoreMatrix BlockedScorer::materialize(double gamma) const {
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw std::invalid_argument("gamma must lie in [0,1]");
  ScoreMatrix s;
  s.n_users = n_users();
  s.n_items = n_items();
  s.mode = mode_;
  s.metric = metric_;
  s.gamma = gamma;
  s.rows.assign(static_cast<std::size_t>(s.n_users), {});
  for_each_user([&](NodeId u, std::span<const double> su, std::span<const double> si) {
    auto& row = s.rows[static_cast<std::size_t>(u)];
    row.resize(static_cast<std::size_t>(s.n_items));
    for (std::size_t a = 0; a < row.size(); ++a) {
      double vu = su.empty() ? 0.0 : su[a];
      double vi = si.empty() ? 0.0 : si[a];
      switch (mode_) {
        case ScoreMode::user_based:
        case ScoreMode::preferential_attachment:
          row[a] = vu;
          break;
        case ScoreMode::item_based:
          row[a] = vi;
          break;
        case ScoreMode::hybrid:
          row[a] = (1.0 - gamma) * vu + gamma * vi;
          break;
      }
    }
  });
  return s;
}

std::vector<double> predict_ratings(const BipartiteGraph& binarized_train, Metric metric,
                                    const Ratings& train_ratings,
                                    std::span<const std::pair<NodeId, NodeId>> targets,
                                    Layer mode, int workers) {
  if (binarized_train.n_users() != train_ratings.n_users ||
      binarized_train.n_items() != train_ratings.n_items)
    throw std::invalid_argument("binarized graph and ratings dimensions differ");
  for (const auto& [u, a] : targets)
    if (u < 0 || u >= train_ratings.n_users || a < 0 || a >= train_ratings.n_items)
      throw std::out_of_range("rating target out of range");

  const double fallback = train_ratings.global_mean();
  std::vector<double> out(targets.size(), fallback);

  // group targets by the node whose similarity row is needed
  std::map<NodeId, std::vector<std::size_t>> groups;
  for (std::size_t t = 0; t < targets.size(); ++t)
    groups[mode == Layer::users ? targets[t].first : targets[t].second].push_back(t);
  std::vector<std::pair<NodeId, std::vector<std::size_t>>> group_list(groups.begin(), groups.end());

  SimilarityEngine engine(binarized_train, mode, metric);
  const int nworkers = resolve_workers(workers);
  std::vector<SimilarityEngine::RowScratch> scratch(static_cast<std::size_t>(nworkers));
  for (auto& s : scratch) s = engine.make_scratch();

  parallel_chunks(static_cast<std::int64_t>(group_list.size()), nworkers, 1,
                  [&](int w, std::int64_t begin, std::int64_t end) {
    std::vector<SimilarityEngine::Entry> entries;
    std::vector<double> value(static_cast<std::size_t>(engine.n()), 0.0);
    std::vector<std::uint8_t> present(static_cast<std::size_t>(engine.n()), 0);
    for (std::int64_t gi = begin; gi < end; ++gi) {
      const auto& [node, target_ixs] = group_list[static_cast<std::size_t>(gi)];
      engine.touched_row(node, scratch[static_cast<std::size_t>(w)], entries, /*sorted=*/false);
      for (const auto& e : entries) {
        value[static_cast<std::size_t>(e.j)] = e.value;
        present[static_cast<std::size_t>(e.j)] = 1;
      }
      auto weight_of = [&](NodeId j) {
        return present[static_cast<std::size_t>(j)] ? value[static_cast<std::size_t>(j)]
                                                    : engine.background_value(node, j);
      };
      for (std::size_t t : target_ixs) {
        const auto [tu, ta] = targets[t];
        double num = 0.0, den = 0.0;
        if (mode == Layer::users) {
          // neighbors: train raters of the target item
          auto raters = train_ratings.item_rows.row(ta);
          for (std::size_t r = 0; r < raters.size(); ++r) {
            const double b = weight_of(raters[r]);
            num += b * train_ratings.item_values[static_cast<std::size_t>(
                           train_ratings.item_rows.offsets[ta]) + r];
            den += std::abs(b);
          }
        } else {
          // neighbors: items the target user rated
          auto rated = train_ratings.user_rows.row(tu);
          for (std::size_t r = 0; r < rated.size(); ++r) {
            const double b = weight_of(rated[r]);
            num += b * train_ratings.user_values[static_cast<std::size_t>(
                           train_ratings.user_rows.offsets[tu]) + r];
            den += std::abs(b);
          }
        }
        if (den > 0.0) out[t] = num / den;
      }
      for (const auto& e : entries) {
        value[static_cast<std::size_t>(e.j)] = 0.0;
        present[static_cast<std::size_t>(e.j)] = 0;
      }
    }
  });
  return out;
}

}  // namespace saplingcf
