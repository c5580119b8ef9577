#pragma once

#include <algorithm>
#include <atomic>
#include <barrier>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include "drgraph/alias_table.hpp"
#include "drgraph/graph.hpp"
#include "drgraph/layout.hpp"
#include "drgraph/multilevel.hpp"
#include "drgraph/similarity.hpp"

namespace drgraph {

struct OptimizerParams {
  int negative_samples = 5;     // M
  double gamma = 0.1;           // repulsion weight on every level but the coarsest
  double coarsest_gamma = 0.01;
  int iterations = 400;         // T, epochs per level; one epoch = |V^l| steps
  int b = 2;                    // kernel 1 / (1 + LD^(2b))
  double lr0 = 1.0;
  double grad_clip = 5.0;
  double eps = 1e-3;            // floor added to LD^2 in the repulsive term
  double negative_power = 0.75;
  double rho = 0.8;
  std::size_t min_size = 16;
  double init_scale = 1e-4;
  double jitter_ratio = 1e-3;   // prolongation jitter, relative to layout radius
  std::uint64_t seed = 1;
  unsigned threads = 1;

  void validate() const {
    if (negative_samples < 0) throw ArgumentError("negative sample count must be >= 0");
    if (!(gamma > 0.0) || !(coarsest_gamma > 0.0)) throw ArgumentError("gamma must be > 0");
    if (iterations < 1) throw ArgumentError("iterations must be >= 1");
    if (b < 1) throw ArgumentError("b must be >= 1");
    if (!(lr0 > 0.0)) throw ArgumentError("learning rate must be > 0");
    if (!(grad_clip > 0.0)) throw ArgumentError("gradient clip must be > 0");
    if (!(eps >= 0.0)) throw ArgumentError("eps must be >= 0");
    if (threads < 1) throw ArgumentError("threads must be >= 1");
  }
};

namespace detail {

inline double int_pow(double x, int e) {
  double r = 1.0;
  for (int i = 0; i < e; ++i) r *= x;
  return r;
}

}  // namespace detail

// 1 / (1 + LD^(2b)), the unnormalized layout proximity.
inline double proximity_kernel(double ld, int b) { return 1.0 / (1.0 + detail::int_pow(ld * ld, b)); }

// Gradient of log(1 / (1 + LD^(2b))) with respect to y_i:
// -2b LD^(2b-2) (y_i - y_j) / (1 + LD^(2b)).
inline Point attractive_gradient(Point yi, Point yj, int b) {
  const double dx = yi.x - yj.x, dy = yi.y - yj.y;
  const double r2 = dx * dx + dy * dy;
  const double r2b1 = detail::int_pow(r2, b - 1);
  const double coeff = -2.0 * b * r2b1 / (1.0 + r2b1 * r2);
  return {coeff * dx, coeff * dy};
}

// Gradient of gamma * log(1 - 1 / (1 + LD^(2b))) with respect to y_i, with
// `eps` added to LD^2 in the denominator and each component clamped to
// +-clip: gamma 2b (y_i - y_m) / ((LD^2 + eps)(1 + LD^(2b))).
inline Point repulsive_gradient(Point yi, Point ym, int b, double gamma, double eps,
                                double clip = std::numeric_limits<double>::infinity()) {
  const double dx = yi.x - ym.x, dy = yi.y - ym.y;
  const double r2 = dx * dx + dy * dy;
  if (r2 == 0.0) return {0.0, 0.0};
  const double coeff = gamma * 2.0 * b / ((r2 + eps) * (1.0 + detail::int_pow(r2, b)));
  return {std::clamp(coeff * dx, -clip, clip), std::clamp(coeff * dy, -clip, clip)};
}

// Draws directed similarity entries (i, j) with probability NS_ij / sum NS.
// Each alias bucket carries both of its candidate entries, so a draw reads
// one bucket.
class PositiveSampler {
 public:
  explicit PositiveSampler(const SparseSimilarity& ns) {
    std::vector<double> weights;
    std::vector<Edge> entries;
    weights.reserve(ns.entry_count());
    entries.reserve(ns.entry_count());
    for (NodeId i = 0; i < ns.node_count(); ++i) {
      for (const auto& e : ns.row(i)) {
        entries.emplace_back(i, e.id);
        weights.push_back(e.weight);
      }
    }
    double total = 0.0;
    for (double w : weights) total += w;
    if (!(total > 0.0)) throw ConfigError("similarity has no positive entries to sample");
    const AliasTable table(weights);
    buckets_.resize(table.size());
    for (std::size_t b = 0; b < table.size(); ++b) {
      const auto& bk = table.bucket(b);
      buckets_[b] = {bk.prob, entries[b], entries[bk.alias]};
    }
  }

  template <class Rng>
  AliasTable::Pending begin_draw(Rng& rng) const {
    const auto [b, coin] = AliasTable::draw(rng, buckets_.size());
    __builtin_prefetch(&buckets_[b]);
    return {b, coin};
  }

  Edge finish(AliasTable::Pending p) const noexcept {
    const Bucket& bk = buckets_[p.bucket];
    return p.coin < bk.prob ? bk.own : bk.other;
  }

  template <class Rng>
  Edge sample(Rng& rng) const {
    return finish(begin_draw(rng));
  }

  std::size_t size() const noexcept { return buckets_.size(); }
  std::size_t storage_bytes() const noexcept { return buckets_.capacity() * sizeof(Bucket); }

 private:
  struct Bucket {
    double prob;
    Edge own, other;
  };
  std::vector<Bucket> buckets_;
};

// Draws nodes with probability proportional to (sum_l NS_{node,l})^power.
// Nodes with zero mass get 1e-8 of the largest weight.
class NegativeSampler {
 public:
  NegativeSampler(const SparseSimilarity& ns, double power) {
    std::vector<double> weights(ns.node_count());
    double top = 0.0;
    for (NodeId i = 0; i < ns.node_count(); ++i) {
      weights[i] = std::pow(ns.row_mass(i), power);
      top = std::max(top, weights[i]);
    }
    const double floor = top > 0.0 ? 1e-8 * top : 1.0;
    for (auto& w : weights)
      if (!(w > 0.0)) w = floor;
    table_ = AliasTable(weights);
  }

  template <class Rng>
  NodeId sample(Rng& rng) const {
    return static_cast<NodeId>(table_.sample(rng));
  }
  template <class Rng>
  AliasTable::Pending begin_draw(Rng& rng) const {
    return table_.begin_draw(rng);
  }
  NodeId finish(AliasTable::Pending p) const noexcept { return static_cast<NodeId>(table_.finish(p)); }

  std::size_t size() const noexcept { return table_.size(); }
  std::vector<double> probabilities() const { return table_.implied_distribution(); }
  std::size_t storage_bytes() const noexcept { return table_.storage_bytes(); }

 private:
  AliasTable table_;
};

struct Samplers {
  std::optional<PositiveSampler> positive;  // empty for edgeless graphs
  NegativeSampler negative;

  Samplers(const SparseSimilarity& ns, double negative_power) : negative(ns, negative_power) {
    if (ns.total_mass() > 0.0) positive.emplace(ns);
  }

  std::size_t storage_bytes() const noexcept {
    return negative.storage_bytes() + (positive ? positive->storage_bytes() : 0);
  }
};

struct OptimizerStats {
  std::uint64_t gradient_steps = 0;
  std::uint64_t distance_evaluations = 0;
  std::uint64_t attractive_updates = 0;
  std::uint64_t repulsive_updates = 0;
  std::uint64_t coincident_skips = 0;
  std::uint64_t negative_rejections = 0;

  OptimizerStats& operator+=(const OptimizerStats& o) {
    gradient_steps += o.gradient_steps;
    distance_evaluations += o.distance_evaluations;
    attractive_updates += o.attractive_updates;
    repulsive_updates += o.repulsive_updates;
    coincident_skips += o.coincident_skips;
    negative_rejections += o.negative_rejections;
    return *this;
  }
};

// Everything a gradient step needs to know about one hierarchy level.
struct LevelView {
  std::vector<NodeId> to_level;  // G^0 node -> G^l node; empty at level 0
  std::size_t node_count = 0;
  double gamma = 0.1;

  NodeId operator()(NodeId v) const noexcept { return to_level.empty() ? v : to_level[v]; }
};

inline LevelView make_level_view(const Hierarchy& h, std::size_t level, const OptimizerParams& params) {
  LevelView v;
  if (level > 0) v.to_level = compose_maps(h, level);
  v.node_count = h.level(level).node_count();
  v.gamma = level == h.coarsest_level() ? params.coarsest_gamma : params.gamma;
  return v;
}

using SgdRng = std::mt19937_64;

namespace detail {

// Positions may be shared between hogwild workers; all access goes through
// relaxed atomics so concurrent updates are races on values, not UB.
inline Point load(Layout& layout, NodeId v) {
  auto& p = layout.positions[v];
  return {std::atomic_ref<double>(p.x).load(std::memory_order_relaxed),
          std::atomic_ref<double>(p.y).load(std::memory_order_relaxed)};
}

inline void add(Layout& layout, NodeId v, double dx, double dy) {
  auto& p = layout.positions[v];
  std::atomic_ref<double> x(p.x), y(p.y);
  x.store(x.load(std::memory_order_relaxed) + dx, std::memory_order_relaxed);
  y.store(y.load(std::memory_order_relaxed) + dy, std::memory_order_relaxed);
}

inline Point clip(Point g, double c) { return {std::clamp(g.x, -c, c), std::clamp(g.y, -c, c)}; }

}  // namespace detail

// Runs `steps` gradient steps at one level. The learning rate decays
// linearly with `progress` (fraction of the level's total budget), from
// `progress_begin` to `progress_end`.
//
// Each step samples a G^0 similarity pair (i, j) and M G^0 negatives, maps
// them to the level, and ascends log LP_ij + gamma sum_m log(1 - LP_im) with
// respect to y_i; j and every negative receive the opposite update. Pairs
// whose images coincide are skipped.
inline void sgd_steps(Layout& layout, const LevelView& view, const Samplers& samplers, const OptimizerParams& params,
                      std::size_t steps, double progress_begin, double progress_end, SgdRng& rng,
                      OptimizerStats* stats = nullptr) {
  if (view.node_count <= 1) return;
  const int b = params.b;
  const double clip = params.grad_clip;
  const double lr_floor = params.lr0 * 1e-4;
  OptimizerStats local;

  const bool has_positive = samplers.positive.has_value();
  const auto M = static_cast<std::size_t>(params.negative_samples);
  constexpr NodeId none = std::numeric_limits<NodeId>::max();

  // Software pipeline: sampler draws are issued kDepth steps ahead (bucket
  // prefetch), resolved one step ahead (position prefetch), then applied.
  // The randomness consumed is still a fixed function of the seed.
  constexpr std::size_t kDepth = 4;
  const std::size_t width = M + 1;
  std::vector<AliasTable::Pending> issued(kDepth * width);
  struct Resolved {
    NodeId a = none, c = none;
    std::vector<NodeId> negatives;
  };
  Resolved cur, next;
  cur.negatives.resize(M);
  next.negatives.resize(M);

  auto issue = [&](std::size_t step) {
    auto* slot = &issued[(step % kDepth) * width];
    slot[0] = has_positive ? samplers.positive->begin_draw(rng) : samplers.negative.begin_draw(rng);
    for (std::size_t m = 0; m < M; ++m) slot[m + 1] = samplers.negative.begin_draw(rng);
  };
  auto resolve = [&](std::size_t step, Resolved& out) {
    const auto* slot = &issued[(step % kDepth) * width];
    NodeId i0, j0;
    if (has_positive)
      std::tie(i0, j0) = samplers.positive->finish(slot[0]);
    else
      i0 = j0 = samplers.negative.finish(slot[0]);
    out.a = view(i0);
    out.c = has_positive ? view(j0) : none;
    __builtin_prefetch(&layout.positions[out.a]);
    if (out.c != none) __builtin_prefetch(&layout.positions[out.c]);
    for (std::size_t m = 0; m < M; ++m) {
      NodeId n0 = samplers.negative.finish(slot[m + 1]);
      for (int retry = 0; retry < 8 && (n0 == i0 || n0 == j0); ++retry) {
        ++local.negative_rejections;
        n0 = samplers.negative.sample(rng);
      }
      if (n0 == i0 || n0 == j0) {
        out.negatives[m] = none;
        continue;
      }
      out.negatives[m] = view(n0);
      __builtin_prefetch(&layout.positions[out.negatives[m]]);
    }
  };

  if (steps == 0) return;
  for (std::size_t q = 0; q < std::min(kDepth, steps); ++q) issue(q);
  resolve(0, cur);

  for (std::size_t s = 0; s < steps; ++s) {
    if (s + 1 < steps) resolve(s + 1, next);
    if (s + kDepth < steps) issue(s + kDepth);

    const double progress =
        progress_begin + (progress_end - progress_begin) * static_cast<double>(s) / static_cast<double>(steps);
    const double lr = std::max(params.lr0 * (1.0 - progress), lr_floor);
    ++local.gradient_steps;

    const NodeId a = cur.a, c = cur.c;
    const Point ya = detail::load(layout, a);
    double gx = 0.0, gy = 0.0;
    if (has_positive) {
      if (c != a) {
        const Point g = detail::clip(attractive_gradient(ya, detail::load(layout, c), b), clip);
        ++local.distance_evaluations;
        ++local.attractive_updates;
        gx += g.x;
        gy += g.y;
        detail::add(layout, c, -lr * g.x, -lr * g.y);
      } else {
        ++local.coincident_skips;
      }
    }
    for (std::size_t m = 0; m < M; ++m) {
      const NodeId n = cur.negatives[m];
      if (n == none) continue;
      if (n == a) {
        ++local.coincident_skips;
        continue;
      }
      const Point g = repulsive_gradient(ya, detail::load(layout, n), b, view.gamma, params.eps, clip);
      ++local.distance_evaluations;
      ++local.repulsive_updates;
      gx += g.x;
      gy += g.y;
      detail::add(layout, n, -lr * g.x, -lr * g.y);
    }
    detail::add(layout, a, lr * gx, lr * gy);
    std::swap(cur, next);
  }
  if (stats) *stats += local;
}

// One epoch (|V^l| steps) at iteration t of T, single-threaded.
inline void sgd_epoch(Layout& layout, const LevelView& view, const Samplers& samplers, const OptimizerParams& params,
                      int t, SgdRng& rng, OptimizerStats* stats = nullptr) {
  const double T = params.iterations;
  sgd_steps(layout, view, samplers, params, view.node_count, t / T, (t + 1) / T, rng, stats);
}

class NonFiniteLayout : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// T epochs at one level, split across params.threads hogwild workers that
// synchronize only at epoch boundaries. With one thread the result is a
// pure function of (inputs, seed).
inline void optimize_level(Layout& layout, const LevelView& view, const Samplers& samplers,
                           const OptimizerParams& params, std::uint64_t level_seed, OptimizerStats* stats = nullptr) {
  const unsigned threads = std::max(1u, params.threads);
  if (threads == 1) {
    std::seed_seq seq{level_seed, std::uint64_t{0}};
    SgdRng rng(seq);
    for (int t = 0; t < params.iterations; ++t) {
      sgd_epoch(layout, view, samplers, params, t, rng, stats);
      if (!layout.all_finite()) throw NonFiniteLayout("non-finite coordinate after epoch " + std::to_string(t));
    }
    return;
  }

  std::atomic<bool> failed{false};
  auto check = [&]() noexcept {
    if (!layout.all_finite()) failed.store(true, std::memory_order_relaxed);
  };
  std::barrier sync(static_cast<std::ptrdiff_t>(threads), check);
  std::vector<OptimizerStats> per_thread(threads);
  std::vector<std::jthread> workers;
  workers.reserve(threads);
  const double T = params.iterations;
  for (unsigned w = 0; w < threads; ++w) {
    workers.emplace_back([&, w] {
      std::seed_seq seq{level_seed, std::uint64_t{w}};
      SgdRng rng(seq);
      const std::size_t share = view.node_count / threads + (w < view.node_count % threads ? 1 : 0);
      for (int t = 0; t < params.iterations; ++t) {
        sgd_steps(layout, view, samplers, params, share, t / T, (t + 1) / T, rng, &per_thread[w]);
        sync.arrive_and_wait();
        if (failed.load(std::memory_order_relaxed)) return;
      }
    });
  }
  workers.clear();
  if (stats)
    for (const auto& s : per_thread) *stats += s;
  if (failed.load()) throw NonFiniteLayout("non-finite coordinate during parallel optimization");
}

struct LayoutResult {
  Layout layout;
  OptimizerStats stats;
  std::vector<std::size_t> level_sizes;  // |V^l| for l = 0..L
  std::vector<std::size_t> level_edges;
  std::size_t similarity_bytes = 0;      // neighbor distances + similarity
  std::size_t hierarchy_bytes = 0;
  std::size_t sampler_bytes = 0;
};

// Full pipeline: k-hop distances -> similarity -> hierarchy -> coarsest
// random start -> T epochs per level from coarsest to finest, prolonging
// positions between levels.
inline LayoutResult layout_graph_detailed(const Graph& g, const SimilarityParams& sim, const OptimizerParams& params) {
  if (g.node_count() == 0) throw ArgumentError("cannot lay out an empty graph");
  params.validate();
  LayoutResult result;

  const auto nd = all_k_neighborhoods(g, sim.k);
  const auto ns = build_sparse_similarity(nd, sim);
  result.similarity_bytes = nd.storage_bytes() + ns.storage_bytes();

  std::seed_seq root{params.seed};
  std::vector<std::uint64_t> seeds(3);
  root.generate(seeds.begin(), seeds.end());
  const std::uint64_t hierarchy_seed = seeds[0], init_seed = seeds[1], run_seed = seeds[2];

  const Hierarchy h = build_hierarchy(g, params.rho, params.min_size, hierarchy_seed);
  result.hierarchy_bytes = h.storage_bytes();
  for (std::size_t l = 0; l < h.level_count(); ++l) {
    result.level_sizes.push_back(h.level(l).node_count());
    result.level_edges.push_back(h.level(l).edge_count());
  }

  const Samplers samplers(ns, params.negative_power);
  result.sampler_bytes = samplers.storage_bytes();

  const std::size_t top = h.coarsest_level();
  Layout layout(h.level(top).node_count());
  {
    std::mt19937_64 rng(init_seed);
    std::normal_distribution<double> noise(0.0, params.init_scale);
    for (auto& p : layout.positions) {
      p.x = noise(rng);
      p.y = noise(rng);
    }
  }

  for (std::size_t l = top + 1; l-- > 0;) {
    if (l < top) layout = prolong(layout, h.map(l), params.jitter_ratio * layout.radius(), run_seed + 2 * l + 1);
    const LevelView view = make_level_view(h, l, params);
    optimize_level(layout, view, samplers, params, run_seed + 2 * l, &result.stats);
  }
  result.layout = std::move(layout);
  return result;
}

inline Layout layout_graph(const Graph& g, const SimilarityParams& sim = {}, const OptimizerParams& params = {}) {
  return layout_graph_detailed(g, sim, params).layout;
}

}  // namespace drgraph
