#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <numeric>
#include <optional>
#include <queue>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "drgraph/graph.hpp"
#include "drgraph/layout.hpp"

namespace drgraph {

class MetricError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Layout-space nearest neighbors

namespace detail {

inline double squared_distance(Point a, Point b) noexcept {
  const double dx = a.x - b.x, dy = a.y - b.y;
  return dx * dx + dy * dy;
}

struct Candidate {
  double d2;
  NodeId id;
  bool operator<(const Candidate& o) const noexcept { return d2 < o.d2 || (d2 == o.d2 && id < o.id); }
};

}  // namespace detail

// The `k` layout points nearest to node `query` (excluding itself), ordered
// by (squared distance, id). Brute force.
inline std::vector<NodeId> layout_knn_brute(const Layout& layout, NodeId query, std::size_t k) {
  std::vector<detail::Candidate> all;
  all.reserve(layout.size());
  for (NodeId v = 0; v < layout.size(); ++v)
    if (v != query) all.push_back({detail::squared_distance(layout[query], layout[v]), v});
  k = std::min(k, all.size());
  std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(k), all.end());
  std::vector<NodeId> out(k);
  for (std::size_t t = 0; t < k; ++t) out[t] = all[t].id;
  return out;
}

// Uniform bucket grid over the layout's bounding box answering exact k-NN
// queries with the same (squared distance, id) ordering as brute force.
class SpatialGrid {
 public:
  explicit SpatialGrid(const Layout& layout) : layout_(&layout) {
    const std::size_t n = layout.size();
    min_ = {std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
    Point max{-std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
    for (auto p : layout.positions) {
      min_.x = std::min(min_.x, p.x);
      min_.y = std::min(min_.y, p.y);
      max.x = std::max(max.x, p.x);
      max.y = std::max(max.y, p.y);
    }
    const double extent = std::max({max.x - min_.x, max.y - min_.y, 1e-300});
    side_ = std::max<std::size_t>(1, static_cast<std::size_t>(std::sqrt(static_cast<double>(n) / 2.0)));
    cell_ = extent / static_cast<double>(side_);
    if (!(cell_ > 0.0) || !std::isfinite(cell_)) cell_ = 1.0;
    start_.assign(side_ * side_ + 1, 0);
    for (NodeId v = 0; v < n; ++v) ++start_[cell_of(layout[v]) + 1];
    std::partial_sum(start_.begin(), start_.end(), start_.begin());
    items_.resize(n);
    auto fill = start_;
    for (NodeId v = 0; v < n; ++v) items_[fill[cell_of(layout[v])]++] = v;
  }

  std::vector<NodeId> knn(NodeId query, std::size_t k) const {
    const auto& layout = *layout_;
    k = std::min(k, layout.size() - 1);
    std::vector<NodeId> out;
    if (k == 0) return out;
    const Point q = layout[query];
    const auto [cx, cy] = coords(q);
    std::priority_queue<detail::Candidate> best;  // max-heap on (d2, id)
    const long side = static_cast<long>(side_);
    for (long r = 0;; ++r) {
      const long x0 = cx - r, x1 = cx + r, y0 = cy - r, y1 = cy + r;
      for (long y = y0; y <= y1; ++y) {
        if (y < 0 || y >= side) continue;
        for (long x = x0; x <= x1; ++x) {
          if (x < 0 || x >= side) continue;
          if (y != y0 && y != y1 && x != x0 && x != x1) continue;  // ring only
          const std::size_t c = static_cast<std::size_t>(y) * side_ + static_cast<std::size_t>(x);
          for (std::size_t t = start_[c]; t < start_[c + 1]; ++t) {
            const NodeId v = items_[t];
            if (v == query) continue;
            detail::Candidate cand{detail::squared_distance(q, layout[v]), v};
            if (best.size() < k) {
              best.push(cand);
            } else if (cand < best.top()) {
              best.pop();
              best.push(cand);
            }
          }
        }
      }
      // Anything outside rings 0..r is at least r cells away.
      const double reach = static_cast<double>(r) * cell_;
      const bool covered = x0 <= 0 && y0 <= 0 && x1 >= side - 1 && y1 >= side - 1;
      if (covered || (best.size() == k && best.top().d2 < reach * reach)) break;
    }
    out.resize(best.size());
    for (std::size_t t = out.size(); t-- > 0;) {
      out[t] = best.top().id;
      best.pop();
    }
    return out;
  }

 private:
  std::pair<long, long> coords(Point p) const {
    auto clampi = [&](double v) {
      long c = static_cast<long>(std::floor(v / cell_));
      return std::clamp<long>(c, 0, static_cast<long>(side_) - 1);
    };
    return {clampi(p.x - min_.x), clampi(p.y - min_.y)};
  }
  std::size_t cell_of(Point p) const {
    auto [x, y] = coords(p);
    return static_cast<std::size_t>(y) * side_ + static_cast<std::size_t>(x);
  }

  const Layout* layout_;
  Point min_;
  std::size_t side_ = 1;
  double cell_ = 1.0;
  std::vector<std::size_t> start_;
  std::vector<NodeId> items_;
};

// ---------------------------------------------------------------------------
// Neighborhood preservation

// Below this node count layout neighbors are found by brute force.
inline constexpr std::size_t kExactKnnLimit = 20000;

// Mean Jaccard overlap between each node's k_eval-hop graph neighborhood and
// its equally sized set of nearest layout neighbors. Nodes with an empty
// graph neighborhood contribute 1.
inline double neighborhood_preservation(const Graph& g, const Layout& layout, std::uint32_t k_eval = 2) {
  if (layout.size() != g.node_count()) throw ArgumentError("layout does not cover the graph");
  if (k_eval < 1) throw ArgumentError("k_eval must be >= 1");
  const std::size_t n = g.node_count();
  if (n == 0) return 1.0;
  std::optional<SpatialGrid> grid;
  if (n >= kExactKnnLimit) grid.emplace(layout);

  BfsWorkspace ws(n);
  std::vector<Neighbor> hood;
  std::vector<NodeId> graph_set;
  double total = 0.0;
  for (NodeId i = 0; i < n; ++i) {
    ws.run(g, i, k_eval, hood);
    if (hood.empty()) {
      total += 1.0;
      continue;
    }
    graph_set.clear();
    for (const auto& h : hood) graph_set.push_back(h.id);
    std::sort(graph_set.begin(), graph_set.end());
    auto layout_set = grid ? grid->knn(i, hood.size()) : layout_knn_brute(layout, i, hood.size());
    std::sort(layout_set.begin(), layout_set.end());
    std::size_t common = 0;
    for (std::size_t a = 0, b = 0; a < graph_set.size() && b < layout_set.size();) {
      if (graph_set[a] == layout_set[b]) {
        ++common;
        ++a;
        ++b;
      } else if (graph_set[a] < layout_set[b]) {
        ++a;
      } else {
        ++b;
      }
    }
    const std::size_t uni = graph_set.size() + layout_set.size() - common;
    total += static_cast<double>(common) / static_cast<double>(uni);
  }
  return total / static_cast<double>(n);
}

// ---------------------------------------------------------------------------
// Stress

struct StressMode {
  enum class Kind { exact, pivot } kind = Kind::exact;
  std::size_t pivots = 0;
  std::uint64_t seed = 1;

  static StressMode exact() { return {}; }
  static StressMode pivot(std::size_t count, std::uint64_t seed = 1) { return {Kind::pivot, count, seed}; }
};

struct StressResult {
  double stress = 0.0;
  double alpha = 0.0;
};

namespace detail {

// Visits (source, target, SPD) for every pair covered by the mode.
template <class Visit>
void for_each_stress_pair(const Graph& g, const StressMode& mode, Visit&& visit) {
  const std::size_t n = g.node_count();
  std::vector<std::uint32_t> dist(n);
  std::vector<NodeId> queue(n);
  auto bfs = [&](NodeId s) {
    std::fill(dist.begin(), dist.end(), std::numeric_limits<std::uint32_t>::max());
    dist[s] = 0;
    std::size_t head = 0, tail = 0;
    queue[tail++] = s;
    while (head < tail) {
      NodeId u = queue[head++];
      for (NodeId v : g.neighbors(u)) {
        if (dist[v] != std::numeric_limits<std::uint32_t>::max()) continue;
        dist[v] = dist[u] + 1;
        queue[tail++] = v;
      }
    }
    return tail;
  };
  if (mode.kind == StressMode::Kind::exact) {
    for (NodeId s = 0; s < n; ++s) {
      if (bfs(s) != n) throw MetricError("stress is undefined on a disconnected graph");
      for (NodeId t = s + 1; t < n; ++t) visit(s, t, dist[t]);
    }
    return;
  }
  std::vector<NodeId> nodes(n);
  std::iota(nodes.begin(), nodes.end(), NodeId{0});
  std::mt19937_64 rng(mode.seed);
  std::vector<NodeId> pivots;
  std::sample(nodes.begin(), nodes.end(), std::back_inserter(pivots), std::min(mode.pivots, n), rng);
  for (NodeId s : pivots) {
    if (bfs(s) != n) throw MetricError("stress is undefined on a disconnected graph");
    for (NodeId t = 0; t < n; ++t)
      if (t != s) visit(s, t, dist[t]);
  }
}

}  // namespace detail

// Normalized stress with the optimal layout scale alpha*. Each unordered
// pair is counted once and the sum is divided by |V|^2; w_ij = 1 / SPD^2.
// Pivot mode sums over BFS trees of `pivots` random sources and rescales
// to the number of unordered pairs. Throws MetricError on a disconnected
// graph.
inline StressResult stress(const Graph& g, const Layout& layout, const StressMode& mode = StressMode::exact()) {
  if (layout.size() != g.node_count()) throw ArgumentError("layout does not cover the graph");
  const std::size_t n = g.node_count();
  if (n < 2) return {0.0, 0.0};

  double num = 0.0, den = 0.0;
  std::size_t pairs = 0;
  detail::for_each_stress_pair(g, mode, [&](NodeId s, NodeId t, std::uint32_t spd) {
    const double d = distance(layout[s], layout[t]);
    const double w = 1.0 / (static_cast<double>(spd) * spd);
    num += w * spd * d;
    den += w * d * d;
    ++pairs;
  });
  const double alpha = den > 0.0 ? num / den : 0.0;

  double sum = 0.0;
  detail::for_each_stress_pair(g, mode, [&](NodeId s, NodeId t, std::uint32_t spd) {
    const double d = distance(layout[s], layout[t]);
    const double r = alpha * d - spd;
    sum += r * r / (static_cast<double>(spd) * spd);
  });
  if (mode.kind == StressMode::Kind::pivot && pairs > 0)
    sum *= (static_cast<double>(n) * (n - 1) / 2.0) / static_cast<double>(pairs);
  return {sum / (static_cast<double>(n) * n), alpha};
}

// Stress sum at a fixed scale (exact mode); used to check alpha* optimality.
inline double stress_at_scale(const Graph& g, const Layout& layout, double alpha) {
  const std::size_t n = g.node_count();
  double sum = 0.0;
  detail::for_each_stress_pair(g, StressMode::exact(), [&](NodeId s, NodeId t, std::uint32_t spd) {
    const double r = alpha * distance(layout[s], layout[t]) - spd;
    sum += r * r / (static_cast<double>(spd) * spd);
  });
  return sum / (static_cast<double>(n) * n);
}

// ---------------------------------------------------------------------------
// Crossings

namespace detail {

inline double orient(Point a, Point b, Point c) noexcept { return (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x); }

inline int sign(double v) noexcept { return (v > 0.0) - (v < 0.0); }

}  // namespace detail

// True when the open segments (p1,p2) and (q1,q2) share a point: a proper
// crossing, or a collinear overlap of positive length.
inline bool segments_cross(Point p1, Point p2, Point q1, Point q2) noexcept {
  const int o1 = detail::sign(detail::orient(p1, p2, q1));
  const int o2 = detail::sign(detail::orient(p1, p2, q2));
  const int o3 = detail::sign(detail::orient(q1, q2, p1));
  const int o4 = detail::sign(detail::orient(q1, q2, p2));
  if (o1 * o2 < 0 && o3 * o4 < 0) return true;
  if (o1 != 0 || o2 != 0 || o3 != 0 || o4 != 0) return false;
  const bool use_x = std::abs(p2.x - p1.x) + std::abs(q2.x - q1.x) >= std::abs(p2.y - p1.y) + std::abs(q2.y - q1.y);
  auto key = [&](Point p) { return use_x ? p.x : p.y; };
  const double lo = std::max(std::min(key(p1), key(p2)), std::min(key(q1), key(q2)));
  const double hi = std::min(std::max(key(p1), key(p2)), std::max(key(q1), key(q2)));
  return hi > lo;
}

inline constexpr std::size_t kDefaultCrossingCap = 200000;

// Number of crossing pairs of edges that share no endpoint. Sweeps edges
// by bounding-box x-interval. Empty when |E| exceeds `cap`.
inline std::optional<std::uint64_t> count_crossings(const Graph& g, const Layout& layout,
                                                    std::size_t cap = kDefaultCrossingCap) {
  if (layout.size() != g.node_count()) throw ArgumentError("layout does not cover the graph");
  if (g.edge_count() > cap) return std::nullopt;
  struct Seg {
    double xmin, xmax, ymin, ymax;
    NodeId u, v;
  };
  std::vector<Seg> segs;
  segs.reserve(g.edge_count());
  for (auto [u, v] : g.edges()) {
    const Point a = layout[u], b = layout[v];
    segs.push_back({std::min(a.x, b.x), std::max(a.x, b.x), std::min(a.y, b.y), std::max(a.y, b.y), u, v});
  }
  std::sort(segs.begin(), segs.end(), [](const Seg& a, const Seg& b) { return a.xmin < b.xmin; });
  std::uint64_t count = 0;
  for (std::size_t s = 0; s < segs.size(); ++s) {
    const Seg& e = segs[s];
    for (std::size_t t = s + 1; t < segs.size() && segs[t].xmin <= e.xmax; ++t) {
      const Seg& f = segs[t];
      if (f.ymin > e.ymax || f.ymax < e.ymin) continue;
      if (e.u == f.u || e.u == f.v || e.v == f.u || e.v == f.v) continue;
      if (segments_cross(layout[e.u], layout[e.v], layout[f.u], layout[f.v])) ++count;
    }
  }
  return count;
}

// |E|(|E|-1)/2 - (1/2) sum_v deg(v)(deg(v)-1).
inline double max_crossings(const Graph& g) {
  const double m = static_cast<double>(g.edge_count());
  double adjacent = 0.0;
  for (NodeId v = 0; v < g.node_count(); ++v) {
    const double d = static_cast<double>(g.degree(v));
    adjacent += d * (d - 1.0);
  }
  return m * (m - 1.0) / 2.0 - adjacent / 2.0;
}

inline double crosslessness_from_count(std::uint64_t crossings, double c_max) {
  return c_max > 0.0 ? 1.0 - std::sqrt(static_cast<double>(crossings) / c_max) : 1.0;
}

// Empty when the crossing count was skipped (edge cap exceeded).
inline std::optional<double> crosslessness(const Graph& g, const Layout& layout, std::size_t cap = kDefaultCrossingCap) {
  auto c = count_crossings(g, layout, cap);
  if (!c) return std::nullopt;
  return crosslessness_from_count(*c, max_crossings(g));
}

// ---------------------------------------------------------------------------
// Minimum angle

struct MinimumAngleResult {
  double value = 1.0;
  std::size_t skipped_nodes = 0;  // nodes with a zero-length incident edge
};

// 1 - mean_v |(theta(v) - theta_min(v)) / theta(v)| with theta(v) = 360/deg.
// Nodes of degree <= 1 contribute 0; nodes with a zero-length incident edge
// are left out of the mean.
inline MinimumAngleResult minimum_angle(const Graph& g, const Layout& layout) {
  if (layout.size() != g.node_count()) throw ArgumentError("layout does not cover the graph");
  MinimumAngleResult result;
  double deviation = 0.0;
  std::vector<double> angles;
  for (NodeId v = 0; v < g.node_count(); ++v) {
    const auto nbrs = g.neighbors(v);
    if (nbrs.size() < 2) continue;
    angles.clear();
    bool degenerate = false;
    for (NodeId u : nbrs) {
      const double dx = layout[u].x - layout[v].x, dy = layout[u].y - layout[v].y;
      if (dx == 0.0 && dy == 0.0) {
        degenerate = true;
        break;
      }
      angles.push_back(std::atan2(dy, dx) * 180.0 / std::numbers::pi);
    }
    if (degenerate) {
      ++result.skipped_nodes;
      continue;
    }
    std::sort(angles.begin(), angles.end());
    double smallest = 360.0 - (angles.back() - angles.front());
    for (std::size_t t = 1; t < angles.size(); ++t) smallest = std::min(smallest, angles[t] - angles[t - 1]);
    const double ideal = 360.0 / static_cast<double>(nbrs.size());
    deviation += std::abs((ideal - smallest) / ideal);
  }
  const std::size_t counted = g.node_count() - result.skipped_nodes;
  result.value = counted > 0 ? 1.0 - deviation / static_cast<double>(counted) : 1.0;
  return result;
}

// ---------------------------------------------------------------------------
// Report

struct MetricsOptions {
  std::uint32_t k_eval = 2;
  std::size_t exact_stress_limit = 10000;  // above this, pivot stress
  std::size_t stress_pivots = 200;
  std::size_t crossing_cap = kDefaultCrossingCap;
  std::uint64_t seed = 1;
};

struct MetricsReport {
  double np = 0.0;
  std::optional<double> stress;
  std::optional<double> alpha_star;
  std::optional<std::uint64_t> crossings;
  double c_max = 0.0;
  std::optional<double> crosslessness;
  double min_angle = 1.0;
  std::vector<std::string> flags;
};

namespace detail {

inline Graph induced_subgraph(const Graph& g, std::span<const NodeId> keep, std::vector<NodeId>& local) {
  local.assign(g.node_count(), std::numeric_limits<NodeId>::max());
  for (std::size_t t = 0; t < keep.size(); ++t) local[keep[t]] = static_cast<NodeId>(t);
  std::vector<Edge> edges;
  for (auto [u, v] : g.edges())
    if (local[u] != std::numeric_limits<NodeId>::max() && local[v] != std::numeric_limits<NodeId>::max())
      edges.emplace_back(local[u], local[v]);
  return Graph::from_edges(keep.size(), edges);
}

}  // namespace detail

inline MetricsReport compute_metrics(const Graph& g, const Layout& layout, const MetricsOptions& opt = {}) {
  MetricsReport r;
  r.np = neighborhood_preservation(g, layout, opt.k_eval);

  const auto labels = connected_components(g);
  const Graph* target = &g;
  const Layout* target_layout = &layout;
  Graph sub;
  Layout sub_layout;
  if (component_count(labels) > 1) {
    std::vector<std::size_t> sizes(component_count(labels), 0);
    for (auto l : labels) ++sizes[l];
    const auto largest = static_cast<std::uint32_t>(std::max_element(sizes.begin(), sizes.end()) - sizes.begin());
    std::vector<NodeId> keep;
    for (NodeId v = 0; v < g.node_count(); ++v)
      if (labels[v] == largest) keep.push_back(v);
    std::vector<NodeId> local;
    sub = detail::induced_subgraph(g, keep, local);
    sub_layout = Layout(keep.size());
    for (std::size_t t = 0; t < keep.size(); ++t) sub_layout[t] = layout[keep[t]];
    target = &sub;
    target_layout = &sub_layout;
    r.flags.push_back("stress_largest_component");
  }
  const bool exact = target->node_count() <= opt.exact_stress_limit;
  const auto s = stress(*target, *target_layout,
                        exact ? StressMode::exact() : StressMode::pivot(opt.stress_pivots, opt.seed));
  if (!exact) r.flags.push_back("stress_pivot");
  r.stress = s.stress;
  r.alpha_star = s.alpha;

  r.c_max = max_crossings(g);
  r.crossings = count_crossings(g, layout, opt.crossing_cap);
  if (r.crossings)
    r.crosslessness = crosslessness_from_count(*r.crossings, r.c_max);
  else
    r.flags.push_back("crossings_skipped");

  const auto angle = minimum_angle(g, layout);
  r.min_angle = angle.value;
  if (angle.skipped_nodes > 0) r.flags.push_back("min_angle_skipped_nodes=" + std::to_string(angle.skipped_nodes));
  return r;
}

}  // namespace drgraph
