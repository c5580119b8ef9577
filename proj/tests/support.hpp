#pragma once

// Reference implementations used as oracles. They share no code with the
// library beyond the Graph/Layout containers and are written for clarity,
// not speed.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <numeric>
#include <queue>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "drgraph/graph.hpp"
#include "drgraph/layout.hpp"

#ifndef DRGRAPH_FIXTURE_DIR
#define DRGRAPH_FIXTURE_DIR "tests/fixtures"
#endif

namespace oracle {

using drgraph::Edge;
using drgraph::Graph;
using drgraph::Layout;
using drgraph::NodeId;
using drgraph::Point;

inline std::filesystem::path fixture(const std::string& name) { return std::filesystem::path(DRGRAPH_FIXTURE_DIR) / name; }

inline std::vector<std::string> fixture_names() {
  return {"p3.txt", "grid5.txt", "components.txt", "barbell.txt", "k4.mtx", "star.mtx", "grid17.mtx"};
}

// G(n, m)-style multigraph draw; duplicates and loops are left for the
// library to clean up.
inline std::vector<Edge> random_edges(std::size_t n, std::size_t m, std::uint64_t seed) {
  std::mt19937 rng(static_cast<std::uint32_t>(seed));
  std::uniform_int_distribution<NodeId> pick(0, static_cast<NodeId>(n - 1));
  std::vector<Edge> e;
  for (std::size_t t = 0; t < m; ++t) e.emplace_back(pick(rng), pick(rng));
  return e;
}

inline Graph random_graph(std::size_t n, std::size_t m, std::uint64_t seed) {
  auto e = random_edges(n, m, seed);
  return Graph::from_edges(n, e);
}

// Random graph with no isolated nodes: a random spanning tree plus extra
// edges.
inline Graph random_connected_graph(std::size_t n, std::size_t extra, std::uint64_t seed) {
  std::mt19937 rng(static_cast<std::uint32_t>(seed));
  std::vector<Edge> e;
  for (NodeId v = 1; v < n; ++v) e.emplace_back(v, std::uniform_int_distribution<NodeId>(0, v - 1)(rng));
  std::uniform_int_distribution<NodeId> pick(0, static_cast<NodeId>(n - 1));
  for (std::size_t t = 0; t < extra; ++t) e.emplace_back(pick(rng), pick(rng));
  return Graph::from_edges(n, e);
}

inline Graph grid_graph(std::size_t side) {
  std::vector<Edge> e;
  for (std::size_t r = 0; r < side; ++r)
    for (std::size_t c = 0; c < side; ++c) {
      const auto v = static_cast<NodeId>(r * side + c);
      if (c + 1 < side) e.emplace_back(v, v + 1);
      if (r + 1 < side) e.emplace_back(v, static_cast<NodeId>(v + side));
    }
  return Graph::from_edges(side * side, e);
}

inline Graph path_graph(std::size_t n) {
  std::vector<Edge> e;
  for (NodeId v = 0; v + 1 < n; ++v) e.emplace_back(v, v + 1);
  return Graph::from_edges(n, e);
}

inline Layout random_layout(std::size_t n, std::uint64_t seed) {
  std::mt19937 rng(static_cast<std::uint32_t>(seed));
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Layout l(n);
  for (auto& p : l.positions) p = {u(rng), u(rng)};
  return l;
}

constexpr std::uint32_t kInf = std::numeric_limits<std::uint32_t>::max();

// All-pairs hop distances by Floyd-Warshall over the adjacency matrix.
inline std::vector<std::vector<std::uint32_t>> floyd_warshall(const Graph& g) {
  const std::size_t n = g.node_count();
  std::vector<std::vector<std::uint64_t>> d(n, std::vector<std::uint64_t>(n, kInf));
  for (std::size_t i = 0; i < n; ++i) d[i][i] = 0;
  for (auto [u, v] : g.edges()) d[u][v] = d[v][u] = 1;
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) d[i][j] = std::min(d[i][j], d[i][k] + d[k][j]);
  std::vector<std::vector<std::uint32_t>> out(n, std::vector<std::uint32_t>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) out[i][j] = static_cast<std::uint32_t>(std::min<std::uint64_t>(d[i][j], kInf));
  return out;
}

// Single-source hop distances with a plain queue.
inline std::vector<std::uint32_t> bfs_distances(const Graph& g, NodeId s) {
  std::vector<std::uint32_t> d(g.node_count(), kInf);
  std::queue<NodeId> q;
  d[s] = 0;
  q.push(s);
  while (!q.empty()) {
    const NodeId u = q.front();
    q.pop();
    for (NodeId v : g.neighbors(u))
      if (d[v] == kInf) {
        d[v] = d[u] + 1;
        q.push(v);
      }
  }
  return d;
}

class UnionFind {
 public:
  explicit UnionFind(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }
  std::size_t find(std::size_t x) {
    while (parent_[x] != x) x = parent_[x] = parent_[parent_[x]];
    return x;
  }
  void unite(std::size_t a, std::size_t b) { parent_[find(a)] = find(b); }

 private:
  std::vector<std::size_t> parent_;
};

// Neighborhood preservation straight from the definition: full sort of all
// other nodes by (squared distance, id) for every node.
inline double neighborhood_preservation(const Graph& g, const Layout& y, std::uint32_t k_eval) {
  const std::size_t n = g.node_count();
  double total = 0.0;
  for (NodeId i = 0; i < n; ++i) {
    const auto d = bfs_distances(g, i);
    std::set<NodeId> hood;
    for (NodeId j = 0; j < n; ++j)
      if (j != i && d[j] <= k_eval) hood.insert(j);
    if (hood.empty()) {
      total += 1.0;
      continue;
    }
    std::vector<std::pair<double, NodeId>> order;
    for (NodeId j = 0; j < n; ++j) {
      if (j == i) continue;
      const double dx = y[i].x - y[j].x, dy = y[i].y - y[j].y;
      order.emplace_back(dx * dx + dy * dy, j);
    }
    std::sort(order.begin(), order.end());
    std::set<NodeId> near;
    for (std::size_t t = 0; t < hood.size(); ++t) near.insert(order[t].second);
    std::size_t common = 0;
    for (NodeId j : hood) common += near.count(j);
    total += static_cast<double>(common) / static_cast<double>(hood.size() + near.size() - common);
  }
  return total / static_cast<double>(n);
}

// Parametric segment intersection: p + t r meets q + u s with t, u in the
// open unit interval; parallel collinear segments count when their
// projections overlap with positive length.
inline bool parametric_cross(Point p, Point p2, Point q, Point q2) {
  const double rx = p2.x - p.x, ry = p2.y - p.y, sx = q2.x - q.x, sy = q2.y - q.y;
  const double qpx = q.x - p.x, qpy = q.y - p.y;
  const double denom = rx * sy - ry * sx;
  if (denom != 0.0) {
    const double t = (qpx * sy - qpy * sx) / denom;
    const double u = (qpx * ry - qpy * rx) / denom;
    return t > 0.0 && t < 1.0 && u > 0.0 && u < 1.0;
  }
  if (qpx * ry - qpy * rx != 0.0) return false;
  const double rr = rx * rx + ry * ry;
  if (rr == 0.0) return false;
  const double t0 = (qpx * rx + qpy * ry) / rr;
  const double t1 = t0 + (sx * rx + sy * ry) / rr;
  return std::min(std::max(t0, t1), 1.0) > std::max(std::min(t0, t1), 0.0);
}

// Every unordered pair of edges with no shared endpoint, no pruning.
inline std::uint64_t count_crossings(const Graph& g, const Layout& y) {
  const auto e = g.edges();
  std::uint64_t c = 0;
  for (std::size_t a = 0; a < e.size(); ++a)
    for (std::size_t b = a + 1; b < e.size(); ++b) {
      const auto [u, v] = e[a];
      const auto [s, t] = e[b];
      if (u == s || u == t || v == s || v == t) continue;
      c += parametric_cross(y[u], y[v], y[s], y[t]);
    }
  return c;
}

// Unscaled stress sum over unordered pairs at scale alpha.
inline double stress_sum(const Graph& g, const Layout& y, double alpha) {
  const auto d = floyd_warshall(g);
  double s = 0.0;
  for (NodeId i = 0; i < g.node_count(); ++i)
    for (NodeId j = i + 1; j < g.node_count(); ++j) {
      const double spd = d[i][j];
      const double r = alpha * drgraph::distance(y[i], y[j]) - spd;
      s += r * r / (spd * spd);
    }
  return s;
}

// Upper critical value of chi-square with `df` degrees of freedom at
// p = 0.001 (Wilson-Hilferty).
inline double chi_square_critical_001(double df) {
  const double z = 3.090232;
  const double a = 2.0 / (9.0 * df);
  return df * std::pow(1.0 - a + z * std::sqrt(a), 3.0);
}

inline double chi_square(const std::vector<std::uint64_t>& observed, const std::vector<double>& probability) {
  double total = 0.0;
  for (auto o : observed) total += static_cast<double>(o);
  double x2 = 0.0;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    const double e = total * probability[i];
    if (e == 0.0) continue;
    const double diff = static_cast<double>(observed[i]) - e;
    x2 += diff * diff / e;
  }
  return x2;
}

}  // namespace oracle
