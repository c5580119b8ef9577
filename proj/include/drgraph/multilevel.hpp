#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <ostream>
#include <random>
#include <span>
#include <vector>

#include "drgraph/graph.hpp"
#include "drgraph/layout.hpp"

namespace drgraph {

// parent[v] is the node of G^{l+1} that v in G^l was merged into.
struct CoarseningMap {
  std::vector<NodeId> parent;
  std::size_t coarse_count = 0;

  friend bool operator==(const CoarseningMap&, const CoarseningMap&) = default;
};

struct Coarsening {
  Graph graph;
  CoarseningMap map;
};

// Coarsens by visiting nodes in `order`: each still-unassigned node opens a
// new group together with its still-unassigned direct neighbors. Coarse
// edges are the deduplicated images of fine edges whose endpoints landed in
// different groups.
inline Coarsening coarsen_with_order(const Graph& g, std::span<const NodeId> order) {
  constexpr auto unassigned = std::numeric_limits<NodeId>::max();
  const std::size_t n = g.node_count();
  CoarseningMap map;
  map.parent.assign(n, unassigned);
  NodeId next = 0;
  for (NodeId v : order) {
    if (map.parent[v] != unassigned) continue;
    map.parent[v] = next;
    for (NodeId u : g.neighbors(v))
      if (map.parent[u] == unassigned) map.parent[u] = next;
    ++next;
  }
  // Nodes missing from a partial order become singletons.
  for (NodeId v = 0; v < n; ++v)
    if (map.parent[v] == unassigned) map.parent[v] = next++;
  map.coarse_count = next;

  std::vector<Edge> coarse_edges;
  coarse_edges.reserve(g.edge_count());
  for (NodeId u = 0; u < n; ++u)
    for (NodeId v : g.neighbors(u))
      if (u < v && map.parent[u] != map.parent[v]) coarse_edges.emplace_back(map.parent[u], map.parent[v]);
  return {Graph::from_edges(next, coarse_edges), std::move(map)};
}

inline Coarsening coarsen_once(const Graph& g, std::uint64_t seed) {
  std::vector<NodeId> order(g.node_count());
  std::iota(order.begin(), order.end(), NodeId{0});
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  return coarsen_with_order(g, order);
}

// G^0 (borrowed) followed by successively coarser graphs G^1..G^L. The
// input graph must outlive the hierarchy.
class Hierarchy {
 public:
  Hierarchy(const Graph& base, double rho, std::size_t min_size) : base_(&base), rho_(rho), min_size_(min_size) {}

  std::size_t level_count() const noexcept { return coarse_.size() + 1; }
  std::size_t coarsest_level() const noexcept { return coarse_.size(); }
  const Graph& level(std::size_t l) const {
    if (l >= level_count()) throw ArgumentError("hierarchy level out of range");
    return l == 0 ? *base_ : coarse_[l - 1];
  }
  // Map from level l to level l+1.
  const CoarseningMap& map(std::size_t l) const {
    if (l >= maps_.size()) throw ArgumentError("coarsening map index out of range");
    return maps_[l];
  }
  double rho() const noexcept { return rho_; }
  std::size_t min_size() const noexcept { return min_size_; }

  void push(Coarsening c) {
    coarse_.push_back(std::move(c.graph));
    maps_.push_back(std::move(c.map));
  }

  // Bytes owned by coarse levels and maps (G^0 is borrowed).
  std::size_t storage_bytes() const noexcept {
    std::size_t bytes = 0;
    for (const auto& g : coarse_) bytes += g.storage_bytes();
    for (const auto& m : maps_) bytes += m.parent.capacity() * sizeof(NodeId);
    return bytes;
  }

 private:
  const Graph* base_;
  std::vector<Graph> coarse_;
  std::vector<CoarseningMap> maps_;
  double rho_;
  std::size_t min_size_;
};

// Coarsens until the next level would keep more than rho of the current
// nodes, or the current level has at most `min_size` nodes.
inline Hierarchy build_hierarchy(const Graph& g, double rho = 0.8, std::size_t min_size = 16, std::uint64_t seed = 1) {
  if (!(rho > 0.0 && rho < 1.0)) throw ArgumentError("rho must lie in (0, 1)");
  if (min_size < 1) throw ArgumentError("min_size must be >= 1");
  Hierarchy h(g, rho, min_size);
  std::mt19937_64 seeder(seed);
  while (true) {
    const Graph& current = h.level(h.coarsest_level());
    const std::size_t n = current.node_count();
    if (n <= min_size) break;
    auto c = coarsen_once(current, seeder());
    if (static_cast<double>(c.graph.node_count()) > rho * static_cast<double>(n)) break;
    h.push(std::move(c));
  }
  return h;
}

// Flat map from G^0 nodes to their ancestors in G^l; identity for l = 0.
inline std::vector<NodeId> compose_maps(const Hierarchy& h, std::size_t l) {
  if (l >= h.level_count()) throw ArgumentError("hierarchy level out of range");
  std::vector<NodeId> flat(h.level(0).node_count());
  std::iota(flat.begin(), flat.end(), NodeId{0});
  for (std::size_t step = 0; step < l; ++step) {
    const auto& parent = h.map(step).parent;
    for (auto& v : flat) v = parent[v];
  }
  return flat;
}

// Fine positions = parent position + N(0, jitter^2) per coordinate.
inline Layout prolong(const Layout& coarse, const CoarseningMap& map, double jitter, std::uint64_t seed) {
  Layout fine(map.parent.size());
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, 1.0);
  for (std::size_t v = 0; v < map.parent.size(); ++v) {
    Point p = coarse[map.parent[v]];
    if (jitter > 0.0) {
      p.x += jitter * noise(rng);
      p.y += jitter * noise(rng);
    }
    fine[v] = p;
  }
  return fine;
}

// Per level: "|V| |E|" then the parent array (absent for the coarsest).
inline void write_hierarchy(const Hierarchy& h, std::ostream& out) {
  for (std::size_t l = 0; l < h.level_count(); ++l) {
    const auto& g = h.level(l);
    out << g.node_count() << ' ' << g.edge_count() << '\n';
    if (l + 1 < h.level_count()) {
      const auto& parent = h.map(l).parent;
      for (std::size_t v = 0; v < parent.size(); ++v) out << (v ? " " : "") << parent[v];
      out << '\n';
    }
  }
}

}  // namespace drgraph
