#pragma once

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstddef>
#include <cstdint>
#include <istream>
#include <limits>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "drgraph/errors.hpp"

namespace drgraph {

using NodeId = std::uint32_t;
using Edge = std::pair<NodeId, NodeId>;

// Undirected, unweighted, simple graph in compressed-row form.
//
// Every edge {u, v} is stored twice (v in row u and u in row v). Rows are
// sorted and free of duplicates and self-loops.
class Graph {
 public:
  Graph() : offsets_(1, 0) {}

  // Builds from an arbitrary edge list. Self-loops are dropped, reversed and
  // repeated pairs collapse to a single undirected edge.
  static Graph from_edges(std::size_t node_count, std::span<const Edge> edges) {
    std::vector<Edge> directed;
    directed.reserve(edges.size() * 2);
    for (auto [u, v] : edges) {
      if (u >= node_count || v >= node_count)
        throw ArgumentError("edge endpoint out of range");
      if (u == v) continue;
      directed.emplace_back(u, v);
      directed.emplace_back(v, u);
    }
    std::sort(directed.begin(), directed.end());
    directed.erase(std::unique(directed.begin(), directed.end()), directed.end());

    Graph g;
    g.offsets_.assign(node_count + 1, 0);
    for (auto [u, v] : directed) ++g.offsets_[u + 1];
    for (std::size_t i = 0; i < node_count; ++i) g.offsets_[i + 1] += g.offsets_[i];
    g.adjacency_.reserve(directed.size());
    for (auto [u, v] : directed) g.adjacency_.push_back(v);
    return g;
  }

  std::size_t node_count() const noexcept { return offsets_.size() - 1; }
  std::size_t edge_count() const noexcept { return adjacency_.size() / 2; }

  std::span<const NodeId> neighbors(NodeId v) const noexcept {
    return {adjacency_.data() + offsets_[v], adjacency_.data() + offsets_[v + 1]};
  }
  std::size_t degree(NodeId v) const noexcept { return offsets_[v + 1] - offsets_[v]; }

  bool has_edge(NodeId u, NodeId v) const noexcept {
    auto row = neighbors(u);
    return std::binary_search(row.begin(), row.end(), v);
  }

  // Each undirected edge once, as (min, max), in lexicographic order.
  std::vector<Edge> edges() const {
    std::vector<Edge> out;
    out.reserve(edge_count());
    for (NodeId u = 0; u < node_count(); ++u)
      for (NodeId v : neighbors(u))
        if (u < v) out.emplace_back(u, v);
    return out;
  }

  std::size_t storage_bytes() const noexcept {
    return offsets_.capacity() * sizeof(std::size_t) + adjacency_.capacity() * sizeof(NodeId);
  }

  friend bool operator==(const Graph&, const Graph&) = default;

 private:
  std::vector<std::size_t> offsets_;
  std::vector<NodeId> adjacency_;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto ws = " \t\r\n\f\v";
  auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

inline std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t' || s[i] == '\r')) ++i;
    std::size_t j = i;
    while (j < s.size() && s[j] != ' ' && s[j] != '\t' && s[j] != '\r') ++j;
    if (j > i) out.push_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

inline std::optional<std::int64_t> to_int(std::string_view tok) {
  std::int64_t value = 0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
  if (ec != std::errc() || ptr != tok.data() + tok.size()) return std::nullopt;
  return value;
}

}  // namespace detail

// Reads "u v" pairs, one per line. Lines starting with '#' or '%' are
// comments. Node count is max id + 1, unless ids are sparse (max id + 1
// more than twice the number of distinct ids), in which case ids are
// remapped densely in ascending order. `original_ids`, when given, receives
// the file id of every node.
inline Graph parse_edge_list(std::istream& in, std::vector<std::uint64_t>* original_ids = nullptr) {
  std::vector<std::pair<std::uint64_t, std::uint64_t>> raw;
  std::string line;
  std::size_t line_no = 0;
  std::uint64_t max_id = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto body = detail::trim(line);
    if (body.empty() || body.front() == '#' || body.front() == '%') continue;
    auto toks = detail::split_ws(body);
    if (toks.size() != 2) throw ParseError(line_no, "expected two node ids, got " + std::to_string(toks.size()) + " tokens");
    std::uint64_t ids[2];
    for (int t = 0; t < 2; ++t) {
      auto v = detail::to_int(toks[t]);
      if (!v) throw ParseError(line_no, "malformed node id '" + std::string(toks[t]) + "'");
      if (*v < 0) throw ParseError(line_no, "negative node id " + std::to_string(*v));
      ids[t] = static_cast<std::uint64_t>(*v);
      max_id = std::max(max_id, ids[t]);
    }
    raw.emplace_back(ids[0], ids[1]);
  }
  if (raw.empty()) {
    if (original_ids) original_ids->clear();
    return Graph{};
  }

  std::vector<std::uint64_t> distinct;
  distinct.reserve(raw.size() * 2);
  for (auto [u, v] : raw) {
    distinct.push_back(u);
    distinct.push_back(v);
  }
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());

  const bool remap = (max_id + 1) > 2 * static_cast<std::uint64_t>(distinct.size());
  const std::uint64_t n = remap ? distinct.size() : max_id + 1;
  if (n > std::numeric_limits<NodeId>::max()) throw ParseError(line_no, "node id exceeds 32-bit range");

  auto dense = [&](std::uint64_t id) -> NodeId {
    if (!remap) return static_cast<NodeId>(id);
    return static_cast<NodeId>(std::lower_bound(distinct.begin(), distinct.end(), id) - distinct.begin());
  };
  std::vector<Edge> edges;
  edges.reserve(raw.size());
  for (auto [u, v] : raw) edges.emplace_back(dense(u), dense(v));

  if (original_ids) {
    if (remap) {
      *original_ids = std::move(distinct);
    } else {
      original_ids->resize(n);
      for (std::uint64_t i = 0; i < n; ++i) (*original_ids)[i] = i;
    }
  }
  return Graph::from_edges(n, edges);
}

// MatrixMarket coordinate file (pattern, real, integer or complex values;
// values are ignored). Indices are 1-based; the node count is
// max(rows, cols). Diagonal entries are dropped.
inline Graph parse_matrix_market(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw FormatError("empty MatrixMarket stream");
  auto header = detail::split_ws(detail::trim(line));
  auto lower = [](std::string_view s) {
    std::string out(s);
    for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
  };
  if (header.size() < 4 || header[0] != "%%MatrixMarket" || lower(header[1]) != "matrix")
    throw FormatError("missing %%MatrixMarket matrix header");
  if (lower(header[2]) != "coordinate") throw FormatError("only coordinate format is supported");
  const std::string field = lower(header[3]);
  if (field != "pattern" && field != "real" && field != "integer" && field != "complex" && field != "double")
    throw FormatError("unsupported field type '" + field + "'");
  const std::string symmetry = header.size() > 4 ? lower(header[4]) : "general";
  if (symmetry != "general" && symmetry != "symmetric" && symmetry != "skew-symmetric" && symmetry != "hermitian")
    throw FormatError("unsupported symmetry '" + symmetry + "'");

  std::size_t line_no = 1;
  std::int64_t rows = -1, cols = -1, nnz = -1;
  while (std::getline(in, line)) {
    ++line_no;
    auto body = detail::trim(line);
    if (body.empty() || body.front() == '%') continue;
    auto toks = detail::split_ws(body);
    if (toks.size() != 3) throw FormatError("line " + std::to_string(line_no) + ": invalid size line");
    auto r = detail::to_int(toks[0]), c = detail::to_int(toks[1]), z = detail::to_int(toks[2]);
    if (!r || !c || !z || *r < 0 || *c < 0 || *z < 0)
      throw FormatError("line " + std::to_string(line_no) + ": invalid size line");
    rows = *r;
    cols = *c;
    nnz = *z;
    break;
  }
  if (rows < 0) throw FormatError("missing size line");
  const std::int64_t n = std::max(rows, cols);
  if (n > std::numeric_limits<NodeId>::max()) throw FormatError("matrix dimension exceeds 32-bit range");

  std::vector<Edge> edges;
  edges.reserve(static_cast<std::size_t>(nnz));
  std::int64_t seen = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto body = detail::trim(line);
    if (body.empty() || body.front() == '%') continue;
    auto toks = detail::split_ws(body);
    if (toks.size() < 2) throw FormatError("line " + std::to_string(line_no) + ": expected row and column");
    auto r = detail::to_int(toks[0]), c = detail::to_int(toks[1]);
    if (!r || !c) throw FormatError("line " + std::to_string(line_no) + ": malformed index");
    if (*r < 1 || *r > rows || *c < 1 || *c > cols)
      throw FormatError("line " + std::to_string(line_no) + ": index out of declared range");
    edges.emplace_back(static_cast<NodeId>(*r - 1), static_cast<NodeId>(*c - 1));
    ++seen;
  }
  if (seen != nnz)
    throw FormatError("expected " + std::to_string(nnz) + " entries, found " + std::to_string(seen));
  return Graph::from_edges(static_cast<std::size_t>(n), edges);
}

// Inverse of parse_edge_list for graphs without trailing isolated nodes.
inline void write_edge_list(const Graph& g, std::ostream& out) {
  for (auto [u, v] : g.edges()) out << u << ' ' << v << '\n';
}

struct Neighbor {
  NodeId id;
  std::uint32_t distance;

  friend bool operator==(const Neighbor&, const Neighbor&) = default;
};

// Counters for instrumented runs.
struct TraversalStats {
  std::uint64_t edge_visits = 0;
  std::uint64_t node_visits = 0;
};

// Reusable breadth-first search state. Visit marks are epoch stamps, so a
// search costs only what it touches.
class BfsWorkspace {
 public:
  explicit BfsWorkspace(std::size_t node_count) : stamp_(node_count, 0) {}

  // Nodes within `k` hops of `source` (excluding it), sorted by distance
  // then id. `out` is overwritten.
  void run(const Graph& g, NodeId source, std::uint32_t k, std::vector<Neighbor>& out,
           TraversalStats* stats = nullptr) {
    out.clear();
    if (++epoch_ == 0) {
      std::fill(stamp_.begin(), stamp_.end(), 0);
      epoch_ = 1;
    }
    stamp_[source] = epoch_;
    frontier_.assign(1, source);
    for (std::uint32_t d = 1; d <= k && !frontier_.empty(); ++d) {
      next_.clear();
      for (NodeId u : frontier_) {
        for (NodeId v : g.neighbors(u)) {
          if (stats) ++stats->edge_visits;
          if (stamp_[v] == epoch_) continue;
          stamp_[v] = epoch_;
          next_.push_back(v);
        }
      }
      std::sort(next_.begin(), next_.end());
      for (NodeId v : next_) out.push_back({v, d});
      if (stats) stats->node_visits += next_.size();
      frontier_.swap(next_);
    }
  }

 private:
  std::vector<std::uint32_t> stamp_;
  std::uint32_t epoch_ = 0;
  std::vector<NodeId> frontier_, next_;
};

inline std::vector<Neighbor> bfs_k_neighborhood(const Graph& g, NodeId source, std::uint32_t k) {
  if (source >= g.node_count()) throw ArgumentError("source node out of range");
  if (k < 1) throw ArgumentError("hop bound k must be >= 1");
  BfsWorkspace ws(g.node_count());
  std::vector<Neighbor> out;
  ws.run(g, source, k, out);
  return out;
}

// k-hop neighborhoods of every node with exact hop distances, in
// compressed-row form.
class NeighborDistances {
 public:
  NeighborDistances() : offsets_(1, 0) {}
  NeighborDistances(std::vector<std::size_t> offsets, std::vector<Neighbor> entries, std::uint32_t k)
      : offsets_(std::move(offsets)), entries_(std::move(entries)), k_(k) {}

  std::size_t node_count() const noexcept { return offsets_.size() - 1; }
  std::uint32_t k() const noexcept { return k_; }
  std::size_t entry_count() const noexcept { return entries_.size(); }
  std::span<const Neighbor> row(NodeId i) const noexcept {
    return {entries_.data() + offsets_[i], entries_.data() + offsets_[i + 1]};
  }
  std::size_t storage_bytes() const noexcept {
    return offsets_.capacity() * sizeof(std::size_t) + entries_.capacity() * sizeof(Neighbor);
  }

 private:
  std::vector<std::size_t> offsets_;
  std::vector<Neighbor> entries_;
  std::uint32_t k_ = 1;
};

inline NeighborDistances all_k_neighborhoods(const Graph& g, std::uint32_t k, TraversalStats* stats = nullptr) {
  if (k < 1) throw ArgumentError("hop bound k must be >= 1");
  const std::size_t n = g.node_count();
  std::vector<std::size_t> offsets(n + 1, 0);
  std::vector<Neighbor> entries;
  entries.reserve(2 * g.edge_count());
  BfsWorkspace ws(n);
  std::vector<Neighbor> row;
  for (NodeId i = 0; i < n; ++i) {
    ws.run(g, i, k, row, stats);
    entries.insert(entries.end(), row.begin(), row.end());
    offsets[i + 1] = entries.size();
  }
  entries.shrink_to_fit();
  return NeighborDistances(std::move(offsets), std::move(entries), k);
}

// Component label per node; labels are 0..C-1 in order of each component's
// smallest node.
inline std::vector<std::uint32_t> connected_components(const Graph& g) {
  constexpr auto unset = std::numeric_limits<std::uint32_t>::max();
  std::vector<std::uint32_t> label(g.node_count(), unset);
  std::vector<NodeId> stack;
  std::uint32_t next = 0;
  for (NodeId s = 0; s < g.node_count(); ++s) {
    if (label[s] != unset) continue;
    label[s] = next;
    stack.assign(1, s);
    while (!stack.empty()) {
      NodeId u = stack.back();
      stack.pop_back();
      for (NodeId v : g.neighbors(u)) {
        if (label[v] != unset) continue;
        label[v] = next;
        stack.push_back(v);
      }
    }
    ++next;
  }
  return label;
}

inline std::size_t component_count(std::span<const std::uint32_t> labels) {
  std::uint32_t top = 0;
  for (auto l : labels) top = std::max(top, l + 1);
  return top;
}

}  // namespace drgraph
