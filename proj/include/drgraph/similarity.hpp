#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <ostream>
#include <span>
#include <vector>

#include "drgraph/graph.hpp"

namespace drgraph {

struct SimilarityParams {
  std::uint32_t k = 1;
  // Target perplexity for k >= 2. Empty means per-node "auto":
  // min(|NNG(i,k)|, deg(i)).
  std::optional<double> perplexity;
  double tolerance = 1e-5;
  int max_iterations = 64;
  double sigma_min = 1e-5;
  double sigma_max = 1e5;
};

struct WeightedNeighbor {
  NodeId id;
  double weight;

  friend bool operator==(const WeightedNeighbor&, const WeightedNeighbor&) = default;
};

struct SimilarityStats {
  std::uint64_t kernel_evaluations = 0;
};

// exp(-d^2 / (2 sigma^2)); the one place the Gaussian kernel is evaluated.
inline double gaussian_kernel(std::uint32_t d, double sigma) {
  const double dd = static_cast<double>(d);
  return std::exp(-(dd * dd) / (2.0 * sigma * sigma));
}

// table[d-1] = exp(-d^2 / (2 sigma^2)) for d = 1..k.
inline std::vector<double> precompute_gaussian_table(std::uint32_t k, double sigma) {
  std::vector<double> table(k);
  for (std::uint32_t d = 1; d <= k; ++d) table[d - 1] = gaussian_kernel(d, sigma);
  return table;
}

namespace detail {

inline bool uniform_distances(std::span<const Neighbor> row) {
  return std::all_of(row.begin(), row.end(), [&](const Neighbor& n) { return n.distance == row.front().distance; });
}

inline std::uint32_t max_distance(std::span<const Neighbor> row) {
  std::uint32_t m = 0;
  for (const auto& n : row) m = std::max(m, n.distance);
  return m;
}

// Normalized row from a kernel table; falls back to kernels shifted by the
// nearest distance when every entry underflows.
inline std::vector<WeightedNeighbor> normalized_row(std::span<const Neighbor> row, std::span<const double> table,
                                                    double sigma) {
  std::vector<WeightedNeighbor> out;
  out.reserve(row.size());
  double sum = 0.0;
  for (const auto& n : row) {
    out.push_back({n.id, table[n.distance - 1]});
    sum += out.back().weight;
  }
  if (!(sum > 0.0)) {
    std::uint32_t dmin = row.front().distance;
    for (const auto& n : row) dmin = std::min(dmin, n.distance);
    const double d0 = static_cast<double>(dmin);
    sum = 0.0;
    for (std::size_t t = 0; t < row.size(); ++t) {
      const double d = static_cast<double>(row[t].distance);
      out[t].weight = std::exp(-(d * d - d0 * d0) / (2.0 * sigma * sigma));
      sum += out[t].weight;
    }
  }
  for (auto& w : out) w.weight /= sum;
  return out;
}

// Perplexity 2^H of the row at `sigma`, computed from the per-distance
// histogram so the cost is O(k) kernel evaluations.
inline double row_perplexity(std::span<const std::uint64_t> hist, double sigma, SimilarityStats* stats) {
  const double inv = 1.0 / (2.0 * sigma * sigma);
  std::size_t first = 0;
  while (first < hist.size() && hist[first] == 0) ++first;
  const double d0 = static_cast<double>(first + 1);
  double z = 0.0, weighted_log = 0.0;
  for (std::size_t d = first; d < hist.size(); ++d) {
    if (hist[d] == 0) continue;
    const double dd = static_cast<double>(d + 1);
    const double exponent = -(dd * dd - d0 * d0) * inv;
    const double w = std::exp(exponent);
    if (stats) ++stats->kernel_evaluations;
    z += static_cast<double>(hist[d]) * w;
    weighted_log += static_cast<double>(hist[d]) * w * exponent;
  }
  // H (nats) = log z - E[exponent]
  const double h_nats = std::log(z) - weighted_log / z;
  return std::exp2(h_nats / std::log(2.0));
}

}  // namespace detail

// Conditional similarities NS_{j|i} over the k-hop neighborhood of node i.
// Returns an empty row for an isolated node.
inline std::vector<WeightedNeighbor> conditional_similarity_row(std::span<const Neighbor> row, double sigma) {
  if (row.empty()) return {};
  if (detail::uniform_distances(row)) {
    std::vector<WeightedNeighbor> out;
    out.reserve(row.size());
    const double w = 1.0 / static_cast<double>(row.size());
    for (const auto& n : row) out.push_back({n.id, w});
    return out;
  }
  const auto table = precompute_gaussian_table(detail::max_distance(row), sigma);
  return detail::normalized_row(row, table, sigma);
}

// Same as above but evaluating the kernel directly per entry. Kept as the
// reference path for the table-based computation.
inline std::vector<WeightedNeighbor> conditional_similarity_row_direct(std::span<const Neighbor> row, double sigma) {
  if (row.empty()) return {};
  if (detail::uniform_distances(row)) return conditional_similarity_row(row, sigma);
  std::vector<WeightedNeighbor> out;
  double sum = 0.0;
  for (const auto& n : row) {
    out.push_back({n.id, gaussian_kernel(n.distance, sigma)});
    sum += out.back().weight;
  }
  if (!(sum > 0.0)) return conditional_similarity_row(row, sigma);
  for (auto& w : out) w.weight /= sum;
  return out;
}

// Shannon entropy (bits) of a probability row.
inline double row_entropy_bits(std::span<const WeightedNeighbor> row) {
  double h = 0.0;
  for (const auto& w : row)
    if (w.weight > 0.0) h -= w.weight * std::log2(w.weight);
  return h;
}

// Bandwidth sigma_i whose conditional row has perplexity `target`, found by
// bisection in log-space over [sigma_min, sigma_max]. The target is clamped
// to [1, |row|]. Rows with one neighbor or a single distance value return 1
// (the row does not depend on sigma).
inline double search_sigma(std::span<const Neighbor> row, double target, double tol = 1e-5, int max_iter = 64,
                           double sigma_min = 1e-5, double sigma_max = 1e5, SimilarityStats* stats = nullptr) {
  if (row.size() <= 1 || detail::uniform_distances(row)) return 1.0;
  target = std::clamp(target, 1.0, static_cast<double>(row.size()));

  std::vector<std::uint64_t> hist(detail::max_distance(row), 0);
  for (const auto& n : row) ++hist[n.distance - 1];

  double lo = std::log(sigma_min), hi = std::log(sigma_max);
  double best_sigma = 1.0, best_err = std::numeric_limits<double>::infinity();
  for (int it = 0; it < max_iter; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double sigma = std::exp(mid);
    const double perp = detail::row_perplexity(hist, sigma, stats);
    const double err = std::abs(perp - target);
    if (err < best_err) {
      best_err = err;
      best_sigma = sigma;
    }
    if (err <= tol) break;
    if (perp < target)
      lo = mid;
    else
      hi = mid;
  }
  return best_sigma;
}

// Symmetric, globally normalized node similarity restricted to k-hop
// neighborhoods. Rows are sorted by neighbor id; NS_ij and NS_ji hold the
// same double.
class SparseSimilarity {
 public:
  SparseSimilarity() : offsets_(1, 0) {}
  SparseSimilarity(std::vector<std::size_t> offsets, std::vector<WeightedNeighbor> entries)
      : offsets_(std::move(offsets)), entries_(std::move(entries)) {
    for (const auto& e : entries_) total_mass_ += e.weight;
  }

  std::size_t node_count() const noexcept { return offsets_.size() - 1; }
  std::size_t entry_count() const noexcept { return entries_.size(); }
  std::span<const WeightedNeighbor> row(NodeId i) const noexcept {
    return {entries_.data() + offsets_[i], entries_.data() + offsets_[i + 1]};
  }
  std::span<const WeightedNeighbor> entries() const noexcept { return entries_; }
  std::span<const std::size_t> offsets() const noexcept { return offsets_; }
  double total_mass() const noexcept { return total_mass_; }

  double row_mass(NodeId i) const noexcept {
    double s = 0.0;
    for (const auto& e : row(i)) s += e.weight;
    return s;
  }

  // NS_ij, zero outside the stored pattern.
  double at(NodeId i, NodeId j) const noexcept {
    auto r = row(i);
    auto it = std::lower_bound(r.begin(), r.end(), j, [](const WeightedNeighbor& w, NodeId id) { return w.id < id; });
    return (it != r.end() && it->id == j) ? it->weight : 0.0;
  }

  std::size_t storage_bytes() const noexcept {
    return offsets_.capacity() * sizeof(std::size_t) + entries_.capacity() * sizeof(WeightedNeighbor);
  }

 private:
  std::vector<std::size_t> offsets_;
  std::vector<WeightedNeighbor> entries_;
  double total_mass_ = 0.0;
};

// NS_ij = (NS_{i|j} + NS_{j|i}) / (2 |V'|), where V' are the nodes with a
// nonempty neighborhood (|V'| = |V| when there are no isolated nodes).
inline SparseSimilarity build_sparse_similarity(const NeighborDistances& nd, const SimilarityParams& params = {},
                                                SimilarityStats* stats = nullptr) {
  const std::size_t n = nd.node_count();
  std::vector<std::size_t> offsets(n + 1, 0);
  std::vector<WeightedNeighbor> cond;
  cond.reserve(nd.entry_count());
  std::size_t active = 0;

  for (NodeId i = 0; i < n; ++i) {
    auto row = nd.row(i);
    if (!row.empty()) ++active;
    std::vector<WeightedNeighbor> r;
    if (!row.empty() && detail::uniform_distances(row)) {
      r = conditional_similarity_row(row, 1.0);
    } else if (!row.empty()) {
      const double target = params.perplexity.value_or(static_cast<double>(
          std::min<std::size_t>(row.size(), static_cast<std::size_t>(std::count_if(
                                                row.begin(), row.end(), [](const Neighbor& x) { return x.distance == 1; })))));
      const double sigma = search_sigma(row, target, params.tolerance, params.max_iterations, params.sigma_min,
                                        params.sigma_max, stats);
      const auto table = precompute_gaussian_table(detail::max_distance(row), sigma);
      if (stats) stats->kernel_evaluations += table.size();
      r = detail::normalized_row(row, table, sigma);
    }
    std::sort(r.begin(), r.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
    cond.insert(cond.end(), r.begin(), r.end());
    offsets[i + 1] = cond.size();
  }

  const double scale = active > 0 ? 1.0 / (2.0 * static_cast<double>(active)) : 0.0;
  auto find = [&](NodeId row_id, NodeId col) -> std::size_t {
    auto b = cond.begin() + static_cast<std::ptrdiff_t>(offsets[row_id]);
    auto e = cond.begin() + static_cast<std::ptrdiff_t>(offsets[row_id + 1]);
    auto it = std::lower_bound(b, e, col, [](const WeightedNeighbor& w, NodeId id) { return w.id < id; });
    return static_cast<std::size_t>(it - cond.begin());
  };

  std::vector<WeightedNeighbor> joint(cond.size());
  for (NodeId i = 0; i < n; ++i) {
    for (std::size_t t = offsets[i]; t < offsets[i + 1]; ++t) {
      const NodeId j = cond[t].id;
      joint[t].id = j;
      if (j < i) continue;
      const std::size_t back = find(j, i);
      const double v = (cond[t].weight + cond[back].weight) * scale;
      joint[t].weight = v;
      joint[back].weight = v;
    }
  }
  return SparseSimilarity(std::move(offsets), std::move(joint));
}

// Debug dump: one "i j NS_ij" triple per stored entry.
inline void write_similarity(const SparseSimilarity& ns, std::ostream& out) {
  const auto old_precision = out.precision(17);
  for (NodeId i = 0; i < ns.node_count(); ++i)
    for (const auto& e : ns.row(i)) out << i << ' ' << e.id << ' ' << e.weight << '\n';
  out.precision(old_precision);
}

}  // namespace drgraph
