#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "drgraph/errors.hpp"

namespace drgraph {

// Walker/Vose alias table: O(n) construction, O(1) draws of index i with
// probability weight[i] / total.
class AliasTable {
 public:
  AliasTable() = default;

  explicit AliasTable(std::span<const double> weights) {
    const std::size_t n = weights.size();
    total_ = 0.0;
    for (double w : weights) {
      if (!(w >= 0.0)) throw ConfigError("alias table weights must be non-negative and finite");
      total_ += w;
    }
    if (n == 0 || !(total_ > 0.0)) throw ConfigError("alias table needs positive total weight");

    buckets_.assign(n, Bucket{});
    std::vector<double> scaled(n);
    std::vector<std::uint32_t> small, large;
    small.reserve(n);
    large.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
      scaled[i] = weights[i] * static_cast<double>(n) / total_;
      (scaled[i] < 1.0 ? small : large).push_back(static_cast<std::uint32_t>(i));
    }
    while (!small.empty() && !large.empty()) {
      const auto s = small.back();
      small.pop_back();
      const auto l = large.back();
      buckets_[s] = {scaled[s], l};
      scaled[l] = (scaled[l] + scaled[s]) - 1.0;
      if (scaled[l] < 1.0) {
        large.pop_back();
        small.push_back(l);
      }
    }
    // Leftovers are 1 up to rounding.
    for (auto l : large) buckets_[l] = {1.0, l};
    for (auto s : small) buckets_[s] = {1.0, s};
  }

  struct Bucket {
    double prob = 1.0;     // chance of keeping the bucket's own index
    std::uint32_t alias = 0;
  };

  std::size_t size() const noexcept { return buckets_.size(); }
  const Bucket& bucket(std::size_t b) const noexcept { return buckets_[b]; }
  double total_weight() const noexcept { return total_; }

  // One 64-bit draw: the high half of draw*n picks the bucket, the low
  // half is the coin within it.
  template <class Rng>
  static std::pair<std::size_t, double> draw(Rng& rng, std::size_t n) {
    static_assert(Rng::min() == 0 && Rng::max() == ~std::uint64_t{0}, "needs a full-range 64-bit generator");
    const std::uint64_t r = rng();
    const auto product = static_cast<unsigned __int128>(r) * n;
    const auto bucket = static_cast<std::size_t>(product >> 64);
    const double coin = static_cast<double>(static_cast<std::uint64_t>(product) >> 11) * 0x1.0p-53;
    return {bucket, coin};
  }

  // A draw split in two halves: begin_draw consumes randomness and
  // prefetches the bucket, finish reads it. Lets callers overlap the memory
  // latency of several draws.
  struct Pending {
    std::size_t bucket;
    double coin;
  };

  template <class Rng>
  Pending begin_draw(Rng& rng) const {
    const auto [b, coin] = draw(rng, buckets_.size());
    __builtin_prefetch(&buckets_[b]);
    return {b, coin};
  }

  std::size_t finish(Pending p) const noexcept {
    const Bucket& bk = buckets_[p.bucket];
    return p.coin < bk.prob ? p.bucket : bk.alias;
  }

  template <class Rng>
  std::size_t sample(Rng& rng) const {
    return finish(begin_draw(rng));
  }

  // Probability that sample() returns i, reconstructed from the table.
  std::vector<double> implied_distribution() const {
    std::vector<double> p(size(), 0.0);
    const double inv = 1.0 / static_cast<double>(size());
    for (std::size_t b = 0; b < size(); ++b) {
      p[b] += buckets_[b].prob * inv;
      p[buckets_[b].alias] += (1.0 - buckets_[b].prob) * inv;
    }
    return p;
  }

  std::size_t storage_bytes() const noexcept {
    return buckets_.capacity() * sizeof(Bucket);
  }

 private:
  std::vector<Bucket> buckets_;
  double total_ = 0.0;
};

}  // namespace drgraph
