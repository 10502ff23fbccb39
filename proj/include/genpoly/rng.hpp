#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace genpoly {

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Derives a child seed from a parent seed and a label (FNV-1a over the label).
std::uint64_t derive_seed(std::uint64_t parent, std::string_view label);
std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t index);

/// Counter-based generator: the i-th output depends only on (key, i), so
/// streams are reproducible across platforms and independent of scheduling.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t key, std::uint64_t start = 0)
      : key_(mix64(key)), counter_(start) {}

  std::uint64_t next() { return mix64(key_ ^ mix64(counter_++)); }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [0, bound).
  std::uint64_t below(std::uint64_t bound);

  bool bernoulli(double p) { return uniform() < p; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_;
};

/// Inverse-CDF sampler for a finite distribution.
class DiscreteSampler {
 public:
  explicit DiscreteSampler(std::span<const double> probs);
  std::size_t operator()(CounterRng& rng) const;
  std::size_t size() const { return cumulative_.size(); }

 private:
  std::vector<double> cumulative_;
};

}  // namespace genpoly
