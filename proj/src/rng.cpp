#include "genpoly/rng.hpp"

#include <algorithm>

#include "genpoly/errors.hpp"

namespace genpoly {

std::uint64_t derive_seed(std::uint64_t parent, std::string_view label) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : label) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return mix64(mix64(parent) ^ h);
}

std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t index) {
  return mix64(mix64(parent) + mix64(index ^ 0xa0761d6478bd642fULL));
}

std::uint64_t CounterRng::below(std::uint64_t bound) {
  if (bound == 0) throw DomainError("CounterRng::below: empty range");
  // Lemire's multiply-shift with rejection.
  while (true) {
    unsigned __int128 m = static_cast<unsigned __int128>(next()) * bound;
    auto low = static_cast<std::uint64_t>(m);
    if (low >= bound || low >= (-bound) % bound) {
      return static_cast<std::uint64_t>(m >> 64);
    }
  }
}

DiscreteSampler::DiscreteSampler(std::span<const double> probs) {
  if (probs.empty()) throw ValidationError("DiscreteSampler: empty distribution");
  cumulative_.reserve(probs.size());
  double acc = 0.0;
  for (double p : probs) {
    if (p < 0.0) throw ValidationError("DiscreteSampler: negative probability");
    acc += p;
    cumulative_.push_back(acc);
  }
  if (acc <= 0.0) throw ValidationError("DiscreteSampler: zero total mass");
  for (double& c : cumulative_) c /= acc;
  cumulative_.back() = 1.0;
}

std::size_t DiscreteSampler::operator()(CounterRng& rng) const {
  double u = rng.uniform();
  auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
  // upper_bound never lands on a zero-probability atom.
  auto idx = static_cast<std::size_t>(it - cumulative_.begin());
  return std::min(idx, cumulative_.size() - 1);
}

}  // namespace genpoly
