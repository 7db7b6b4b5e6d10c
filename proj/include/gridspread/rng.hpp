// Copyright (c) 2026 gridspread contributors
// Licensed under Apache License 2.0

#pragma once

#include <cstdint>
#include <string_view>

#include "gridspread/util.hpp"

namespace gridspread {

/// Deterministic splitmix64 stream. Self-contained so that seeded runs
/// produce identical output on every platform and standard library.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    state_ += 0x9e3779b97f4a7c15ull;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  /// Uniform double in [0, 1).
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  /// Uniform double in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [0, n). n must be positive.
  std::uint64_t below(std::uint64_t n) {
    // 53-bit scaling keeps the draw reproducible and unbiased enough
    // for the sample sizes used here.
    auto idx = static_cast<std::uint64_t>(uniform() * static_cast<double>(n));
    return idx >= n ? n - 1 : idx;
  }

  /// Derive an independent stream for a named sub-task of this seed.
  Rng fork(std::string_view label) const {
    std::uint64_t mix = fnv1a64(label) ^ (state_ * 0x9e3779b97f4a7c15ull);
    return Rng(mix);
  }

  std::uint64_t state() const { return state_; }

private:
  std::uint64_t state_;
};

/// Fisher-Yates shuffle driven by the deterministic stream.
template <typename Seq>
void shuffle(Seq& seq, Rng& rng) {
  if (seq.size() < 2) return;
  for (std::size_t i = seq.size() - 1; i > 0; --i) {
    std::size_t j = static_cast<std::size_t>(rng.below(i + 1));
    using std::swap;
    swap(seq[i], seq[j]);
  }
}

}  // namespace gridspread
