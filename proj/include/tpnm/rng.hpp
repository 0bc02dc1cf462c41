#pragma once

#include <cstdint>
#include <random>
#include <span>

namespace tpnm {

/// Seeded RNG with pinned conversions so streams are identical across
/// platforms and standard-library versions (std distributions are
/// implementation-defined; we only use the raw mt19937_64 output).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  /// Uniform double in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [lo, hi] inclusive.
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
    const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
    return lo + static_cast<std::int64_t>(next_u64() % span);
  }

  /// Samples an index from non-negative weights (need not be normalized).
  std::size_t weighted_index(std::span<const double> weights) {
    double total = 0.0;
    for (double w : weights) total += w;
    double u = uniform() * total;
    for (std::size_t i = 0; i < weights.size(); ++i) {
      u -= weights[i];
      if (u < 0.0) return i;
    }
    return weights.size() - 1;
  }

  /// Derives an independent stream, e.g. one per instance.
  Rng fork(std::uint64_t stream) {
    return Rng(next_u64() ^ (stream * 0x9e3779b97f4a7c15ull));
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace tpnm
