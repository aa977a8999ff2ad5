#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

namespace resilib {

/// Counter-based pseudo-random generator.
///
/// Output i of a stream with key k is mix64(k + i * phi64), the SplitMix64
/// construction. Independent streams are derived by hashing a label into the
/// key, so adding a new consumer never perturbs the draws of existing ones,
/// and a run is reproducible from (experiment tag, seed) alone.
class Rng {
public:
  explicit Rng(std::uint64_t key) : state_(key) {}

  /// Root generator for one (experiment, seed) pair.
  static Rng seeded(std::string_view experiment, std::uint64_t seed);

  /// Child stream for a named component ("plant_noise", "channel", ...).
  [[nodiscard]] Rng stream(std::string_view label) const;
  /// Child stream for an indexed component (per node, per token, ...).
  [[nodiscard]] Rng stream(std::uint64_t index) const;

  std::uint64_t next_u64();

  /// Uniform on [0, 1).
  double uniform();
  /// Uniform on [lo, hi).
  double uniform(double lo, double hi);
  /// Unbiased uniform integer on [0, n); n must be positive.
  std::uint64_t uniform_int(std::uint64_t n);
  bool bernoulli(double p);

  /// Standard normal via Box-Muller (two uniforms per draw, no cached spare).
  double normal();
  double normal(double mean, double stddev);

  /// Fisher-Yates shuffle.
  template <typename T>
  void shuffle(std::vector<T>& values) {
    for (std::size_t i = values.size(); i > 1; --i) {
      std::swap(values[i - 1], values[static_cast<std::size_t>(uniform_int(i))]);
    }
  }

  /// k distinct indices drawn from [0, n).
  std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t k);

private:
  std::uint64_t state_;
};

/// 64-bit FNV-1a, used to fold labels into stream keys.
std::uint64_t fnv1a64(std::string_view text);

}  // namespace resilib
