#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace epca {

/// Identifies the generator and stream-derivation rule written into reports.
inline constexpr std::string_view kRngName = "mt19937_64/splitmix64-v1";

/// SplitMix64 finalizer, used to decorrelate consecutive seeds.
std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// Seed of Monte-Carlo trial `trial`: base + trial.
constexpr std::uint64_t trial_seed(std::uint64_t base, std::uint64_t trial) noexcept {
  return base + trial;
}

/// Seeded random source. The engine is std::mt19937_64 initialised with
/// splitmix64(seed); all variates are derived here rather than through
/// <random> distributions, so streams are identical across standard
/// libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(splitmix64(seed)) {}

  std::uint64_t next_u64() { return engine_(); }
  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Standard normal (Box-Muller, one variate per call).
  double normal();
  /// Poisson variate: inversion below mean 10, PTRS transformed rejection
  /// at and above.
  std::int64_t poisson(double mean);

 private:
  std::mt19937_64 engine_;
};

}  // namespace epca
