#include "epca/random.hpp"

#include <cmath>

#include "epca/errors.hpp"

namespace epca {

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

double Rng::normal() {
  constexpr double two_pi = 6.283185307179586476925286766559;
  const double u1 = 1.0 - uniform();  // (0, 1]
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(two_pi * u2);
}

std::int64_t Rng::poisson(double mean) {
  if (!(mean >= 0.0) || !std::isfinite(mean)) throw InvalidArgument("Poisson mean must be >= 0");
  if (mean == 0.0) return 0;
  if (mean < 10.0) {
    double term = std::exp(-mean);
    double cdf = term;
    const double u = uniform();
    std::int64_t k = 0;
    while (u > cdf) {
      ++k;
      term *= mean / static_cast<double>(k);
      cdf += term;
      if (term < 1e-300 && cdf < u) break;  // u rounded above total mass
    }
    return k;
  }
  // Hormann (1993), PTRS.
  const double slam = std::sqrt(mean);
  const double loglam = std::log(mean);
  const double b = 0.931 + 2.53 * slam;
  const double a = -0.059 + 0.02483 * b;
  const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
  const double vr = 0.9277 - 3.6224 / (b - 2.0);
  for (;;) {
    const double u = uniform() - 0.5;
    const double v = uniform();
    const double us = 0.5 - std::abs(u);
    const double k = std::floor((2.0 * a / us + b) * u + mean + 0.43);
    if (us >= 0.07 && v <= vr) return static_cast<std::int64_t>(k);
    if (k < 0.0 || (us < 0.013 && v > us)) continue;
    if (std::log(v) + std::log(inv_alpha) - std::log(a / (us * us) + b) <=
        -mean + k * loglam - std::lgamma(k + 1.0)) {
      return static_cast<std::int64_t>(k);
    }
  }
}

}  // namespace epca
