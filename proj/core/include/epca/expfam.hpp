#pragma once

#include <limits>
#include <string>
#include <string_view>

namespace epca {

enum class FamilyKind { poisson, gaussian, binomial, negative_binomial };

/// Closed interval of admissible mean parameters, the image A'(Theta).
/// Unbounded ends are represented by infinities.
struct MeanDomain {
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();

  bool contains(double m) const noexcept { return m >= lo && m <= hi; }
  double clamp(double m) const noexcept { return m < lo ? lo : (m > hi ? hi : m); }
};

/// One-parameter exponential family, identified by its mean-variance map.
///
/// Nuisance parameters (Gaussian noise variance, binomial trial count,
/// negative-binomial dispersion) are fixed at construction and treated as
/// known.
class ExponentialFamily {
 public:
  static ExponentialFamily poisson() noexcept;
  static ExponentialFamily gaussian(double variance);
  static ExponentialFamily binomial(int trials);
  static ExponentialFamily negative_binomial(double dispersion);

  /// Parses `poisson`, `gaussian:<var>`, `binomial:<k>`, `negbin:<r>`.
  static ExponentialFamily parse(std::string_view spec);

  FamilyKind kind() const noexcept { return kind_; }
  /// sigma^2, k or r depending on the kind; 0 for Poisson.
  double parameter() const noexcept { return param_; }
  MeanDomain mean_domain() const noexcept;

  /// Inverse of parse().
  std::string to_string() const;

  bool operator==(const ExponentialFamily&) const = default;

 private:
  ExponentialFamily(FamilyKind kind, double param) noexcept : kind_(kind), param_(param) {}

  FamilyKind kind_ = FamilyKind::poisson;
  double param_ = 0.0;
};

/// True iff `m` lies in the family's mean domain (boundaries included).
bool validate_mean(const ExponentialFamily& family, double m) noexcept;

/// V(m) = A''((A')^{-1}(m)).
///
/// Out-of-domain means raise DomainError unless `clamp_means` is set, in
/// which case `m` is first moved to the nearest domain point.
double variance_map(const ExponentialFamily& family, double m, bool clamp_means = false);

}  // namespace epca
