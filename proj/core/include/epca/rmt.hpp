#pragma once

#include <Eigen/Dense>

#include "epca/errors.hpp"

namespace epca {

struct CovarianceModel;

/// Raised by spike_inverse() for eigenvalues at or inside the bulk edge.
class BelowTransitionError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// Standard Marchenko-Pastur law with aspect ratio gamma = p / n.
class MpDistribution {
 public:
  explicit MpDistribution(double gamma);

  double gamma() const noexcept { return gamma_; }
  double support_lo() const noexcept { return lo_; }
  double support_hi() const noexcept { return hi_; }
  /// Point mass at zero, 1 - 1/gamma for gamma > 1.
  double atom_at_zero() const noexcept { return atom_; }

 private:
  double gamma_;
  double lo_;
  double hi_;
  double atom_;
};

/// (1 + sqrt(gamma))^2.
double bulk_edge(double gamma);

/// Density of the continuous part; 0 outside (lo, hi).
double mp_pdf(const MpDistribution& d, double x);

/// Distribution function including the zero atom; absolute error <= 1e-8.
double mp_cdf(const MpDistribution& d, double x);

/// Limit of the top sample eigenvalue for population spike `ell`:
/// (1 + ell)(1 + gamma / ell) above sqrt(gamma), the bulk edge otherwise.
double spike_forward(double ell, double gamma);

/// Inverse of spike_forward() on (bulk edge, inf). Throws
/// BelowTransitionError when lambda <= bulk edge.
double spike_inverse(double lambda, double gamma);

/// Limiting squared cosine between sample and population eigenvectors:
/// (1 - gamma / ell^2) / (1 + gamma / ell) above sqrt(gamma), else 0.
double cosine_sq(double ell, double gamma);

/// SNR gain of homogenization, (tr D / p) * (v^T D^{-1} v) / (v^T v).
double snr_improvement(const Eigen::VectorXd& v, const Eigen::VectorXd& noise);

/// (sum D_i)(sum 1/D_i) / p^2, always >= 1.
double beta_heteroskedasticity(const Eigen::VectorXd& noise);

/// tau_i / alpha_i for spike `index` of a fitted model, bounded by the
/// Rayleigh-quotient range of the SNR gain. Spikes below the transition carry
/// no eigenpair and report 1.
double estimated_improvement(const CovarianceModel& model, Eigen::Index index);

/// Kolmogorov-Smirnov distance between the empirical distribution of
/// `eigenvalues` and `d`.
double ks_statistic(const Eigen::VectorXd& eigenvalues, const MpDistribution& d);

}  // namespace epca
