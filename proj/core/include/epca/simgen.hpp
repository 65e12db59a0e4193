#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "epca/covariance.hpp"

namespace epca {

/// Rank-one Poisson model X_i = u + z_i sqrt(ell) v with z_i uniform on
/// [-sqrt(3), sqrt(3)], u on a sorted uniform grid and v a sorted uniform
/// grid normalised to unit length.
struct SpikedPoissonConfig {
  Eigen::Index n = 1000;
  Eigen::Index p = 500;
  double ell = 0.0;
  double u_lo = 1.0;
  double u_hi = 3.0;
  double v_lo = -1.0;
  double v_hi = 1.0;
  std::uint64_t seed = 0;

  double gamma() const { return static_cast<double>(p) / static_cast<double>(n); }
};

struct SpikedSample {
  DataBatch batch;
  Eigen::MatrixXd clean;  ///< X, n x p
  Eigen::VectorXd u;
  Eigen::VectorXd v;      ///< unit norm
  double t = 0.0;         ///< nonzero eigenvalue of Cov[X], equals ell

  Eigen::MatrixXd true_cov() const { return t * v * v.transpose(); }
};

/// Evenly spaced grid of `p` points on [lo, hi] (a single point sits at lo).
Eigen::VectorXd uniform_grid(Eigen::Index p, double lo, double hi);

/// Mean vector u and unit direction v used by the spiked generator.
std::pair<Eigen::VectorXd, Eigen::VectorXd> spiked_profile(const SpikedPoissonConfig& cfg);

/// Predicted transition sqrt(gamma) / (v^T diag(u)^{-1} v).
double spiked_transition(const SpikedPoissonConfig& cfg);

/// Throws InvalidArgument when some mean could go negative
/// (u(j) < sqrt(3 ell) |v(j)|).
SpikedSample gen_spiked_poisson(const SpikedPoissonConfig& cfg);

/// Same latent model with additive N(0, noise_variance) noise, tagged as a
/// known-variance Gaussian family.
SpikedSample gen_spiked_gaussian(const SpikedPoissonConfig& cfg, double noise_variance);

/// Low-rank Poisson model: r basis vectors with uniform [0,1] coordinates
/// normalised to unit L1 norm, per-sample coefficients uniform [0,1]
/// rescaled to sum to A, X_i = sum_k a_ik v_k.
struct LowRankConfig {
  Eigen::Index n = 1000;
  Eigen::Index p = 500;
  Eigen::Index rank = 1;
  std::optional<double> signal_strength;  ///< A; defaults to 25 (1 + sqrt(gamma))^2
  std::uint64_t seed = 0;

  double gamma() const { return static_cast<double>(p) / static_cast<double>(n); }
  double strength() const;
};

/// Moments of a = A w / sum(w) for w uniform on [0,1]^r: common variance
/// of each a_k and covariance between distinct coordinates. Computed from
/// the Laplace representation 1/S^2 = int_0^inf t e^{-tS} dt by quadrature.
struct CoefficientMoments {
  double mean = 0.0;
  double variance = 0.0;
  double covariance = 0.0;
};
CoefficientMoments rescaled_uniform_moments(Eigen::Index rank, double strength);

struct LowRankSample {
  DataBatch batch;
  Eigen::MatrixXd clean;      ///< X, n x p
  Eigen::MatrixXd basis;      ///< p x r, unit L1 columns
  Eigen::VectorXd true_mean;  ///< E[X]
  Eigen::MatrixXd coef_cov;   ///< Cov[a], r x r

  /// Cov[X] = basis Cov[a] basis^T.
  Eigen::MatrixXd true_cov() const { return basis * coef_cov * basis.transpose(); }
};

LowRankSample gen_low_rank_poisson(const LowRankConfig& cfg);

/// Named metric values of one trial, in a fixed order.
using TrialMetrics = std::vector<std::pair<std::string, double>>;

/// Per-trial metric table with across-trial summaries.
class TrialReport {
 public:
  TrialReport() = default;
  TrialReport(std::vector<std::string> names, std::vector<std::vector<double>> rows, std::uint64_t base_seed);

  std::size_t trials() const noexcept { return rows_.size(); }
  const std::vector<std::string>& metric_names() const noexcept { return names_; }
  const std::vector<std::vector<double>>& rows() const noexcept { return rows_; }
  std::uint64_t base_seed() const noexcept { return base_seed_; }

  std::vector<double> values(const std::string& metric) const;
  double mean(const std::string& metric) const;
  /// Sample standard deviation (divisor trials - 1); 0 for a single trial.
  double stddev(const std::string& metric) const;
  double std_error(const std::string& metric) const;

 private:
  std::size_t index_of(const std::string& metric) const;

  std::vector<std::string> names_;
  std::vector<std::vector<double>> rows_;
  std::uint64_t base_seed_ = 0;
};

/// Runs `trial(seed, index)` for index = 0..n_trials-1 with seed = base + index.
/// Trials may run on `threads` workers; results are stored by index so the
/// report does not depend on scheduling. A failing trial aborts the run with
/// its index in the message.
TrialReport run_trials(const std::function<TrialMetrics(std::uint64_t, std::size_t)>& trial,
                       std::size_t n_trials, std::uint64_t base_seed, unsigned threads = 1);

}  // namespace epca
