#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "epca/simgen.hpp"

namespace epca {

/// Rank-one ePCA fit on one spiked Poisson draw. Metrics:
///   het_top      top eigenvalue of S_he (0 if no spike is kept)
///   scaled_top   alpha_1 * het_top
///   improvement  estimated SNR improvement of the top spike
///   sqcorr_epca  squared correlation of the ePCA eigenvector with v
///   kept         1 if the spike cleared the bulk edge
/// With `baselines`, also debiased_top, sqcorr_sample and sqcorr_debiased
/// from the top eigenpairs of S_d and S.
TrialMetrics spiked_trial_metrics(const SpikedPoissonConfig& cfg, bool baselines = false);

/// n_trials draws of spiked_trial_metrics() with seeds base_seed + t.
TrialReport spiked_trials(const SpikedPoissonConfig& cfg, std::size_t n_trials,
                          std::uint64_t base_seed, bool baselines = false, unsigned threads = 1);

/// KS distance between spec(S_h + I) and MP(p / n) for Poisson data with
/// fixed rates on a grid in [1, 3], one value per trial.
std::vector<double> mp_null_ks(Eigen::Index n, Eigen::Index p, std::size_t n_trials,
                               std::uint64_t base_seed);

struct RateCheckResult {
  std::vector<Eigen::Index> sample_sizes;
  std::vector<double> mean_error;  ///< mean ||S_d - Sigma_x||_F per n
  std::vector<double> std_error;
  double slope = 0.0;              ///< least-squares log-log slope
};

/// Frobenius error of the debiased covariance on the Poisson null
/// (Sigma_x = 0) for each sample size.
RateCheckResult rate_check(Eigen::Index p, const std::vector<Eigen::Index>& sample_sizes,
                           std::size_t n_trials, std::uint64_t base_seed);

struct DenoiseComparison {
  double mean_intensity = 0.0;
  double mse_noisy = 0.0;
  double mse_eblp = 0.0;
  double mse_epca_projection = 0.0;
  double mse_sample_projection = 0.0;
  Eigen::Index kept_spikes = 0;
  double fit_seconds = 0.0;
  double eblp_seconds = 0.0;
};

/// Fits ePCA and sample PCA of rank `rank` to one low-rank Poisson draw and
/// reports denoising MSE against the clean signal for EBLP, ePCA projection,
/// sample-PCA projection and the raw observations.
DenoiseComparison denoise_comparison(const LowRankConfig& cfg, Eigen::Index rank,
                                     double epsilon);

}  // namespace epca
