#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <vector>

#include "epca/expfam.hpp"
#include "epca/linalg.hpp"

namespace epca {

/// Noise variances at or below this value mark a feature as degenerate.
inline constexpr double kDegenerateNoiseThreshold = 1e-12;

/// Lower clip for the eigenvalue scaling coefficients.
inline constexpr double kMinScalingCoefficient = 1e-6;

/// n x p observations (rows are samples) together with the exponential
/// family of every column. A single family applies to all columns.
class DataBatch {
 public:
  DataBatch(Eigen::MatrixXd values, ExponentialFamily family);
  DataBatch(Eigen::MatrixXd values, std::vector<ExponentialFamily> families);

  const Eigen::MatrixXd& values() const noexcept { return values_; }
  Eigen::Index n() const noexcept { return values_.rows(); }
  Eigen::Index p() const noexcept { return values_.cols(); }

  const ExponentialFamily& family(Eigen::Index column) const;
  /// Either one entry (shared) or one per column.
  const std::vector<ExponentialFamily>& families() const noexcept { return families_; }

 private:
  void validate() const;

  Eigen::MatrixXd values_;
  std::vector<ExponentialFamily> families_;
};

struct MomentSummary {
  Eigen::VectorXd mean;        ///< sample mean Ybar
  Eigen::MatrixXd sample_cov;  ///< S, divisor n
  Eigen::VectorXd noise_diag;  ///< V_j(Ybar(j))
  double gamma = 0.0;          ///< p / n
  Eigen::Index n = 0;

  Eigen::Index p() const noexcept { return mean.size(); }
};

/// Ybar, S = n^{-1} sum (Y_i - Ybar)(Y_i - Ybar)^T and D_n = diag[V(Ybar)].
///
/// The reduction runs in a fixed sequential order, so repeated calls on the
/// same batch are bit-identical.
MomentSummary sample_moments(const DataBatch& batch, bool clamp_means = false);

/// S_d = S - D_n. May be indefinite.
Eigen::MatrixXd debias(const MomentSummary& ms);

/// Columns whose noise variance is <= threshold.
std::vector<std::size_t> degenerate_columns(const MomentSummary& ms,
                                            double threshold = kDegenerateNoiseThreshold);

/// Restriction of the summary to all columns except `dropped` (sorted,
/// unique). gamma is recomputed from the remaining dimension.
MomentSummary drop_columns(const MomentSummary& ms, const std::vector<std::size_t>& dropped);

/// S_h = D_n^{-1/2} S D_n^{-1/2} - I. Throws DegenerateFeatureError when any
/// noise variance is <= kDegenerateNoiseThreshold.
Eigen::MatrixXd homogenize(const MomentSummary& ms);

/// Correlation matrix diag(S)^{-1/2} S diag(S)^{-1/2}.
Eigen::MatrixXd standardize(const MomentSummary& ms);

struct ShrunkSpikes {
  Eigen::Index kept = 0;   ///< number of nonzero entries of ell_hat
  Eigen::VectorXd ell_hat; ///< one entry per requested spike
};

/// Maps the top `rank` eigenvalues of S_h to spike estimates by inverting
/// the spike forward map; eigenvalues inside the shifted MP bulk give 0.
ShrunkSpikes shrink_spikes(const Eigen::VectorXd& eigenvalues_desc, double gamma,
                           Eigen::Index rank);

/// Factored S_{h,eta} = sum_i spikes(i) w_i w_i^T with orthonormal w_i.
struct SpikeFactors {
  Eigen::VectorXd spikes;
  Eigen::MatrixXd vectors;  ///< p x k
};

/// Dense S_he = D_n^{1/2} S_{h,eta} D_n^{1/2}.
Eigen::MatrixXd heterogenize(const MomentSummary& ms, const SpikeFactors& shrunk);

/// Nonzero eigenpairs of S_he, computed from its rank-k factor.
EigenPairs heterogenized_eigenpairs(const MomentSummary& ms, const SpikeFactors& shrunk);

/// Output of the full pipeline. Only spikes above the bulk edge carry
/// eigenpairs; `homogenized_spikes` keeps one entry per requested spike.
struct CovarianceModel {
  Eigen::Index requested_rank = 0;
  Eigen::VectorXd homogenized_spikes;  ///< ell_hat, length requested_rank
  Eigen::MatrixXd het_eigvecs;         ///< p' x k, orthonormal columns
  Eigen::VectorXd het_eigvals;         ///< lambda_hat of S_he, descending
  Eigen::VectorXd alphas;              ///< scaling coefficients in (0, 1]
  Eigen::VectorXd taus;                ///< (tr D_n / p) * ell_hat / lambda_hat
  Eigen::VectorXd noise_diag;          ///< over retained columns
  Eigen::VectorXd mean;                ///< over retained columns
  double gamma = 0.0;
  Eigen::Index n_samples = 0;
  Eigen::Index input_dim = 0;          ///< column count before dropping
  std::vector<std::size_t> dropped_columns;
  std::vector<ExponentialFamily> families;

  /// Number of spikes above the transition (eigenpairs carried).
  Eigen::Index rank() const noexcept { return het_eigvals.size(); }
  Eigen::Index dim() const noexcept { return mean.size(); }

  Eigen::VectorXd scaled_eigvals() const { return alphas.cwiseProduct(het_eigvals); }
  /// S_s = sum alpha_i lambda_i u_i u_i^T.
  Eigen::MatrixXd scaled_covariance() const;
  Eigen::MatrixXd heterogenized_covariance() const;
  std::vector<std::size_t> kept_columns() const;
};

/// Turns S_he eigenpairs and spike estimates into the scaled model.
/// `ell_hat` is sorted descending and pairs index-wise with `het`.
CovarianceModel scale(const MomentSummary& ms, const EigenPairs& het,
                      const Eigen::VectorXd& ell_hat);

struct FitOptions {
  bool drop_degenerate = false;
  bool clamp_means = false;
  double degenerate_threshold = kDegenerateNoiseThreshold;
};

/// Moments, homogenization, shrinkage, heterogenization and scaling.
CovarianceModel fit_epca(const DataBatch& batch, Eigen::Index rank, const FitOptions& options = {});

/// Same as fit_epca() starting from precomputed moments.
CovarianceModel fit_epca_from_moments(const MomentSummary& ms, Eigen::Index rank,
                                      const FitOptions& options = {});

/// HWE weights 1 / sqrt(2 q (1 - q)) with q = mean / 2.
Eigen::VectorXd hwe_weights(const Eigen::VectorXd& genotype_mean);

enum class Normalization { homogenize, standardize, none };

/// Projections of normalized, centered data onto the leading `rank`
/// eigenvectors of the covariance of that normalized data (n x rank).
Eigen::MatrixXd pc_scores(const DataBatch& batch, Normalization normalization, Eigen::Index rank,
                          bool clamp_means = false);

}  // namespace epca
