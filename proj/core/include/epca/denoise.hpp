#pragma once

#include <Eigen/Dense>

#include "epca/covariance.hpp"

namespace epca {

inline constexpr double kDefaultRidge = 0.1;

enum class DenoiseMethod { eblp, projection };

/// A fitted covariance model plus the denoising rule applied with it.
struct Denoiser {
  CovarianceModel model;
  double epsilon = kDefaultRidge;
  DenoiseMethod method = DenoiseMethod::eblp;
};

/// Best linear predictor X_hat = B Y + C with
///   B = Sigma_x Sigma_eps^{-1},  C = D Sigma_eps^{-1} mu,
///   Sigma_eps = (1 - eps)(D + Sigma_x) + eps * (tr(D + Sigma_x) / p) I.
///
/// Sigma_x is held in factored form U diag(a) U^T. The regularized matrix is
/// Cholesky-factored once; only k + 1 right-hand sides are solved, and each
/// row is then filtered with two thin products.
class LinearPredictor {
 public:
  /// Plug-in predictor from an ePCA model (Sigma_x = S_s, D = D_n, mu = Ybar).
  static LinearPredictor from_model(const CovarianceModel& model, double epsilon);

  /// Predictor from explicit parameters; `signal_cov` must be symmetric PSD.
  static LinearPredictor from_parameters(const Eigen::MatrixXd& signal_cov,
                                         const Eigen::VectorXd& noise,
                                         const Eigen::VectorXd& mean, double epsilon);

  /// Denoises each row of `y` (n x p).
  Eigen::MatrixXd apply(const Eigen::MatrixXd& y) const;

  Eigen::Index dim() const noexcept { return offset_.size(); }
  /// Trace of D + Sigma_x divided by p.
  double mean_variance() const noexcept { return mean_variance_; }

 private:
  LinearPredictor(const Eigen::MatrixXd& basis, const Eigen::VectorXd& weights,
                  const Eigen::VectorXd& noise, const Eigen::VectorXd& mean, double epsilon);

  Eigen::MatrixXd left_;   // Sigma_eps^{-1} U diag(a)
  Eigen::MatrixXd right_;  // U
  Eigen::VectorXd offset_; // D Sigma_eps^{-1} mu
  double mean_variance_ = 0.0;
};

/// Dense (1 - eps) Sigma + eps * (tr Sigma / p) I for Sigma = D + U diag(a) U^T.
Eigen::MatrixXd regularized_covariance(const Eigen::MatrixXd& basis, const Eigen::VectorXd& weights,
                                       const Eigen::VectorXd& noise, double epsilon);

/// EBLP denoising with the model's scaled covariance. `y` may have either
/// the model's retained dimension or the original column count; in the
/// latter case dropped columns are passed through unchanged.
Eigen::MatrixXd eblp_denoise(const Denoiser& d, const Eigen::MatrixXd& y);

/// Ybar + U U^T (Y_i - Ybar) onto the model's eigenvectors.
Eigen::MatrixXd projection_denoise(const Denoiser& d, const Eigen::MatrixXd& y);

/// Orthogonal projection of centered rows onto span(basis), plus `mean`.
Eigen::MatrixXd projection_denoise(const Eigen::MatrixXd& y, const Eigen::VectorXd& mean,
                                   const Eigen::MatrixXd& basis);

/// Runs the denoiser's configured method.
Eigen::MatrixXd denoise(const Denoiser& d, const Eigen::MatrixXd& y);

/// (pn)^{-1} sum ||Xhat_i - X_i||^2.
double denoise_mse(const Eigen::MatrixXd& xhat, const Eigen::MatrixXd& x);

/// Replaces negative entries by zero (display only).
void clamp_nonnegative(Eigen::MatrixXd& x);

}  // namespace epca
