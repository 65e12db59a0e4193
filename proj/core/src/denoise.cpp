#include "epca/denoise.hpp"

#include <sstream>

#include "epca/errors.hpp"

namespace epca {

namespace {

void check_epsilon(double epsilon) {
  if (!(epsilon >= 0.0 && epsilon < 1.0)) {
    throw InvalidArgument("ridge weight epsilon must lie in [0, 1)");
  }
}

// Applies `fn` to the retained columns of `y` and passes dropped columns
// through.
template <typename Fn>
Eigen::MatrixXd on_model_columns(const CovarianceModel& model, const Eigen::MatrixXd& y, Fn fn) {
  if (y.cols() == model.dim()) return fn(y);
  if (y.cols() == model.input_dim && !model.dropped_columns.empty()) {
    const auto keep = model.kept_columns();
    std::vector<Eigen::Index> idx(keep.begin(), keep.end());
    Eigen::MatrixXd out = y;
    out(Eigen::all, idx) = fn(y(Eigen::all, idx));
    return out;
  }
  std::ostringstream msg;
  msg << "input has " << y.cols() << " columns, model expects " << model.dim();
  if (!model.dropped_columns.empty()) msg << " (or " << model.input_dim << " before dropping)";
  throw InvalidArgument(msg.str());
}

}  // namespace

Eigen::MatrixXd regularized_covariance(const Eigen::MatrixXd& basis, const Eigen::VectorXd& weights,
                                       const Eigen::VectorXd& noise, double epsilon) {
  const Eigen::Index p = noise.size();
  Eigen::MatrixXd sigma = basis * weights.asDiagonal() * basis.transpose();
  sigma.diagonal() += noise;
  const double m = sigma.trace() / static_cast<double>(p);
  sigma *= (1.0 - epsilon);
  sigma.diagonal().array() += epsilon * m;
  return sigma;
}

LinearPredictor::LinearPredictor(const Eigen::MatrixXd& basis, const Eigen::VectorXd& weights,
                                 const Eigen::VectorXd& noise, const Eigen::VectorXd& mean,
                                 double epsilon) {
  check_epsilon(epsilon);
  const Eigen::Index p = noise.size();
  if (basis.rows() != p || mean.size() != p || basis.cols() != weights.size()) {
    throw InvalidArgument("predictor parameters have inconsistent dimensions");
  }
  const Eigen::MatrixXd sigma = regularized_covariance(basis, weights, noise, epsilon);
  mean_variance_ = (noise.sum() + (basis.colwise().squaredNorm().transpose().cwiseProduct(weights)).sum()) /
                   static_cast<double>(p);

  Eigen::LLT<Eigen::MatrixXd> llt(sigma);
  bool ok = llt.info() == Eigen::Success;
  if (ok) {
    const Eigen::VectorXd piv = llt.matrixLLT().diagonal().array().square();
    const double top = sigma.diagonal().maxCoeff();
    ok = piv.minCoeff() > 1e-14 * top;
  }
  if (!ok) {
    throw SingularMatrixError(
        "regularized covariance D + S_s is singular; use a ridge weight epsilon > 0");
  }
  right_ = basis;
  left_ = llt.solve(basis) * weights.asDiagonal();
  offset_ = noise.cwiseProduct(llt.solve(mean));
}

LinearPredictor LinearPredictor::from_model(const CovarianceModel& model, double epsilon) {
  return LinearPredictor(model.het_eigvecs, model.scaled_eigvals(), model.noise_diag, model.mean,
                         epsilon);
}

LinearPredictor LinearPredictor::from_parameters(const Eigen::MatrixXd& signal_cov,
                                                 const Eigen::VectorXd& noise,
                                                 const Eigen::VectorXd& mean, double epsilon) {
  const Eigen::Index p = noise.size();
  if (signal_cov.rows() != p || signal_cov.cols() != p) {
    throw InvalidArgument("signal covariance must be p x p");
  }
  const EigenPairs eig = top_eigenpairs(signal_cov, p);
  return LinearPredictor(eig.vectors, eig.values, noise, mean, epsilon);
}

Eigen::MatrixXd LinearPredictor::apply(const Eigen::MatrixXd& y) const {
  if (y.cols() != dim()) throw InvalidArgument("predictor dimension mismatch");
  Eigen::MatrixXd out = (y * left_) * right_.transpose();
  out.rowwise() += offset_.transpose();
  return out;
}

Eigen::MatrixXd eblp_denoise(const Denoiser& d, const Eigen::MatrixXd& y) {
  const LinearPredictor blp = LinearPredictor::from_model(d.model, d.epsilon);
  return on_model_columns(d.model, y, [&](const Eigen::MatrixXd& sub) { return blp.apply(sub); });
}

Eigen::MatrixXd projection_denoise(const Eigen::MatrixXd& y, const Eigen::VectorXd& mean,
                                   const Eigen::MatrixXd& basis) {
  if (y.cols() != mean.size() || basis.rows() != mean.size()) {
    throw InvalidArgument("projection dimension mismatch");
  }
  Eigen::MatrixXd centered = y.rowwise() - mean.transpose();
  Eigen::MatrixXd out = (centered * basis) * basis.transpose();
  out.rowwise() += mean.transpose();
  return out;
}

Eigen::MatrixXd projection_denoise(const Denoiser& d, const Eigen::MatrixXd& y) {
  return on_model_columns(d.model, y, [&](const Eigen::MatrixXd& sub) {
    return projection_denoise(sub, d.model.mean, d.model.het_eigvecs);
  });
}

Eigen::MatrixXd denoise(const Denoiser& d, const Eigen::MatrixXd& y) {
  return d.method == DenoiseMethod::eblp ? eblp_denoise(d, y) : projection_denoise(d, y);
}

double denoise_mse(const Eigen::MatrixXd& xhat, const Eigen::MatrixXd& x) {
  if (xhat.rows() != x.rows() || xhat.cols() != x.cols()) {
    std::ostringstream msg;
    msg << "shape mismatch: " << xhat.rows() << "x" << xhat.cols() << " vs " << x.rows() << "x"
        << x.cols();
    throw InvalidArgument(msg.str());
  }
  if (x.size() == 0) throw InvalidArgument("denoise_mse: empty matrices");
  double total = 0.0;
  for (Eigen::Index j = 0; j < x.cols(); ++j) total += (xhat.col(j) - x.col(j)).squaredNorm();
  return total / static_cast<double>(x.size());
}

void clamp_nonnegative(Eigen::MatrixXd& x) { x = x.cwiseMax(0.0); }

}  // namespace epca
