#include "epca/metrics.hpp"

#include <algorithm>

#include "epca/errors.hpp"
#include "epca/linalg.hpp"

namespace epca {

double subspace_error(const Eigen::MatrixXd& u_hat, const Eigen::MatrixXd& u) {
  if (u_hat.rows() != u.rows()) throw InvalidArgument("subspace_error: row count mismatch");
  // ||P - Q||_F^2 = tr P + tr Q - 2 ||U_hat^T U||_F^2 for orthogonal projectors.
  const double cross = (u_hat.transpose() * u).squaredNorm();
  return std::max(0.0, static_cast<double>(u_hat.cols()) + static_cast<double>(u.cols()) - 2.0 * cross);
}

double sq_correlation(const Eigen::VectorXd& v_hat, const Eigen::VectorXd& v) {
  if (v_hat.size() != v.size()) throw InvalidArgument("sq_correlation: size mismatch");
  const double a = v_hat.squaredNorm();
  const double b = v.squaredNorm();
  if (!(a > 0.0) || !(b > 0.0)) throw InvalidArgument("sq_correlation: zero vector");
  const double dot = v_hat.dot(v);
  return std::min(1.0, dot * dot / (a * b));
}

MatrixErrors matrix_errors(const Eigen::MatrixXd& estimate, const Eigen::MatrixXd& truth) {
  if (estimate.rows() != truth.rows() || estimate.cols() != truth.cols()) {
    throw InvalidArgument("matrix_errors: shape mismatch");
  }
  const Eigen::MatrixXd diff = estimate - truth;
  return {diff.norm(), symmetric_operator_norm(diff)};
}

}  // namespace epca
