#pragma once

#include <Eigen/Dense>

namespace epca {

/// ||U_hat U_hat^T - U U^T||_F^2 for column-orthonormal p x r inputs.
double subspace_error(const Eigen::MatrixXd& u_hat, const Eigen::MatrixXd& u);

/// (v_hat^T v)^2 / (||v_hat||^2 ||v||^2).
double sq_correlation(const Eigen::VectorXd& v_hat, const Eigen::VectorXd& v);

struct MatrixErrors {
  double frobenius = 0.0;
  double operator_norm = 0.0;
};

/// Frobenius and spectral norms of estimate - truth (both symmetric).
MatrixErrors matrix_errors(const Eigen::MatrixXd& estimate, const Eigen::MatrixXd& truth);

}  // namespace epca
