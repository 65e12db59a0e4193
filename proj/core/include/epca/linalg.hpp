#pragma once

#include <Eigen/Dense>

namespace epca {

/// Eigenpairs of a symmetric matrix, eigenvalues in descending order and
/// eigenvectors stored column-wise in matching order.
struct EigenPairs {
  Eigen::VectorXd values;
  Eigen::MatrixXd vectors;
};

/// Flips each column so its largest-magnitude entry is positive (ties go to
/// the lowest index).
void canonicalize_signs(Eigen::MatrixXd& vectors);

/// Leading `count` eigenpairs of the symmetric matrix `sym` (only the lower
/// triangle is read). Dense tridiagonalization followed by MRRR on the
/// requested index range.
EigenPairs top_eigenpairs(const Eigen::MatrixXd& sym, Eigen::Index count);

/// All eigenvalues of `sym`, descending.
Eigen::VectorXd eigenvalues_descending(const Eigen::MatrixXd& sym);

/// Nonzero eigenpairs of F F^T for a tall factor F (p x k, k <= p), computed
/// through a thin SVD of F so the p x p product is never formed.
EigenPairs factored_eigenpairs(const Eigen::MatrixXd& factor);

/// Operator (spectral) norm of a symmetric matrix: max |eigenvalue|.
double symmetric_operator_norm(const Eigen::MatrixXd& sym);

/// Copies the lower triangle into the upper one.
void symmetrize_from_lower(Eigen::MatrixXd& m);

}  // namespace epca
