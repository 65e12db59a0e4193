#include "epca/linalg.hpp"

#include <lapacke.h>

#include <cmath>
#include <string>
#include <vector>

#include "epca/errors.hpp"

namespace epca {

namespace {

// dsyevr on a copy of the lower triangle; `jobz` is 'V' or 'N', eigenvalue
// indices [il, iu] are 1-based and ascending.
EigenPairs run_dsyevr(const Eigen::MatrixXd& sym, char jobz, lapack_int il, lapack_int iu) {
  const lapack_int n = static_cast<lapack_int>(sym.rows());
  Eigen::MatrixXd work = sym;
  const lapack_int want = iu - il + 1;
  Eigen::VectorXd w(n);
  Eigen::MatrixXd z(jobz == 'V' ? n : 1, jobz == 'V' ? want : 1);
  std::vector<lapack_int> support(2 * static_cast<std::size_t>(std::max<lapack_int>(want, 1)));
  lapack_int found = 0;
  const char range = (il == 1 && iu == n) ? 'A' : 'I';
  const lapack_int info = LAPACKE_dsyevr(LAPACK_COL_MAJOR, jobz, range, 'L', n, work.data(), n,
                                         0.0, 0.0, il, iu, 0.0, &found, w.data(), z.data(),
                                         jobz == 'V' ? n : 1, support.data());
  if (info != 0) {
    throw ConsistencyError("symmetric eigensolver failed (dsyevr info=" + std::to_string(info) +
                           ")");
  }
  EigenPairs out;
  out.values.resize(found);
  for (lapack_int i = 0; i < found; ++i) out.values(i) = w(found - 1 - i);
  if (jobz == 'V') {
    out.vectors.resize(n, found);
    for (lapack_int i = 0; i < found; ++i) out.vectors.col(i) = z.col(found - 1 - i);
    canonicalize_signs(out.vectors);
  }
  return out;
}

}  // namespace

void canonicalize_signs(Eigen::MatrixXd& vectors) {
  for (Eigen::Index j = 0; j < vectors.cols(); ++j) {
    Eigen::Index arg = 0;
    double best = -1.0;
    for (Eigen::Index i = 0; i < vectors.rows(); ++i) {
      const double a = std::abs(vectors(i, j));
      if (a > best) {
        best = a;
        arg = i;
      }
    }
    if (vectors.rows() > 0 && vectors(arg, j) < 0.0) vectors.col(j) *= -1.0;
  }
}

EigenPairs top_eigenpairs(const Eigen::MatrixXd& sym, Eigen::Index count) {
  const Eigen::Index n = sym.rows();
  if (sym.cols() != n) throw InvalidArgument("eigendecomposition needs a square matrix");
  if (count < 0 || count > n) throw InvalidArgument("requested eigenpair count out of range");
  if (count == 0) return {Eigen::VectorXd(0), Eigen::MatrixXd(n, 0)};
  return run_dsyevr(sym, 'V', static_cast<lapack_int>(n - count + 1), static_cast<lapack_int>(n));
}

Eigen::VectorXd eigenvalues_descending(const Eigen::MatrixXd& sym) {
  const Eigen::Index n = sym.rows();
  if (sym.cols() != n) throw InvalidArgument("eigendecomposition needs a square matrix");
  if (n == 0) return Eigen::VectorXd(0);
  return run_dsyevr(sym, 'N', 1, static_cast<lapack_int>(n)).values;
}

EigenPairs factored_eigenpairs(const Eigen::MatrixXd& factor) {
  const Eigen::Index k = factor.cols();
  if (k == 0) return {Eigen::VectorXd(0), Eigen::MatrixXd(factor.rows(), 0)};
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(factor, Eigen::ComputeThinU);
  EigenPairs out;
  out.values = svd.singularValues().array().square();
  out.vectors = svd.matrixU();
  canonicalize_signs(out.vectors);
  return out;
}

double symmetric_operator_norm(const Eigen::MatrixXd& sym) {
  const Eigen::VectorXd ev = eigenvalues_descending(sym);
  if (ev.size() == 0) return 0.0;
  return std::max(std::abs(ev(0)), std::abs(ev(ev.size() - 1)));
}

void symmetrize_from_lower(Eigen::MatrixXd& m) {
  m.triangularView<Eigen::StrictlyUpper>() = m.transpose();
}

}  // namespace epca
