#include <gtest/gtest.h>

#include <random>

#include "epca/covariance.hpp"
#include "epca/denoise.hpp"
#include "epca/errors.hpp"
#include "epca/linalg.hpp"
#include "epca/simgen.hpp"
#include "test_util.hpp"

namespace epca {
namespace {

// Adjugate inverse of a 3x3 matrix.
Eigen::Matrix3d inverse3(const Eigen::Matrix3d& m) {
  Eigen::Matrix3d adj;
  adj(0, 0) = m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1);
  adj(0, 1) = m(0, 2) * m(2, 1) - m(0, 1) * m(2, 2);
  adj(0, 2) = m(0, 1) * m(1, 2) - m(0, 2) * m(1, 1);
  adj(1, 0) = m(1, 2) * m(2, 0) - m(1, 0) * m(2, 2);
  adj(1, 1) = m(0, 0) * m(2, 2) - m(0, 2) * m(2, 0);
  adj(1, 2) = m(0, 2) * m(1, 0) - m(0, 0) * m(1, 2);
  adj(2, 0) = m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0);
  adj(2, 1) = m(0, 1) * m(2, 0) - m(0, 0) * m(2, 1);
  adj(2, 2) = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
  const double det = m(0, 0) * adj(0, 0) + m(0, 1) * adj(1, 0) + m(0, 2) * adj(2, 0);
  return adj / det;
}

CovarianceModel manual_model(const Eigen::MatrixXd& vecs, const Eigen::VectorXd& vals,
                             const Eigen::VectorXd& noise, const Eigen::VectorXd& mean) {
  CovarianceModel m;
  m.requested_rank = vals.size();
  m.homogenized_spikes = vals;
  m.het_eigvecs = vecs;
  m.het_eigvals = vals;
  m.alphas = Eigen::VectorXd::Ones(vals.size());
  m.taus = Eigen::VectorXd::Ones(vals.size());
  m.noise_diag = noise;
  m.mean = mean;
  m.input_dim = mean.size();
  m.n_samples = 100;
  m.gamma = static_cast<double>(mean.size()) / 100.0;
  return m;
}

Eigen::MatrixXd random_matrix(Eigen::Index r, Eigen::Index c, unsigned seed) {
  std::mt19937 gen(seed);
  std::normal_distribution<double> z;
  Eigen::MatrixXd m(r, c);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = z(gen);
  return m;
}

TEST(RegularizedCovariance, PreservesTraceAndIsPositiveDefinite) {
  const Eigen::MatrixXd basis = random_matrix(8, 3, 1).householderQr().householderQ() *
                                Eigen::MatrixXd::Identity(8, 3);
  const Eigen::Vector3d weights(4.0, 2.0, 0.5);
  Eigen::VectorXd noise = Eigen::VectorXd::LinSpaced(8, 0.0, 3.5);
  const Eigen::MatrixXd sigma = Eigen::MatrixXd(noise.asDiagonal()) + basis * weights.asDiagonal() * basis.transpose();
  for (double eps : {0.0, 0.05, 0.1, 0.2, 0.9}) {
    const Eigen::MatrixXd r = regularized_covariance(basis, weights, noise, eps);
    EXPECT_NEAR(r.trace(), sigma.trace(), 1e-10 * sigma.trace());
    if (eps > 0.0) EXPECT_GT(eigenvalues_descending(r).minCoeff(), 0.0);
  }
}

TEST(Eblp, NoSignalShrinksToMean) {
  const Eigen::Vector3d mean(0.5, 2.0, 1.0);
  const auto model = manual_model(Eigen::MatrixXd(3, 0), Eigen::VectorXd(0), Eigen::Vector3d(0.5, 2.0, 1.0), mean);
  const Denoiser d{model, 0.0, DenoiseMethod::eblp};
  const Eigen::MatrixXd y = random_matrix(6, 3, 2).cwiseAbs();
  const Eigen::MatrixXd xhat = eblp_denoise(d, y);
  for (Eigen::Index i = 0; i < 6; ++i) EXPECT_LT((xhat.row(i).transpose() - mean).norm(), 1e-14);
}

TEST(Eblp, NoiselessLimitIsIdentity) {
  const Eigen::MatrixXd a = random_matrix(4, 4, 3);
  const Eigen::MatrixXd sx = a * a.transpose() + 0.1 * Eigen::MatrixXd::Identity(4, 4);
  const auto pred = LinearPredictor::from_parameters(sx, Eigen::VectorXd::Zero(4), Eigen::Vector4d(1, 2, 3, 4), 0.0);
  const Eigen::MatrixXd y = random_matrix(5, 4, 4);
  EXPECT_LT((pred.apply(y) - y).norm(), 1e-10 * y.norm());
}

TEST(Eblp, AffineInObservations) {
  SpikedPoissonConfig cfg;
  cfg.n = 400;
  cfg.p = 60;
  cfg.ell = 2.0;
  cfg.seed = 5;
  const auto s = gen_spiked_poisson(cfg);
  const Denoiser d{fit_epca(s.batch, 2), 0.1, DenoiseMethod::eblp};
  const Eigen::MatrixXd y = s.batch.values().topRows(2);
  const double a = 0.3;
  Eigen::MatrixXd mix(3, y.cols());
  mix.topRows(2) = y;
  mix.row(2) = a * y.row(0) + (1 - a) * y.row(1);
  const Eigen::MatrixXd out = eblp_denoise(d, mix);
  const Eigen::RowVectorXd expect = a * out.row(0) + (1 - a) * out.row(1);
  EXPECT_LT((out.row(2) - expect).norm(), 1e-10 * expect.norm());
}

TEST(Eblp, SingularWithoutRidgeThrows) {
  const auto model = manual_model(Eigen::MatrixXd(2, 0), Eigen::VectorXd(0), Eigen::Vector2d(0.0, 1.0), Eigen::Vector2d(0.0, 1.0));
  EXPECT_THROW(eblp_denoise(Denoiser{model, 0.0, DenoiseMethod::eblp}, Eigen::MatrixXd::Ones(2, 2)),
               SingularMatrixError);
  EXPECT_NO_THROW(eblp_denoise(Denoiser{model, 0.1, DenoiseMethod::eblp}, Eigen::MatrixXd::Ones(2, 2)));
}

TEST(Eblp, ThreeDimensionalOracle) {
  Eigen::Matrix3d sx;
  sx << 2.0, 0.6, -0.3, 0.6, 1.0, 0.2, -0.3, 0.2, 0.5;
  const Eigen::Vector3d noise(0.5, 1.5, 0.8);
  const Eigen::Vector3d mu(1.0, -2.0, 0.5);
  const Eigen::Matrix3d inv = inverse3(sx + Eigen::Matrix3d(noise.asDiagonal()));
  const Eigen::Matrix3d b = sx * inv;
  const Eigen::Vector3d c = noise.asDiagonal() * inv * mu;

  const auto pred = LinearPredictor::from_parameters(sx, noise, mu, 0.0);
  const Eigen::MatrixXd y = random_matrix(20, 3, 6);
  const Eigen::MatrixXd expect = (y * b.transpose()).rowwise() + c.transpose();
  EXPECT_LT((pred.apply(y) - expect).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(Eblp, DroppedColumnsPassThrough) {
  SpikedPoissonConfig cfg;
  cfg.n = 300;
  cfg.p = 12;
  cfg.ell = 1.0;
  cfg.seed = 8;
  Eigen::MatrixXd y = gen_spiked_poisson(cfg).batch.values();
  y.col(4).setZero();
  FitOptions opts;
  opts.drop_degenerate = true;
  const Denoiser d{fit_epca(DataBatch(y, ExponentialFamily::poisson()), 1, opts), 0.1, DenoiseMethod::eblp};
  Eigen::MatrixXd probe = y.topRows(3);
  probe.col(4) << 7.0, 8.0, 9.0;
  const Eigen::MatrixXd out = eblp_denoise(d, probe);
  EXPECT_EQ(out.cols(), 12);
  EXPECT_EQ(out.col(4), probe.col(4));
  EXPECT_ANY_THROW(eblp_denoise(d, probe.leftCols(4)));
  Eigen::MatrixXd retained(3, 11);
  retained << probe.leftCols(4), probe.rightCols(7);
  EXPECT_LT((eblp_denoise(d, retained) - (Eigen::MatrixXd(3, 11) << out.leftCols(4), out.rightCols(7)).finished()).norm(), 1e-12);
}

TEST(Projection, FixedPointsAndLimits) {
  const Eigen::Vector4d mean(1, 2, 3, 4);
  const Eigen::MatrixXd basis = random_matrix(4, 2, 9).householderQr().householderQ() * Eigen::MatrixXd::Identity(4, 2);
  const Eigen::MatrixXd coef = random_matrix(5, 2, 10);
  const Eigen::MatrixXd y = (coef * basis.transpose()).rowwise() + mean.transpose();
  EXPECT_LT((projection_denoise(y, mean, basis) - y).norm(), 1e-12);

  const Eigen::MatrixXd full = random_matrix(4, 4, 11).householderQr().householderQ();
  const Eigen::MatrixXd z = random_matrix(6, 4, 12);
  EXPECT_LT((projection_denoise(z, mean, full) - z).norm(), 1e-12);

  const Eigen::MatrixXd none = projection_denoise(z, mean, Eigen::MatrixXd(4, 0));
  for (Eigen::Index i = 0; i < 6; ++i) EXPECT_EQ(none.row(i).transpose(), mean);

  const Eigen::MatrixXd once = projection_denoise(z, mean, basis);
  EXPECT_LT((projection_denoise(once, mean, basis) - once).norm(), 1e-10);
}

TEST(Denoise, DispatchesOnMethod) {
  SpikedPoissonConfig cfg;
  cfg.n = 200;
  cfg.p = 30;
  cfg.ell = 2.0;
  cfg.seed = 15;
  const auto s = gen_spiked_poisson(cfg);
  Denoiser d{fit_epca(s.batch, 1), 0.1, DenoiseMethod::projection};
  EXPECT_EQ(denoise(d, s.batch.values()), projection_denoise(d, s.batch.values()));
  d.method = DenoiseMethod::eblp;
  EXPECT_EQ(denoise(d, s.batch.values()), eblp_denoise(d, s.batch.values()));
}

TEST(DenoiseMse, Examples) {
  const Eigen::MatrixXd x = random_matrix(3, 4, 13);
  EXPECT_EQ(denoise_mse(x, x), 0.0);
  EXPECT_DOUBLE_EQ(denoise_mse(x.array() + 1.0, x), 1.0);
}

TEST(ClampNonnegative, ZeroesNegatives) {
  Eigen::Matrix2d m;
  m << -1, 2, 0.5, -0.0001;
  Eigen::MatrixXd x = m;
  clamp_nonnegative(x);
  Eigen::Matrix2d expect;
  expect << 0, 2, 0.5, 0;
  EXPECT_EQ(x, Eigen::MatrixXd(expect));
}

}  // namespace
}  // namespace epca
