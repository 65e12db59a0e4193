#include "epca/rmt.hpp"

#include <algorithm>
#include <boost/math/constants/constants.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <sstream>
#include <vector>

#include "epca/covariance.hpp"

namespace epca {

namespace {

constexpr double pi = boost::math::constants::pi<double>();

void require_gamma(double gamma) {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) {
    throw InvalidArgument("aspect ratio gamma must be positive and finite");
  }
}

}  // namespace

MpDistribution::MpDistribution(double gamma) : gamma_(gamma) {
  require_gamma(gamma);
  const double s = std::sqrt(gamma);
  lo_ = (1.0 - s) * (1.0 - s);
  hi_ = (1.0 + s) * (1.0 + s);
  atom_ = gamma > 1.0 ? 1.0 - 1.0 / gamma : 0.0;
}

double bulk_edge(double gamma) {
  const double s = std::sqrt(gamma);
  return (1.0 + s) * (1.0 + s);
}

double mp_pdf(const MpDistribution& d, double x) {
  const double a = d.support_lo();
  const double b = d.support_hi();
  if (!(x > a && x < b) || x <= 0.0) return 0.0;
  return std::sqrt((b - x) * (x - a)) / (2.0 * pi * d.gamma() * x);
}

double mp_cdf(const MpDistribution& d, double x) {
  if (std::isnan(x)) return x;
  if (x < 0.0) return 0.0;
  const double a = d.support_lo();
  const double b = d.support_hi();
  if (x >= b) return 1.0;
  if (x <= a) return d.atom_at_zero();

  // x = a + (b - a) sin^2(phi / 2) removes the square-root edge behaviour:
  // the integrand in phi is smooth on [0, pi].
  const double half_width = 0.5 * (b - a);
  const double phi_max = 2.0 * std::asin(std::sqrt((x - a) / (b - a)));
  const double scale = half_width * half_width / (2.0 * pi * d.gamma());
  auto integrand = [&](double phi) {
    const double s = std::sin(phi);
    const double h = std::sin(0.5 * phi);
    const double xx = a + (b - a) * h * h;
    if (xx <= 0.0) {
      // a == 0: sin^2(phi) / x reduces to 4 cos^2(phi/2) / b.
      const double c = std::cos(0.5 * phi);
      return scale * 4.0 * c * c / b;
    }
    return scale * s * s / xx;
  };
  double err = 0.0;
  const double mass = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
      integrand, 0.0, phi_max, 20, 1e-13, &err);
  return std::clamp(d.atom_at_zero() + mass, 0.0, 1.0);
}

double spike_forward(double ell, double gamma) {
  require_gamma(gamma);
  if (ell < 0.0) throw InvalidArgument("spike must be nonnegative");
  const double s = std::sqrt(gamma);
  if (ell > s) return (1.0 + ell) * (1.0 + gamma / ell);
  return (1.0 + s) * (1.0 + s);
}

double spike_inverse(double lambda, double gamma) {
  require_gamma(gamma);
  const double s = std::sqrt(gamma);
  const double upper = (1.0 + s) * (1.0 + s);
  if (!(lambda > upper)) {
    std::ostringstream msg;
    msg << "eigenvalue " << lambda << " is not above the bulk edge " << upper;
    throw BelowTransitionError(msg.str());
  }
  // ell^2 - (lambda - 1 - gamma) ell + gamma = 0, larger root. The
  // discriminant factors as (lambda - (1+s)^2)(lambda - (1-s)^2).
  const double lower = (1.0 - s) * (1.0 - s);
  const double b = lambda - 1.0 - gamma;
  const double disc = (lambda - upper) * (lambda - lower);
  return 0.5 * (b + std::sqrt(disc));
}

double cosine_sq(double ell, double gamma) {
  require_gamma(gamma);
  if (ell < 0.0) throw InvalidArgument("spike must be nonnegative");
  if (!(ell > std::sqrt(gamma))) return 0.0;
  return (1.0 - gamma / (ell * ell)) / (1.0 + gamma / ell);
}

double snr_improvement(const Eigen::VectorXd& v, const Eigen::VectorXd& noise) {
  if (v.size() != noise.size() || v.size() == 0) {
    throw InvalidArgument("snr_improvement: vector sizes must match and be nonzero");
  }
  if ((noise.array() <= 0.0).any()) throw InvalidArgument("noise variances must be positive");
  const double vv = v.squaredNorm();
  if (!(vv > 0.0)) throw InvalidArgument("signal vector must be nonzero");
  const double p = static_cast<double>(v.size());
  const double weighted = (v.array().square() / noise.array()).sum();
  return (noise.sum() / p) * weighted / vv;
}

double beta_heteroskedasticity(const Eigen::VectorXd& noise) {
  if (noise.size() == 0) throw InvalidArgument("beta: empty noise vector");
  if ((noise.array() <= 0.0).any()) throw InvalidArgument("noise variances must be positive");
  const double p = static_cast<double>(noise.size());
  return noise.sum() * noise.array().inverse().sum() / (p * p);
}

double estimated_improvement(const CovarianceModel& model, Eigen::Index index) {
  if (index < 0 || index >= model.requested_rank) {
    throw InvalidArgument("spike index out of range");
  }
  if (index >= model.rank()) return 1.0;
  const double raw = model.taus(index) / model.alphas(index);
  // A floored alpha says nothing about the gain; keep the estimate inside the
  // range (tr D / p) / max D .. (tr D / p) / min D of the population quantity.
  const Eigen::VectorXd& d = model.noise_diag;
  if (d.size() == 0 || (d.array() <= 0.0).any()) return raw;
  const double mean_d = d.mean();
  return std::clamp(raw, mean_d / d.maxCoeff(), mean_d / d.minCoeff());
}

double ks_statistic(const Eigen::VectorXd& eigenvalues, const MpDistribution& d) {
  const Eigen::Index m = eigenvalues.size();
  if (m == 0) throw InvalidArgument("ks_statistic: empty spectrum");
  std::vector<double> xs(eigenvalues.data(), eigenvalues.data() + m);
  if (std::any_of(xs.begin(), xs.end(), [](double x) { return !std::isfinite(x); })) {
    throw InvalidArgument("ks_statistic: non-finite eigenvalue");
  }
  // Round-off around the zero atom must not split it.
  const double zero_tol = 1e-9 * d.support_hi();
  for (double& x : xs) {
    if (std::abs(x) <= zero_tol) x = 0.0;
  }
  std::sort(xs.begin(), xs.end());
  double dist = 0.0;
  const double mm = static_cast<double>(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    const double f = mp_cdf(d, xs[i]);
    dist = std::max({dist, static_cast<double>(i + 1) / mm - f, f - static_cast<double>(i) / mm});
  }
  return dist;
}

}  // namespace epca
