#include "epca/simgen.hpp"

#include <algorithm>
#include <boost/math/quadrature/exp_sinh.hpp>
#include <cmath>
#include <exception>
#include <sstream>
#include <thread>

#include "epca/errors.hpp"
#include "epca/random.hpp"

namespace epca {

namespace {

const double kSqrt3 = std::sqrt(3.0);

Eigen::MatrixXd poisson_observations(const Eigen::MatrixXd& clean, Rng& rng) {
  Eigen::MatrixXd y(clean.rows(), clean.cols());
  for (Eigen::Index j = 0; j < clean.cols(); ++j) {
    for (Eigen::Index i = 0; i < clean.rows(); ++i) {
      y(i, j) = static_cast<double>(rng.poisson(clean(i, j)));
    }
  }
  return y;
}

Eigen::MatrixXd spiked_clean(const SpikedPoissonConfig& cfg, const Eigen::VectorXd& u,
                             const Eigen::VectorXd& v, Rng& rng) {
  Eigen::VectorXd z(cfg.n);
  for (Eigen::Index i = 0; i < cfg.n; ++i) z(i) = rng.uniform(-kSqrt3, kSqrt3);
  Eigen::MatrixXd clean = (z * (std::sqrt(cfg.ell) * v).transpose());
  clean.rowwise() += u.transpose();
  return clean;
}

void check_spiked(const SpikedPoissonConfig& cfg) {
  if (cfg.n < 2 || cfg.p < 1) throw InvalidArgument("spiked config needs n >= 2 and p >= 1");
  if (!(cfg.ell >= 0.0)) throw InvalidArgument("spike strength must be nonnegative");
}

// int_0^1 w^2 e^{-t w} dw
double weighted_second_moment(double t) {
  if (t < 1.0) {
    // sum_k (-t)^k / (k! (k + 3))
    double term = 1.0;
    double sum = 0.0;
    for (int k = 0; k < 30; ++k) {
      sum += term / (k + 3.0);
      term *= -t / (k + 1.0);
    }
    return sum;
  }
  return (2.0 - std::exp(-t) * (t * t + 2.0 * t + 2.0)) / (t * t * t);
}

// int_0^1 e^{-t w} dw
double laplace_uniform(double t) {
  if (t < 1e-8) return 1.0 - 0.5 * t;
  return -std::expm1(-t) / t;
}

}  // namespace

Eigen::VectorXd uniform_grid(Eigen::Index p, double lo, double hi) {
  if (p == 1) return Eigen::VectorXd::Constant(1, lo);
  return Eigen::VectorXd::LinSpaced(p, lo, hi);
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> spiked_profile(const SpikedPoissonConfig& cfg) {
  Eigen::VectorXd u = uniform_grid(cfg.p, cfg.u_lo, cfg.u_hi);
  Eigen::VectorXd v = uniform_grid(cfg.p, cfg.v_lo, cfg.v_hi);
  const double norm = v.norm();
  if (!(norm > 0.0)) throw InvalidArgument("spike direction grid has zero norm");
  v /= norm;
  return {std::move(u), std::move(v)};
}

double spiked_transition(const SpikedPoissonConfig& cfg) {
  const auto [u, v] = spiked_profile(cfg);
  const double weighted = (v.array().square() / u.array()).sum();
  return std::sqrt(cfg.gamma()) / weighted;
}

SpikedSample gen_spiked_poisson(const SpikedPoissonConfig& cfg) {
  check_spiked(cfg);
  auto [u, v] = spiked_profile(cfg);
  const double amp = kSqrt3 * std::sqrt(cfg.ell);
  for (Eigen::Index j = 0; j < cfg.p; ++j) {
    if (u(j) < amp * std::abs(v(j))) {
      std::ostringstream msg;
      msg << "spike " << cfg.ell << " allows negative Poisson means at coordinate " << j
          << " (u = " << u(j) << ", sqrt(3 ell)|v| = " << amp * std::abs(v(j)) << ")";
      throw InvalidArgument(msg.str());
    }
  }
  Rng rng(cfg.seed);
  Eigen::MatrixXd clean = spiked_clean(cfg, u, v, rng);
  // Rounding can push u(j) - amp|v(j)| a hair below zero at equality.
  clean = clean.cwiseMax(0.0);
  Eigen::MatrixXd y = poisson_observations(clean, rng);
  return SpikedSample{DataBatch(std::move(y), ExponentialFamily::poisson()), std::move(clean),
                      std::move(u), std::move(v), cfg.ell};
}

SpikedSample gen_spiked_gaussian(const SpikedPoissonConfig& cfg, double noise_variance) {
  check_spiked(cfg);
  auto [u, v] = spiked_profile(cfg);
  Rng rng(cfg.seed);
  Eigen::MatrixXd clean = spiked_clean(cfg, u, v, rng);
  const double sd = std::sqrt(noise_variance);
  Eigen::MatrixXd y(clean.rows(), clean.cols());
  for (Eigen::Index j = 0; j < clean.cols(); ++j) {
    for (Eigen::Index i = 0; i < clean.rows(); ++i) y(i, j) = clean(i, j) + sd * rng.normal();
  }
  return SpikedSample{DataBatch(std::move(y), ExponentialFamily::gaussian(noise_variance)),
                      std::move(clean), std::move(u), std::move(v), cfg.ell};
}

double LowRankConfig::strength() const {
  if (signal_strength) return *signal_strength;
  const double s = 1.0 + std::sqrt(gamma());
  return 25.0 * s * s;
}

CoefficientMoments rescaled_uniform_moments(Eigen::Index rank, double strength) {
  if (rank < 1) throw InvalidArgument("rank must be positive");
  CoefficientMoments m;
  const double r = static_cast<double>(rank);
  m.mean = strength / r;
  if (rank == 1) return m;  // a = A deterministically
  // E[w_1^2 / S^2] = int_0^inf t E[w^2 e^{-tw}] E[e^{-tw}]^{r-1} dt
  auto integrand = [rank](double t) {
    return t * weighted_second_moment(t) * std::pow(laplace_uniform(t), static_cast<double>(rank - 1));
  };
  boost::math::quadrature::exp_sinh<double> integrator;
  const double second = integrator.integrate(integrand, 0.0, std::numeric_limits<double>::infinity(), 1e-13);
  m.variance = strength * strength * second - m.mean * m.mean;
  m.covariance = -m.variance / (r - 1.0);
  return m;
}

LowRankSample gen_low_rank_poisson(const LowRankConfig& cfg) {
  if (cfg.n < 2 || cfg.p < 1) throw InvalidArgument("low-rank config needs n >= 2 and p >= 1");
  if (cfg.rank < 1 || cfg.rank > cfg.p) throw InvalidArgument("rank must lie in [1, p]");
  const double a_total = cfg.strength();
  if (!(a_total > 0.0)) throw InvalidArgument("signal strength must be positive");

  Rng rng(cfg.seed);
  Eigen::MatrixXd basis(cfg.p, cfg.rank);
  for (Eigen::Index k = 0; k < cfg.rank; ++k) {
    for (Eigen::Index j = 0; j < cfg.p; ++j) basis(j, k) = rng.uniform();
    basis.col(k) /= basis.col(k).sum();
  }
  Eigen::MatrixXd coef(cfg.n, cfg.rank);
  for (Eigen::Index i = 0; i < cfg.n; ++i) {
    for (Eigen::Index k = 0; k < cfg.rank; ++k) coef(i, k) = rng.uniform();
    const double s = coef.row(i).sum();
    coef.row(i) *= a_total / s;
  }
  Eigen::MatrixXd clean = coef * basis.transpose();
  Eigen::MatrixXd y = poisson_observations(clean, rng);

  const CoefficientMoments mom = rescaled_uniform_moments(cfg.rank, a_total);
  Eigen::MatrixXd coef_cov = Eigen::MatrixXd::Constant(cfg.rank, cfg.rank, mom.covariance);
  coef_cov.diagonal().setConstant(mom.variance);
  Eigen::VectorXd true_mean = basis * Eigen::VectorXd::Constant(cfg.rank, mom.mean);

  return LowRankSample{DataBatch(std::move(y), ExponentialFamily::poisson()), std::move(clean),
                       std::move(basis), std::move(true_mean), std::move(coef_cov)};
}

// --- trials -----------------------------------------------------------------------

TrialReport::TrialReport(std::vector<std::string> names, std::vector<std::vector<double>> rows,
                         std::uint64_t base_seed)
    : names_(std::move(names)), rows_(std::move(rows)), base_seed_(base_seed) {}

std::size_t TrialReport::index_of(const std::string& metric) const {
  const auto it = std::find(names_.begin(), names_.end(), metric);
  if (it == names_.end()) throw InvalidArgument("unknown metric '" + metric + "'");
  return static_cast<std::size_t>(it - names_.begin());
}

std::vector<double> TrialReport::values(const std::string& metric) const {
  const std::size_t k = index_of(metric);
  std::vector<double> out;
  out.reserve(rows_.size());
  for (const auto& row : rows_) out.push_back(row[k]);
  return out;
}

double TrialReport::mean(const std::string& metric) const {
  const auto v = values(metric);
  if (v.empty()) return 0.0;
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double TrialReport::stddev(const std::string& metric) const {
  const auto v = values(metric);
  if (v.size() < 2) return 0.0;
  const double m = mean(metric);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

double TrialReport::std_error(const std::string& metric) const {
  if (rows_.empty()) return 0.0;
  return stddev(metric) / std::sqrt(static_cast<double>(rows_.size()));
}

TrialReport run_trials(const std::function<TrialMetrics(std::uint64_t, std::size_t)>& trial,
                       std::size_t n_trials, std::uint64_t base_seed, unsigned threads) {
  if (n_trials < 1) throw InvalidArgument("at least one trial is required");
  std::vector<TrialMetrics> results(n_trials);
  std::vector<std::exception_ptr> errors(n_trials);

  auto work = [&](std::size_t begin, std::size_t stride) {
    for (std::size_t t = begin; t < n_trials; t += stride) {
      try {
        results[t] = trial(trial_seed(base_seed, t), t);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    }
  };
  const unsigned workers = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(n_trials)));
  if (workers == 1) {
    work(0, 1);
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work, w, workers);
  }

  for (std::size_t t = 0; t < n_trials; ++t) {
    if (!errors[t]) continue;
    try {
      std::rethrow_exception(errors[t]);
    } catch (const std::exception& e) {
      throw Error("trial " + std::to_string(t) + " failed: " + e.what());
    }
  }

  std::vector<std::string> names;
  for (const auto& [name, value] : results.front()) names.push_back(name);
  std::vector<std::vector<double>> rows;
  rows.reserve(n_trials);
  for (std::size_t t = 0; t < n_trials; ++t) {
    if (results[t].size() != names.size()) {
      throw ConsistencyError("trial " + std::to_string(t) + " reported a different metric set");
    }
    std::vector<double> row;
    for (std::size_t k = 0; k < names.size(); ++k) {
      if (results[t][k].first != names[k]) {
        throw ConsistencyError("trial " + std::to_string(t) + " reported a different metric set");
      }
      row.push_back(results[t][k].second);
    }
    rows.push_back(std::move(row));
  }
  return TrialReport(std::move(names), std::move(rows), base_seed);
}

}  // namespace epca
