#include "epca/experiments.hpp"

#include <chrono>
#include <cmath>

#include "epca/denoise.hpp"
#include "epca/errors.hpp"
#include "epca/metrics.hpp"
#include "epca/rmt.hpp"

namespace epca {

namespace {

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace

TrialMetrics spiked_trial_metrics(const SpikedPoissonConfig& cfg, bool baselines) {
  const SpikedSample sample = gen_spiked_poisson(cfg);
  const MomentSummary ms = sample_moments(sample.batch);
  const CovarianceModel model = fit_epca_from_moments(ms, 1);

  const bool kept = model.rank() > 0;
  const double het_top = kept ? model.het_eigvals(0) : 0.0;
  const double scaled_top = kept ? model.alphas(0) * het_top : 0.0;
  const double corr = kept ? sq_correlation(model.het_eigvecs.col(0), sample.v) : 0.0;

  TrialMetrics out{{"het_top", het_top},
                   {"scaled_top", scaled_top},
                   {"improvement", estimated_improvement(model, 0)},
                   {"sqcorr_epca", corr},
                   {"kept", kept ? 1.0 : 0.0}};
  if (baselines) {
    const EigenPairs deb = top_eigenpairs(debias(ms), 1);
    const EigenPairs raw = top_eigenpairs(ms.sample_cov, 1);
    out.emplace_back("debiased_top", deb.values(0));
    out.emplace_back("sqcorr_sample", sq_correlation(raw.vectors.col(0), sample.v));
    out.emplace_back("sqcorr_debiased", sq_correlation(deb.vectors.col(0), sample.v));
  }
  return out;
}

TrialReport spiked_trials(const SpikedPoissonConfig& cfg, std::size_t n_trials,
                          std::uint64_t base_seed, bool baselines, unsigned threads) {
  return run_trials(
      [&](std::uint64_t seed, std::size_t) {
        SpikedPoissonConfig c = cfg;
        c.seed = seed;
        return spiked_trial_metrics(c, baselines);
      },
      n_trials, base_seed, threads);
}

std::vector<double> mp_null_ks(Eigen::Index n, Eigen::Index p, std::size_t n_trials,
                               std::uint64_t base_seed) {
  const MpDistribution mp(static_cast<double>(p) / static_cast<double>(n));
  const TrialReport report = run_trials(
      [&](std::uint64_t seed, std::size_t) {
        SpikedPoissonConfig cfg;
        cfg.n = n;
        cfg.p = p;
        cfg.ell = 0.0;
        cfg.seed = seed;
        const SpikedSample sample = gen_spiked_poisson(cfg);
        const MomentSummary ms = sample_moments(sample.batch);
        const Eigen::VectorXd ev = eigenvalues_descending(homogenize(ms)).array() + 1.0;
        return TrialMetrics{{"ks", ks_statistic(ev, mp)}};
      },
      n_trials, base_seed);
  return report.values("ks");
}

RateCheckResult rate_check(Eigen::Index p, const std::vector<Eigen::Index>& sample_sizes,
                           std::size_t n_trials, std::uint64_t base_seed) {
  if (sample_sizes.size() < 2) throw InvalidArgument("rate check needs two or more sample sizes");
  RateCheckResult out;
  out.sample_sizes = sample_sizes;
  for (std::size_t s = 0; s < sample_sizes.size(); ++s) {
    const Eigen::Index n = sample_sizes[s];
    const TrialReport report = run_trials(
        [&](std::uint64_t seed, std::size_t) {
          SpikedPoissonConfig cfg;
          cfg.n = n;
          cfg.p = p;
          cfg.ell = 0.0;
          cfg.seed = seed;
          const SpikedSample sample = gen_spiked_poisson(cfg);
          const MomentSummary ms = sample_moments(sample.batch);
          return TrialMetrics{{"frobenius", debias(ms).norm()}};
        },
        n_trials, base_seed + 1000003ULL * s);
    out.mean_error.push_back(report.mean("frobenius"));
    out.std_error.push_back(report.std_error("frobenius"));
  }
  // Least-squares slope of log(error) on log(n).
  const std::size_t k = sample_sizes.size();
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    mx += std::log(static_cast<double>(sample_sizes[i]));
    my += std::log(out.mean_error[i]);
  }
  mx /= static_cast<double>(k);
  my /= static_cast<double>(k);
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    const double dx = std::log(static_cast<double>(sample_sizes[i])) - mx;
    sxy += dx * (std::log(out.mean_error[i]) - my);
    sxx += dx * dx;
  }
  out.slope = sxy / sxx;
  return out;
}

DenoiseComparison denoise_comparison(const LowRankConfig& cfg, Eigen::Index rank,
                                     double epsilon) {
  const LowRankSample sample = gen_low_rank_poisson(cfg);
  DenoiseComparison out;
  out.mean_intensity = sample.clean.mean();
  out.mse_noisy = denoise_mse(sample.batch.values(), sample.clean);

  auto start = std::chrono::steady_clock::now();
  const MomentSummary ms = sample_moments(sample.batch);
  FitOptions options;
  options.drop_degenerate = true;
  Denoiser denoiser{fit_epca_from_moments(ms, rank, options), epsilon, DenoiseMethod::eblp};
  out.fit_seconds = seconds_since(start);
  out.kept_spikes = denoiser.model.rank();

  start = std::chrono::steady_clock::now();
  {
    const Eigen::MatrixXd xhat = eblp_denoise(denoiser, sample.batch.values());
    out.eblp_seconds = seconds_since(start);
    out.mse_eblp = denoise_mse(xhat, sample.clean);
  }
  {
    const Eigen::MatrixXd xhat = projection_denoise(denoiser, sample.batch.values());
    out.mse_epca_projection = denoise_mse(xhat, sample.clean);
  }
  {
    const EigenPairs pcs = top_eigenpairs(ms.sample_cov, rank);
    const Eigen::MatrixXd xhat = projection_denoise(sample.batch.values(), ms.mean, pcs.vectors);
    out.mse_sample_projection = denoise_mse(xhat, sample.clean);
  }
  return out;
}

}  // namespace epca
