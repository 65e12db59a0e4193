#include <benchmark/benchmark.h>

#include "epca/covariance.hpp"
#include "epca/denoise.hpp"
#include "epca/simgen.hpp"

namespace {

epca::LowRankSample make_sample(Eigen::Index n, Eigen::Index p) {
  epca::LowRankConfig cfg;
  cfg.n = n;
  cfg.p = p;
  cfg.rank = 10;
  cfg.signal_strength = 0.04 * static_cast<double>(p);
  cfg.seed = 7;
  return epca::gen_low_rank_poisson(cfg);
}

void BM_SampleMoments(benchmark::State& state) {
  const auto sample = make_sample(4 * state.range(0), state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(epca::sample_moments(sample.batch));
  }
}
BENCHMARK(BM_SampleMoments)->Arg(256)->Arg(1024)->Unit(benchmark::kMillisecond);

void BM_FitFromMoments(benchmark::State& state) {
  const auto sample = make_sample(4 * state.range(0), state.range(0));
  const auto ms = epca::sample_moments(sample.batch);
  epca::FitOptions options;
  options.drop_degenerate = true;
  for (auto _ : state) {
    benchmark::DoNotOptimize(epca::fit_epca_from_moments(ms, 10, options));
  }
}
BENCHMARK(BM_FitFromMoments)->Arg(256)->Arg(1024)->Unit(benchmark::kMillisecond);

void BM_Eblp(benchmark::State& state) {
  const auto sample = make_sample(4 * state.range(0), state.range(0));
  epca::FitOptions options;
  options.drop_degenerate = true;
  const epca::Denoiser d{epca::fit_epca(sample.batch, 10, options), epca::kDefaultRidge,
                         epca::DenoiseMethod::eblp};
  for (auto _ : state) {
    benchmark::DoNotOptimize(epca::eblp_denoise(d, sample.batch.values()));
  }
}
BENCHMARK(BM_Eblp)->Arg(256)->Arg(1024)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
