#include "cli.hpp"

#include <CLI11.hpp>
#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "epca/bundle.hpp"
#include "epca/covariance.hpp"
#include "epca/denoise.hpp"
#include "epca/errors.hpp"
#include "epca/experiments.hpp"
#include "epca/genotype.hpp"
#include "epca/matrix_io.hpp"
#include "epca/random.hpp"
#include "epca/rmt.hpp"
#include "epca/simgen.hpp"

namespace epca::cli {

namespace fs = std::filesystem;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// EPCA_SEED, when set, takes precedence over --seed.
std::optional<std::uint64_t> resolve_seed(std::optional<std::uint64_t> flag) {
  const char* env = std::getenv("EPCA_SEED");
  if (env == nullptr || *env == '\0') return flag;
  std::uint64_t seed = 0;
  const std::string_view s(env);
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), seed);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw UsageError("EPCA_SEED is not an unsigned integer: '" + std::string(s) + "'");
  }
  return seed;
}

ExponentialFamily parse_family(const std::string& s) {
  try {
    return ExponentialFamily::parse(s);
  } catch (const Error& e) {
    throw UsageError(std::string("--family: ") + e.what());
  }
}

bool is_genotype_family(const ExponentialFamily& f) {
  return f.kind() == FamilyKind::binomial && f.parameter() == 2.0;
}

std::vector<std::string> numbered(const std::string& prefix, Eigen::Index k) {
  std::vector<std::string> names;
  for (Eigen::Index i = 1; i <= k; ++i) names.push_back(prefix + std::to_string(i));
  return names;
}

// Writes a table to `path`, or to `out` when the path is empty.
void emit_table(std::ostream& out, const std::string& path, const Eigen::MatrixXd& m,
                const std::vector<std::string>& comments, const std::vector<std::string>& columns) {
  if (path.empty()) {
    write_csv(out, m, comments, columns);
  } else {
    write_matrix(path, m, format_for_path(path), comments, columns);
  }
}

std::string fmt(double x) { return format_double(x); }

// ---------------------------------------------------------------- fit

struct FitArgs {
  std::string input;
  std::string family = "poisson";
  Eigen::Index rank = 1;
  std::string out;
  bool keep_degenerate = false;
  bool clamp_means = false;
  double epsilon = kDefaultRidge;
  std::optional<std::uint64_t> seed;
};

int run_fit(const FitArgs& a, std::ostream& out) {
  const ExponentialFamily family = parse_family(a.family);
  const DataBatch batch(read_matrix(a.input), family);
  FitOptions options;
  options.drop_degenerate = !a.keep_degenerate;
  options.clamp_means = a.clamp_means;
  const CovarianceModel model = fit_epca(batch, a.rank, options);
  save_bundle(a.out, model, a.epsilon, resolve_seed(a.seed));

  Eigen::MatrixXd report = Eigen::MatrixXd::Zero(model.requested_rank, 7);
  for (Eigen::Index i = 0; i < model.requested_rank; ++i) {
    const bool kept = i < model.rank();
    report(i, 0) = static_cast<double>(i + 1);
    report(i, 1) = kept ? 1.0 : 0.0;
    report(i, 2) = model.homogenized_spikes(i);
    if (kept) {
      report(i, 3) = model.het_eigvals(i);
      report(i, 4) = model.alphas(i);
      report(i, 5) = model.scaled_eigvals()(i);
      report(i, 6) = estimated_improvement(model, i);
    } else {
      report(i, 6) = 1.0;
    }
  }
  write_csv(out, report,
            {"n=" + std::to_string(batch.n()) + " p=" + std::to_string(batch.p()) +
                 " gamma=" + fmt(model.gamma) + " family=" + family.to_string(),
             "kept " + std::to_string(model.rank()) + " of " + std::to_string(model.requested_rank) +
                 " spikes; dropped " + std::to_string(model.dropped_columns.size()) + " columns",
             "model written to " + a.out},
            {"spike", "kept", "ell_hat", "lambda_hat", "alpha", "scaled_eigval", "improvement"});
  return kSuccess;
}

// ---------------------------------------------------------------- denoise

struct DenoiseArgs {
  std::string model;
  std::string input;
  std::string out;
  std::string method = "eblp";
  std::optional<double> epsilon;
  bool clamp = false;
  std::string truth;
};

int run_denoise(const DenoiseArgs& a, std::ostream& out) {
  const ModelBundle bundle = load_bundle(a.model);
  const MatrixFormat format = sniff_format(a.input);
  const Eigen::MatrixXd y = read_matrix(a.input);

  Denoiser d{bundle.model, a.epsilon.value_or(bundle.epsilon),
             a.method == "projection" ? DenoiseMethod::projection : DenoiseMethod::eblp};
  Eigen::MatrixXd xhat = denoise(d, y);
  if (a.clamp) clamp_nonnegative(xhat);
  write_matrix(a.out, xhat, format);

  if (!a.truth.empty()) {
    const Eigen::MatrixXd x = read_matrix(a.truth);
    if (x.rows() != y.rows() || x.cols() != y.cols()) {
      throw InvalidArgument("--truth is " + std::to_string(x.rows()) + "x" + std::to_string(x.cols()) +
                            " but input is " + std::to_string(y.rows()) + "x" + std::to_string(y.cols()));
    }
    out << "# method=" << a.method << " epsilon=" << fmt(d.epsilon) << (a.clamp ? " clamped" : "") << '\n'
        << "quantity,mse\n"
        << "noisy," << fmt(denoise_mse(y, x)) << '\n'
        << "denoised," << fmt(denoise_mse(xhat, x)) << '\n';
  }
  return kSuccess;
}

// ---------------------------------------------------------------- simulate

struct SimulateArgs {
  std::string scenario = "spiked";
  Eigen::Index n = 1000;
  Eigen::Index p = 500;
  Eigen::Index rank = 1;
  double ell = 1.0;
  std::optional<double> strength;
  std::optional<std::uint64_t> seed;
  std::size_t trials = 1;
  std::string out;
  std::string format = "csv";
  bool no_data = false;
  unsigned threads = 1;
};

int run_simulate(const SimulateArgs& a, std::ostream& out) {
  const std::uint64_t base = resolve_seed(a.seed).value_or(0);
  const std::string ext = a.format == "epm1" ? ".epm" : ".csv";
  const MatrixFormat format = a.format == "epm1" ? MatrixFormat::epm1 : MatrixFormat::csv;
  std::error_code ec;
  fs::create_directories(a.out, ec);
  if (ec) throw IoError("cannot create '" + a.out + "': " + ec.message());
  const fs::path dir(a.out);
  const auto tag = [&](const char* stem, std::size_t t) {
    return dir / (std::string(stem) + "_" + std::to_string(t) + ext);
  };

  TrialReport report;
  if (a.scenario == "spiked") {
    SpikedPoissonConfig cfg;
    cfg.n = a.n;
    cfg.p = a.p;
    cfg.ell = a.ell;
    if (!a.no_data) {
      for (std::size_t t = 0; t < a.trials; ++t) {
        cfg.seed = trial_seed(base, t);
        const SpikedSample s = gen_spiked_poisson(cfg);
        write_matrix(tag("y", t), s.batch.values(), format);
        write_matrix(tag("x", t), s.clean, format);
        if (t == 0) write_matrix(dir / ("cov" + ext), s.true_cov(), format);
      }
    }
    report = spiked_trials(cfg, a.trials, base, true, a.threads);
  } else {
    LowRankConfig cfg;
    cfg.n = a.n;
    cfg.p = a.p;
    cfg.rank = a.rank;
    cfg.signal_strength = a.strength;
    report = run_trials(
        [&](std::uint64_t seed, std::size_t t) {
          LowRankConfig c = cfg;
          c.seed = seed;
          const LowRankSample s = gen_low_rank_poisson(c);
          if (!a.no_data) {
            write_matrix(tag("y", t), s.batch.values(), format);
            write_matrix(tag("x", t), s.clean, format);
            write_matrix(tag("cov", t), s.true_cov(), format);
          }
          FitOptions options;
          options.drop_degenerate = true;
          const Denoiser d{fit_epca(s.batch, c.rank, options), kDefaultRidge, DenoiseMethod::eblp};
          return TrialMetrics{{"kept", static_cast<double>(d.model.rank())},
                              {"mse_noisy", denoise_mse(s.batch.values(), s.clean)},
                              {"mse_eblp", denoise_mse(eblp_denoise(d, s.batch.values()), s.clean)},
                              {"mse_projection", denoise_mse(projection_denoise(d, s.batch.values()), s.clean)}};
        },
        a.trials, base, a.no_data ? a.threads : 1);
  }

  Eigen::MatrixXd table(static_cast<Eigen::Index>(report.trials()),
                        static_cast<Eigen::Index>(report.metric_names().size()) + 2);
  for (std::size_t t = 0; t < report.trials(); ++t) {
    const auto row = static_cast<Eigen::Index>(t);
    table(row, 0) = static_cast<double>(t);
    table(row, 1) = static_cast<double>(trial_seed(base, t));
    for (std::size_t j = 0; j < report.rows()[t].size(); ++j) {
      table(row, static_cast<Eigen::Index>(j) + 2) = report.rows()[t][j];
    }
  }
  std::vector<std::string> columns{"trial", "seed"};
  columns.insert(columns.end(), report.metric_names().begin(), report.metric_names().end());
  const std::vector<std::string> comments{
      "scenario=" + a.scenario + " n=" + std::to_string(a.n) + " p=" + std::to_string(a.p) +
          (a.scenario == "spiked" ? " ell=" + fmt(a.ell) : " rank=" + std::to_string(a.rank)),
      "rng=" + std::string(kRngName) + " base_seed=" + std::to_string(base)};
  write_matrix(dir / "report.csv", table, MatrixFormat::csv, comments, columns);

  out << "# " << comments[0] << '\n' << "# " << comments[1] << '\n' << "metric,mean,stddev,std_error\n";
  for (const auto& name : report.metric_names()) {
    out << name << ',' << fmt(report.mean(name)) << ',' << fmt(report.stddev(name)) << ','
        << fmt(report.std_error(name)) << '\n';
  }
  return kSuccess;
}

// ---------------------------------------------------------------- mp

int run_mp(double gamma, Eigen::Index grid, std::ostream& out) {
  if (!(gamma > 0.0)) throw UsageError("--gamma must be positive");
  if (grid < 2) throw UsageError("--grid must be at least 2");
  const MpDistribution mp(gamma);
  const Eigen::VectorXd x = Eigen::VectorXd::LinSpaced(grid, mp.support_lo(), mp.support_hi());
  Eigen::MatrixXd table(grid, 2);
  for (Eigen::Index i = 0; i < grid; ++i) {
    table(i, 0) = x(i);
    table(i, 1) = mp_pdf(mp, x(i));
  }
  write_csv(out, table,
            {"gamma=" + fmt(gamma), "support_lo=" + fmt(mp.support_lo()),
             "support_hi=" + fmt(mp.support_hi()), "atom_at_zero=" + fmt(mp.atom_at_zero())},
            {"x", "pdf"});
  return kSuccess;
}

// ---------------------------------------------------------------- eigen

struct EigenArgs {
  std::string input;
  std::string family = "poisson";
  std::string normalization = "homogenize";
  Eigen::Index rank = 2;
  std::string out;
  bool clamp_means = false;
};

int run_eigen(const EigenArgs& a, std::ostream& out) {
  const ExponentialFamily family = parse_family(a.family);
  const Normalization norm = a.normalization == "standardize" ? Normalization::standardize
                             : a.normalization == "none"      ? Normalization::none
                                                              : Normalization::homogenize;
  std::vector<std::string> comments;
  Eigen::MatrixXd scores;
  if (is_genotype_family(family)) {
    const GenotypeBatch g = ingest_genotypes(fs::path(a.input));
    comments.push_back("genotypes: " + std::to_string(g.values.cols()) + " of " +
                       std::to_string(g.input_columns) + " SNPs retained, " +
                       std::to_string(g.imputed_entries) + " entries imputed");
    scores = pc_scores(g.to_batch(), norm, a.rank, a.clamp_means);
  } else {
    scores = pc_scores(DataBatch(read_matrix(a.input), family), norm, a.rank, a.clamp_means);
  }
  comments.push_back("normalization=" + a.normalization + " family=" + family.to_string());
  emit_table(out, a.out, scores, comments, numbered("pc", a.rank));
  return kSuccess;
}

// ---------------------------------------------------------------- bench

struct BenchArgs {
  bool full = false;
  std::optional<std::uint64_t> seed;
  unsigned threads = 1;
};

int run_bench(const BenchArgs& a, std::ostream& out) {
  const std::uint64_t base = resolve_seed(a.seed).value_or(20180724);
  const std::size_t trials = a.full ? 100 : 20;
  std::vector<std::pair<std::string, std::string>> rows;
  const auto add = [&](const std::string& experiment, const std::string& metric, double v) {
    rows.emplace_back(experiment + "," + metric, fmt(v));
  };

  {
    const std::vector<double> ks = mp_null_ks(1000, 500, trials, base);
    std::size_t pass = 0;
    double mean = 0.0;
    for (double k : ks) {
      pass += k < 0.05 ? 1 : 0;
      mean += k / static_cast<double>(ks.size());
    }
    add("mp_null", "mean_ks", mean);
    add("mp_null", "fraction_below_0.05", static_cast<double>(pass) / static_cast<double>(ks.size()));
  }
  {
    SpikedPoissonConfig cfg;
    add("transition", "predicted_ell", spiked_transition(cfg));
    for (double ell : {0.5, 0.8, 2.0, 3.0}) {
      cfg.ell = ell;
      const TrialReport r = spiked_trials(cfg, trials, base, false, a.threads);
      const std::string tag = "ell=" + fmt(ell);
      add(tag, "sqcorr_epca", r.mean("sqcorr_epca"));
      add(tag, "het_top_bias", r.mean("het_top") - ell);
      add(tag, "scaled_top_bias", r.mean("scaled_top") - ell);
      add(tag, "improvement", r.mean("improvement"));
    }
  }
  {
    const RateCheckResult rc = rate_check(50, {1000, 10000, 100000}, a.full ? 50 : 10, base);
    add("rate", "loglog_slope", rc.slope);
  }
  {
    LowRankConfig cfg;
    cfg.n = a.full ? 16384 : 4096;
    cfg.p = a.full ? 4096 : 1024;
    cfg.rank = 10;
    cfg.signal_strength = 0.04 * static_cast<double>(cfg.p);
    cfg.seed = base;
    const DenoiseComparison dc = denoise_comparison(cfg, cfg.rank, kDefaultRidge);
    add("denoise", "mean_intensity", dc.mean_intensity);
    add("denoise", "mse_noisy", dc.mse_noisy);
    add("denoise", "mse_sample_projection", dc.mse_sample_projection);
    add("denoise", "mse_epca_projection", dc.mse_epca_projection);
    add("denoise", "mse_eblp", dc.mse_eblp);
    add("denoise", "fit_seconds", dc.fit_seconds);
    add("denoise", "eblp_seconds", dc.eblp_seconds);
  }

  out << "# scale=" << (a.full ? "full" : "quick") << " trials=" << trials << " base_seed=" << base << '\n'
      << "experiment,metric,value\n";
  for (const auto& [key, value] : rows) out << key << ',' << value << '\n';
  return kSuccess;
}

}  // namespace

int dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Exponential family PCA: covariance estimation and denoising", "epca"};
  app.require_subcommand(1);

  FitArgs fit;
  auto* fit_cmd = app.add_subcommand("fit", "Fit ePCA and write a model bundle");
  fit_cmd->add_option("--input", fit.input, "Data matrix (CSV or EPM1), rows are samples")
      ->required();
  fit_cmd->add_option("--family", fit.family, "poisson | gaussian:VAR | binomial:K | negbin:R");
  fit_cmd->add_option("--rank", fit.rank, "Number of spikes")->required()->check(CLI::NonNegativeNumber);
  fit_cmd->add_option("--out", fit.out, "Bundle directory")->required();
  fit_cmd->add_flag("--keep-degenerate", fit.keep_degenerate,
                    "Fail on zero-noise columns instead of dropping them");
  fit_cmd->add_flag("--clamp-means", fit.clamp_means, "Clamp means into the family's domain");
  fit_cmd->add_option("--epsilon", fit.epsilon, "Default ridge stored with the model")
      ->check(CLI::Range(0.0, 1.0));
  fit_cmd->add_option("--seed", fit.seed, "Seed recorded as provenance");

  DenoiseArgs den;
  auto* den_cmd = app.add_subcommand("denoise", "Denoise rows with a fitted model");
  den_cmd->add_option("--model", den.model, "Bundle directory")->required();
  den_cmd->add_option("--input", den.input, "Noisy matrix")->required();
  den_cmd->add_option("--out", den.out, "Output matrix, same format as the input")->required();
  den_cmd->add_option("--method", den.method)->check(CLI::IsMember({"eblp", "projection"}));
  den_cmd->add_option("--epsilon", den.epsilon, "Ridge; defaults to the bundle's value")
      ->check(CLI::Range(0.0, 1.0));
  den_cmd->add_flag("--clamp", den.clamp, "Clip negative outputs to zero");
  den_cmd->add_option("--truth", den.truth, "Clean matrix for an MSE report");

  SimulateArgs sim;
  auto* sim_cmd = app.add_subcommand("simulate", "Generate synthetic Poisson data");
  sim_cmd->add_option("--scenario", sim.scenario)->check(CLI::IsMember({"spiked", "lowrank"}));
  sim_cmd->add_option("--n", sim.n)->check(CLI::Range(Eigen::Index{2}, Eigen::Index{1} << 40));
  sim_cmd->add_option("--p", sim.p)->check(CLI::PositiveNumber);
  sim_cmd->add_option("--rank", sim.rank)->check(CLI::PositiveNumber);
  sim_cmd->add_option("--ell", sim.ell, "Spike strength (spiked scenario)")->check(CLI::NonNegativeNumber);
  sim_cmd->add_option("--strength", sim.strength, "Coefficient sum A (lowrank scenario)")
      ->check(CLI::PositiveNumber);
  sim_cmd->add_option("--seed", sim.seed);
  sim_cmd->add_option("--trials", sim.trials)->check(CLI::PositiveNumber);
  sim_cmd->add_option("--out", sim.out, "Output directory")->required();
  sim_cmd->add_option("--format", sim.format)->check(CLI::IsMember({"csv", "epm1"}));
  sim_cmd->add_flag("--no-data", sim.no_data, "Write only the trial report");
  sim_cmd->add_option("--threads", sim.threads)->check(CLI::PositiveNumber);

  double mp_gamma = 0.5;
  Eigen::Index mp_grid = 200;
  auto* mp_cmd = app.add_subcommand("mp", "Marchenko-Pastur density table");
  mp_cmd->add_option("--gamma", mp_gamma)->required();
  mp_cmd->add_option("--grid", mp_grid);

  EigenArgs eig;
  auto* eig_cmd = app.add_subcommand("eigen", "Principal component scores");
  eig_cmd->add_option("--input", eig.input)->required();
  eig_cmd->add_option("--family", eig.family);
  eig_cmd->add_option("--normalization", eig.normalization)
      ->check(CLI::IsMember({"homogenize", "standardize", "none"}));
  eig_cmd->add_option("--rank", eig.rank)->check(CLI::PositiveNumber);
  eig_cmd->add_option("--out", eig.out, "Output file; stdout when omitted");
  eig_cmd->add_flag("--clamp-means", eig.clamp_means);

  BenchArgs bench;
  auto* bench_cmd = app.add_subcommand("bench", "Run the acceptance experiments and summarise");
  bench_cmd->add_flag("--full", bench.full, "Paper-scale sizes and trial counts");
  bench_cmd->add_option("--seed", bench.seed);
  bench_cmd->add_option("--threads", bench.threads)->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kSuccess : kUsageError;
  }

  try {
    if (fit_cmd->parsed()) return run_fit(fit, out);
    if (den_cmd->parsed()) return run_denoise(den, out);
    if (sim_cmd->parsed()) return run_simulate(sim, out);
    if (mp_cmd->parsed()) return run_mp(mp_gamma, mp_grid, out);
    if (eig_cmd->parsed()) return run_eigen(eig, out);
    if (bench_cmd->parsed()) return run_bench(bench, out);
  } catch (const UsageError& e) {
    err << "epca: " << e.what() << '\n';
    return kUsageError;
  } catch (const Error& e) {
    err << "epca: " << e.what() << '\n';
    return kDataError;
  } catch (const std::exception& e) {
    err << "epca: " << e.what() << '\n';
    return kDataError;
  }
  return kUsageError;
}

}  // namespace epca::cli
