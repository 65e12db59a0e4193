#include "epca/bundle.hpp"

#include <fstream>
#include <json.hpp>

#include "epca/errors.hpp"
#include "epca/matrix_io.hpp"
#include "epca/random.hpp"

namespace epca {

namespace {

using json = nlohmann::json;

const std::vector<std::string> kSpectrumColumns{"spike", "kept", "ell_hat", "lambda_hat", "alpha", "tau"};

template <typename T>
T required(const json& meta, const char* key, const std::filesystem::path& file) {
  if (!meta.contains(key)) throw ParseError(file.string() + ": missing key '" + key + "'");
  try {
    return meta.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ParseError(file.string() + ": key '" + key + "': " + e.what());
  }
}

Eigen::VectorXd read_vector(const std::filesystem::path& path) {
  const Eigen::MatrixXd m = read_matrix(path);
  if (m.cols() != 1) throw ParseError(path.string() + ": expected a single column");
  return m.col(0);
}

}  // namespace

void save_bundle(const std::filesystem::path& dir, const CovarianceModel& model, double epsilon,
                 std::optional<std::uint64_t> seed) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create '" + dir.string() + "': " + ec.message());

  write_matrix(dir / "eigenvectors.epm", model.het_eigvecs, MatrixFormat::epm1);
  write_matrix(dir / "mean.epm", model.mean, MatrixFormat::epm1);
  write_matrix(dir / "noise_diag.epm", model.noise_diag, MatrixFormat::epm1);

  const Eigen::Index r = model.requested_rank;
  const Eigen::Index k = model.rank();
  Eigen::MatrixXd spectrum = Eigen::MatrixXd::Zero(r, 6);
  for (Eigen::Index i = 0; i < r; ++i) {
    spectrum(i, 0) = static_cast<double>(i + 1);
    spectrum(i, 2) = model.homogenized_spikes(i);
    if (i < k) {
      spectrum(i, 1) = 1.0;
      spectrum(i, 3) = model.het_eigvals(i);
      spectrum(i, 4) = model.alphas(i);
      spectrum(i, 5) = model.taus(i);
    }
  }
  write_matrix(dir / "spectrum.csv", spectrum, MatrixFormat::csv, {}, kSpectrumColumns);

  json meta;
  meta["format_version"] = kBundleFormatVersion;
  meta["families"] = json::array();
  for (const auto& f : model.families) meta["families"].push_back(f.to_string());
  meta["requested_rank"] = r;
  meta["rank"] = k;
  meta["gamma"] = model.gamma;
  meta["epsilon"] = epsilon;
  meta["n_samples"] = model.n_samples;
  meta["input_dim"] = model.input_dim;
  meta["dropped_columns"] = model.dropped_columns;
  meta["seed"] = seed ? json(*seed) : json(nullptr);
  meta["rng"] = std::string(kRngName);

  const auto path = dir / "metadata.json";
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << meta.dump(2) << '\n';
  if (!out) throw IoError("write to '" + path.string() + "' failed");
}

ModelBundle load_bundle(const std::filesystem::path& dir) {
  const auto meta_path = dir / "metadata.json";
  std::ifstream in(meta_path);
  if (!in) throw IoError("cannot open '" + meta_path.string() + "' for reading");
  json meta;
  try {
    meta = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError(meta_path.string() + ": " + e.what());
  }
  const int version = required<int>(meta, "format_version", meta_path);
  if (version != kBundleFormatVersion) {
    throw ParseError(meta_path.string() + ": unsupported format_version " + std::to_string(version));
  }

  ModelBundle b;
  CovarianceModel& m = b.model;
  for (const auto& f : required<std::vector<std::string>>(meta, "families", meta_path)) {
    try {
      m.families.push_back(ExponentialFamily::parse(f));
    } catch (const Error& e) {
      throw ParseError(meta_path.string() + ": " + e.what());
    }
  }
  m.requested_rank = required<Eigen::Index>(meta, "requested_rank", meta_path);
  const auto k = required<Eigen::Index>(meta, "rank", meta_path);
  m.gamma = required<double>(meta, "gamma", meta_path);
  b.epsilon = required<double>(meta, "epsilon", meta_path);
  m.n_samples = required<Eigen::Index>(meta, "n_samples", meta_path);
  m.input_dim = required<Eigen::Index>(meta, "input_dim", meta_path);
  m.dropped_columns = required<std::vector<std::size_t>>(meta, "dropped_columns", meta_path);
  if (!meta.contains("seed")) throw ParseError(meta_path.string() + ": missing key 'seed'");
  if (!meta["seed"].is_null()) b.seed = required<std::uint64_t>(meta, "seed", meta_path);
  b.rng = required<std::string>(meta, "rng", meta_path);

  m.het_eigvecs = read_matrix(dir / "eigenvectors.epm");
  m.mean = read_vector(dir / "mean.epm");
  m.noise_diag = read_vector(dir / "noise_diag.epm");

  std::ifstream spec_in(dir / "spectrum.csv");
  if (!spec_in) throw IoError("cannot open '" + (dir / "spectrum.csv").string() + "' for reading");
  const Eigen::MatrixXd spectrum = read_csv(spec_in, (dir / "spectrum.csv").string());

  const Eigen::Index p = m.mean.size();
  if (spectrum.rows() != m.requested_rank || (m.requested_rank > 0 && spectrum.cols() != 6) ||
      k > m.requested_rank || m.het_eigvecs.rows() != p || m.het_eigvecs.cols() != k ||
      m.noise_diag.size() != p ||
      m.input_dim != p + static_cast<Eigen::Index>(m.dropped_columns.size())) {
    throw ParseError(dir.string() + ": bundle files have inconsistent sizes");
  }
  m.homogenized_spikes = m.requested_rank > 0 ? Eigen::VectorXd(spectrum.col(2)) : Eigen::VectorXd();
  m.het_eigvals = spectrum.col(3).head(k);
  m.alphas = spectrum.col(4).head(k);
  m.taus = spectrum.col(5).head(k);
  if (m.requested_rank == 0) {
    m.het_eigvals.resize(0);
    m.alphas.resize(0);
    m.taus.resize(0);
  }
  return b;
}

}  // namespace epca
