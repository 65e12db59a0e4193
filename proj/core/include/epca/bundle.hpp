#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "epca/covariance.hpp"
#include "epca/denoise.hpp"

namespace epca {

inline constexpr int kBundleFormatVersion = 1;

/// A fitted model as stored on disk, with the denoising default and the
/// seed that produced the data (when known).
struct ModelBundle {
  CovarianceModel model;
  double epsilon = kDefaultRidge;
  std::optional<std::uint64_t> seed;
  std::string rng;
};

/// Writes eigenvectors.epm, spectrum.csv, mean.epm, noise_diag.epm and
/// metadata.json into `dir`, creating it if needed.
void save_bundle(const std::filesystem::path& dir, const CovarianceModel& model,
                 double epsilon = kDefaultRidge, std::optional<std::uint64_t> seed = std::nullopt);

/// Reads a bundle written by save_bundle(). Throws ParseError on missing
/// keys, an unknown format version or inconsistent sizes.
ModelBundle load_bundle(const std::filesystem::path& dir);

}  // namespace epca
