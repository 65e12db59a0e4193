#pragma once

#include <Eigen/Dense>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "epca/covariance.hpp"

namespace epca {

/// Cleaned minor-allele counts, n x p'.
struct GenotypeBatch {
  Eigen::MatrixXd values;
  std::vector<std::string> snp_ids;          ///< retained ids; empty without a header
  std::vector<std::size_t> dropped_columns;  ///< indices into the raw columns
  Eigen::Index input_columns = 0;
  std::size_t imputed_entries = 0;

  /// The counts as binomial(2) data.
  DataBatch to_batch() const;
};

/// Imputes missing entries (NaN or -1) with the column mean of the observed
/// values, then removes columns whose allele frequency is 0 or 1 or whose
/// variance is at most `drop_threshold`. Entries must lie in {0, 1, 2}.
GenotypeBatch clean_genotypes(Eigen::MatrixXd raw, std::vector<std::string> snp_ids = {},
                              double drop_threshold = 0.0);

/// Reads a CSV genotype table ("NA", an empty cell or -1 mark missing
/// entries; an optional header holds SNP ids) and cleans it.
GenotypeBatch ingest_genotypes(std::istream& in, const std::string& source = "<stream>",
                               double drop_threshold = 0.0);
GenotypeBatch ingest_genotypes(const std::filesystem::path& path, double drop_threshold = 0.0);

}  // namespace epca
