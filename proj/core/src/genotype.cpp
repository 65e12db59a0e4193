#include "epca/genotype.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>

#include "epca/errors.hpp"
#include "epca/matrix_io.hpp"

namespace epca {

namespace {

constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();

bool is_missing(double x) { return std::isnan(x) || x == -1.0; }

bool parse_cell(std::string_view cell, double& out) {
  if (cell.empty() || cell == "NA") {
    out = kMissing;
    return true;
  }
  const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), out);
  return ec == std::errc() && ptr == cell.data() + cell.size();
}

}  // namespace

DataBatch GenotypeBatch::to_batch() const {
  return DataBatch(values, ExponentialFamily::binomial(2));
}

GenotypeBatch clean_genotypes(Eigen::MatrixXd raw, std::vector<std::string> snp_ids,
                              double drop_threshold) {
  const Eigen::Index n = raw.rows();
  const Eigen::Index p = raw.cols();
  if (!snp_ids.empty() && static_cast<Eigen::Index>(snp_ids.size()) != p) {
    throw InvalidArgument("genotype ids: " + std::to_string(snp_ids.size()) + " names for " +
                          std::to_string(p) + " columns");
  }
  GenotypeBatch out;
  out.input_columns = p;
  std::vector<Eigen::Index> keep;
  keep.reserve(static_cast<std::size_t>(p));

  for (Eigen::Index j = 0; j < p; ++j) {
    double sum = 0.0;
    Eigen::Index observed = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double x = raw(i, j);
      if (is_missing(x)) continue;
      if (x != 0.0 && x != 1.0 && x != 2.0) {
        throw DomainError("genotype row " + std::to_string(i) + ", column " + std::to_string(j) +
                          ": " + format_double(x) + " is not in {0, 1, 2}");
      }
      sum += x;
      ++observed;
    }
    if (observed == 0) {
      const std::string name = snp_ids.empty() ? "" : " (" + snp_ids[static_cast<std::size_t>(j)] + ")";
      throw DomainError("genotype column " + std::to_string(j) + name + " has no observed entries");
    }
    const double mean = sum / static_cast<double>(observed);
    double ss = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (is_missing(raw(i, j))) {
        raw(i, j) = mean;
        ++out.imputed_entries;
      }
      const double d = raw(i, j) - mean;
      ss += d * d;
    }
    const double q = mean / 2.0;
    const double variance = ss / static_cast<double>(n);
    if (q <= 0.0 || q >= 1.0 || variance <= drop_threshold) {
      out.dropped_columns.push_back(static_cast<std::size_t>(j));
    } else {
      keep.push_back(j);
    }
  }

  if (out.dropped_columns.empty()) {
    out.values = std::move(raw);
    out.snp_ids = std::move(snp_ids);
    return out;
  }
  out.values.resize(n, static_cast<Eigen::Index>(keep.size()));
  for (std::size_t k = 0; k < keep.size(); ++k) {
    out.values.col(static_cast<Eigen::Index>(k)) = raw.col(keep[k]);
    if (!snp_ids.empty()) out.snp_ids.push_back(snp_ids[static_cast<std::size_t>(keep[k])]);
  }
  return out;
}

GenotypeBatch ingest_genotypes(std::istream& in, const std::string& source, double drop_threshold) {
  std::vector<std::string> ids;
  std::vector<double> data;
  std::size_t cols = 0;
  std::size_t rows = 0;
  std::size_t line_no = 0;
  bool first_record = true;
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos || line.front() == '#') continue;
    const auto cells = split_csv_row(line);
    if (first_record) {
      first_record = false;
      cols = cells.size();
      bool numeric = true;
      double v = 0.0;
      for (auto c : cells) numeric = numeric && parse_cell(c, v);
      if (!numeric) {
        for (auto c : cells) ids.emplace_back(c);
        continue;
      }
    }
    if (cells.size() != cols) {
      throw ParseError(source + ": line " + std::to_string(line_no) + ": expected " +
                       std::to_string(cols) + " fields, found " + std::to_string(cells.size()));
    }
    for (std::size_t j = 0; j < cells.size(); ++j) {
      double v = 0.0;
      if (!parse_cell(cells[j], v)) {
        throw ParseError(source + ": line " + std::to_string(line_no) + ", column " +
                         std::to_string(j + 1) + ": bad genotype '" + std::string(cells[j]) + "'");
      }
      data.push_back(v);
    }
    ++rows;
  }
  Eigen::MatrixXd raw = Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
      data.data(), static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  return clean_genotypes(std::move(raw), std::move(ids), drop_threshold);
}

GenotypeBatch ingest_genotypes(const std::filesystem::path& path, double drop_threshold) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  return ingest_genotypes(in, path.string(), drop_threshold);
}

}  // namespace epca
