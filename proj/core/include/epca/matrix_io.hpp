#pragma once

#include <Eigen/Dense>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace epca {

enum class MatrixFormat { csv, epm1 };

/// Four magic bytes that open every EPM1 file.
inline constexpr std::string_view kEpm1Magic = "EPM1";

/// A CSV table; `columns` is empty when the file has no header row.
struct CsvTable {
  std::vector<std::string> columns;
  Eigen::MatrixXd values;
};

/// Splits one CSV record on commas and trims surrounding blanks. Quoting
/// is not supported.
std::vector<std::string_view> split_csv_row(std::string_view line);

/// Shortest decimal string that parses back to exactly `x`.
std::string format_double(double x);

/// EPM1 if the file opens with the magic bytes, otherwise CSV.
MatrixFormat sniff_format(const std::filesystem::path& path);

/// Format implied by a file name: ".epm"/".epm1" map to EPM1, all else CSV.
MatrixFormat format_for_path(const std::filesystem::path& path);

/// Reads a rectangular CSV matrix. Lines starting with '#' and blank lines
/// are skipped; the first record is taken as a header if any cell is not
/// numeric. Errors name the source and line.
CsvTable read_csv_table(std::istream& in, const std::string& source = "<stream>");
Eigen::MatrixXd read_csv(std::istream& in, const std::string& source = "<stream>");

/// Reads an EPM1 stream. Truncated input is reported with its byte offset.
Eigen::MatrixXd read_epm1(std::istream& in, const std::string& source = "<stream>");

/// Reads a matrix file in either format (sniffed). Throws IoError when the
/// file cannot be opened.
Eigen::MatrixXd read_matrix(const std::filesystem::path& path);

void write_csv(std::ostream& out, const Eigen::MatrixXd& m,
               const std::vector<std::string>& comments = {},
               const std::vector<std::string>& columns = {});
void write_epm1(std::ostream& out, const Eigen::MatrixXd& m);

/// Writes `m` in `format`; CSV output may carry '#' comment lines and a
/// header row.
void write_matrix(const std::filesystem::path& path, const Eigen::MatrixXd& m, MatrixFormat format,
                  const std::vector<std::string>& comments = {},
                  const std::vector<std::string>& columns = {});

/// Same, with the format taken from the file name.
void write_matrix(const std::filesystem::path& path, const Eigen::MatrixXd& m);

}  // namespace epca
