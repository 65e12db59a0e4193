#include "epca/matrix_io.hpp"

#include <array>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

#include "epca/errors.hpp"

namespace epca {

namespace {

std::string_view trim(std::string_view s) {
  const auto not_blank = [](char c) { return c != ' ' && c != '\t' && c != '\r' && c != '\n'; };
  std::size_t b = 0;
  while (b < s.size() && !not_blank(s[b])) ++b;
  std::size_t e = s.size();
  while (e > b && !not_blank(s[e - 1])) --e;
  return s.substr(b, e - b);
}

bool parse_double(std::string_view cell, double& out) {
  if (cell.empty()) return false;
  if (cell.front() == '+') cell.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), out);
  return ec == std::errc() && ptr == cell.data() + cell.size();
}

std::uint64_t to_little(std::uint64_t x) {
  if constexpr (std::endian::native == std::endian::big) {
    std::uint64_t r = 0;
    for (int i = 0; i < 8; ++i) r |= ((x >> (8 * i)) & 0xffu) << (8 * (7 - i));
    return r;
  }
  return x;
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  return in;
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  return out;
}

}  // namespace

std::vector<std::string_view> split_csv_row(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      cells.push_back(trim(line.substr(start)));
      break;
    }
    cells.push_back(trim(line.substr(start, comma - start)));
    start = comma + 1;
  }
  return cells;
}

std::string format_double(double x) {
  std::array<char, 32> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), x);
  if (ec != std::errc()) throw std::logic_error("format_double: buffer too small");
  return std::string(buf.data(), ptr);
}

MatrixFormat sniff_format(const std::filesystem::path& path) {
  std::ifstream in = open_input(path);
  std::array<char, 4> head{};
  in.read(head.data(), head.size());
  if (in.gcount() == 4 && std::string_view(head.data(), 4) == kEpm1Magic) return MatrixFormat::epm1;
  return MatrixFormat::csv;
}

MatrixFormat format_for_path(const std::filesystem::path& path) {
  const std::string ext = path.extension().string();
  return (ext == ".epm" || ext == ".epm1") ? MatrixFormat::epm1 : MatrixFormat::csv;
}

CsvTable read_csv_table(std::istream& in, const std::string& source) {
  CsvTable table;
  std::vector<double> data;
  std::size_t cols = 0;
  std::size_t rows = 0;
  std::size_t line_no = 0;
  bool first_record = true;
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view body = trim(line);
    if (body.empty() || body.front() == '#') continue;
    const auto cells = split_csv_row(body);
    if (first_record) {
      first_record = false;
      cols = cells.size();
      double dummy = 0.0;
      bool numeric = true;
      for (auto c : cells) numeric = numeric && parse_double(c, dummy);
      if (!numeric) {
        for (auto c : cells) table.columns.emplace_back(c);
        continue;
      }
    }
    if (cells.size() != cols) {
      throw ParseError(source + ": line " + std::to_string(line_no) + ": expected " +
                       std::to_string(cols) + " fields, found " + std::to_string(cells.size()));
    }
    for (std::size_t j = 0; j < cells.size(); ++j) {
      double v = 0.0;
      if (!parse_double(cells[j], v) || !std::isfinite(v)) {
        throw ParseError(source + ": line " + std::to_string(line_no) + ", column " +
                         std::to_string(j + 1) + ": not a finite number: '" +
                         std::string(cells[j]) + "'");
      }
      data.push_back(v);
    }
    ++rows;
  }
  if (in.bad()) throw IoError(source + ": read failure");
  table.values = Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
      data.data(), static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  return table;
}

Eigen::MatrixXd read_csv(std::istream& in, const std::string& source) {
  return read_csv_table(in, source).values;
}

Eigen::MatrixXd read_epm1(std::istream& in, const std::string& source) {
  std::array<char, 4> magic{};
  in.read(magic.data(), 4);
  if (in.gcount() != 4 || std::string_view(magic.data(), 4) != kEpm1Magic) {
    throw ParseError(source + ": offset 0: missing EPM1 magic bytes");
  }
  std::array<std::uint64_t, 2> dims{};
  for (std::size_t i = 0; i < 2; ++i) {
    in.read(reinterpret_cast<char*>(&dims[i]), 8);
    if (in.gcount() != 8) {
      throw ParseError(source + ": offset " + std::to_string(4 + 8 * i + in.gcount()) +
                       ": truncated header");
    }
    dims[i] = to_little(dims[i]);
  }
  const std::uint64_t rows = dims[0];
  const std::uint64_t cols = dims[1];
  if (cols != 0 && rows > (std::uint64_t{1} << 40) / cols) {
    throw ParseError(source + ": offset 4: implausible dimensions " + std::to_string(rows) + "x" +
                     std::to_string(cols));
  }
  const std::uint64_t count = rows * cols;
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> m(
      static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  const auto bytes = static_cast<std::streamsize>(count * 8);
  in.read(reinterpret_cast<char*>(m.data()), bytes);
  if (in.gcount() != bytes) {
    throw ParseError(source + ": offset " + std::to_string(20 + in.gcount()) + ": truncated data, expected " +
                     std::to_string(count * 8) + " bytes");
  }
  if constexpr (std::endian::native == std::endian::big) {
    for (Eigen::Index i = 0; i < m.size(); ++i) {
      std::uint64_t bits = std::bit_cast<std::uint64_t>(m.data()[i]);
      m.data()[i] = std::bit_cast<double>(to_little(bits));
    }
  }
  return m;
}

Eigen::MatrixXd read_matrix(const std::filesystem::path& path) {
  const MatrixFormat format = sniff_format(path);
  std::ifstream in = open_input(path);
  return format == MatrixFormat::epm1 ? read_epm1(in, path.string()) : read_csv(in, path.string());
}

void write_csv(std::ostream& out, const Eigen::MatrixXd& m, const std::vector<std::string>& comments,
               const std::vector<std::string>& columns) {
  for (const auto& c : comments) out << "# " << c << '\n';
  if (!columns.empty()) {
    for (std::size_t j = 0; j < columns.size(); ++j) out << (j ? "," : "") << columns[j];
    out << '\n';
  }
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) out << ',';
      out << format_double(m(i, j));
    }
    out << '\n';
  }
}

void write_epm1(std::ostream& out, const Eigen::MatrixXd& m) {
  out.write(kEpm1Magic.data(), 4);
  const std::array<std::uint64_t, 2> dims{to_little(static_cast<std::uint64_t>(m.rows())),
                                          to_little(static_cast<std::uint64_t>(m.cols()))};
  out.write(reinterpret_cast<const char*>(dims.data()), 16);
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rm = m;
  if constexpr (std::endian::native == std::endian::big) {
    for (Eigen::Index i = 0; i < rm.size(); ++i) {
      rm.data()[i] = std::bit_cast<double>(to_little(std::bit_cast<std::uint64_t>(rm.data()[i])));
    }
  }
  out.write(reinterpret_cast<const char*>(rm.data()), static_cast<std::streamsize>(rm.size() * 8));
}

void write_matrix(const std::filesystem::path& path, const Eigen::MatrixXd& m, MatrixFormat format,
                  const std::vector<std::string>& comments, const std::vector<std::string>& columns) {
  std::ofstream out = open_output(path);
  if (format == MatrixFormat::epm1) {
    write_epm1(out, m);
  } else {
    write_csv(out, m, comments, columns);
  }
  out.flush();
  if (!out) throw IoError("write to '" + path.string() + "' failed");
}

void write_matrix(const std::filesystem::path& path, const Eigen::MatrixXd& m) {
  write_matrix(path, m, format_for_path(path));
}

}  // namespace epca
