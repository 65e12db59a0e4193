#include <gtest/gtest.h>

#include <bit>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>

#include "epca/errors.hpp"
#include "epca/matrix_io.hpp"
#include "test_util.hpp"

namespace epca {
namespace {

Eigen::MatrixXd awkward_values() {
  Eigen::MatrixXd m(3, 4);
  m << 0.1, -1e-300, 1.0 / 3.0, 6.02214076e23, std::numeric_limits<double>::denorm_min(), -0.0,
      12345678901234567.0, std::nextafter(1.0, 2.0), 2.0, -7.25, 1e-5, 0.3;
  return m;
}

TEST(Csv, SimpleMatrix) {
  std::istringstream in("1,2\n3,4");
  const Eigen::MatrixXd m = read_csv(in);
  Eigen::Matrix2d expect;
  expect << 1, 2, 3, 4;
  EXPECT_EQ(m, Eigen::MatrixXd(expect));
}

TEST(Csv, CommentsBlankLinesHeaderAndWhitespace) {
  std::istringstream in("# produced by hand\n\nx, y ,z\r\n 1, 2,3 \n# mid comment\n4,5,6\n");
  const CsvTable t = read_csv_table(in);
  EXPECT_EQ(t.columns, (std::vector<std::string>{"x", "y", "z"}));
  ASSERT_EQ(t.values.rows(), 2);
  EXPECT_EQ(t.values(1, 2), 6.0);
  EXPECT_EQ(t.values(0, 0), 1.0);
}

TEST(Csv, RaggedRowNamesLine) {
  std::istringstream in("1,2\n3,4\n5\n");
  try {
    read_csv(in, "data.csv");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("data.csv"), std::string::npos) << msg;
    EXPECT_NE(msg.find("line 3"), std::string::npos) << msg;
  }
}

TEST(Csv, NonNumericAndNonFiniteCellsRejected) {
  std::istringstream a("1,2\n3,x\n");
  EXPECT_THROW(read_csv(a), ParseError);
  std::istringstream b("1,2\n3,inf\n");
  EXPECT_THROW(read_csv(b), ParseError);
  std::istringstream c("1,2\n3,nan\n");
  EXPECT_THROW(read_csv(c), ParseError);
  std::istringstream d("1,2\n3,\n");
  EXPECT_THROW(read_csv(d), ParseError);
}

TEST(Csv, RoundTripIsExact) {
  const Eigen::MatrixXd m = awkward_values();
  std::stringstream s;
  write_csv(s, m, {"comment"}, {"a", "b", "c", "d"});
  const CsvTable t = read_csv_table(s);
  EXPECT_EQ(t.columns.size(), 4u);
  for (Eigen::Index i = 0; i < m.size(); ++i) {
    EXPECT_EQ(std::bit_cast<std::uint64_t>(t.values.data()[i]), std::bit_cast<std::uint64_t>(m.data()[i]));
  }
}

TEST(Epm1, RoundTripIsBitIdentical) {
  test::TempDir dir("epm");
  const Eigen::MatrixXd m = awkward_values();
  write_matrix(dir / "m.epm", m);
  EXPECT_EQ(sniff_format(dir / "m.epm"), MatrixFormat::epm1);
  const Eigen::MatrixXd back = read_matrix(dir / "m.epm");
  ASSERT_EQ(back.rows(), 3);
  ASSERT_EQ(back.cols(), 4);
  EXPECT_EQ(std::memcmp(back.data(), m.data(), sizeof(double) * 12), 0);
}

TEST(Epm1, LayoutIsLittleEndianRowMajor) {
  Eigen::MatrixXd m(2, 3);
  m << 1, 2, 3, 4, 5, 6;
  std::stringstream s;
  write_epm1(s, m);
  const std::string bytes = s.str();
  ASSERT_EQ(bytes.size(), 4u + 16u + 48u);
  EXPECT_EQ(bytes.substr(0, 4), "EPM1");
  EXPECT_EQ(static_cast<unsigned char>(bytes[4]), 2);
  EXPECT_EQ(static_cast<unsigned char>(bytes[12]), 3);
  double second = 0.0;
  std::memcpy(&second, bytes.data() + 20 + 8, 8);
  EXPECT_EQ(second, 2.0);
}

TEST(Epm1, TruncationReportsOffset) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Ones(4, 4);
  std::stringstream s;
  write_epm1(s, m);
  const std::string bytes = s.str();
  std::istringstream cut(bytes.substr(0, bytes.size() - 5));
  try {
    read_epm1(cut, "m.epm");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("offset"), std::string::npos) << e.what();
  }
  std::istringstream header_only(bytes.substr(0, 10));
  EXPECT_THROW(read_epm1(header_only), ParseError);
}

TEST(ReadMatrix, SniffsCsvAndReportsMissingFile) {
  test::TempDir dir("sniff");
  {
    std::ofstream f(dir / "a.dat");
    f << "1,2,3\n";
  }
  EXPECT_EQ(sniff_format(dir / "a.dat"), MatrixFormat::csv);
  EXPECT_EQ(read_matrix(dir / "a.dat").cols(), 3);
  try {
    read_matrix(dir / "missing.csv");
    FAIL() << "expected IoError";
  } catch (const IoError& e) {
    EXPECT_NE(std::string(e.what()).find("missing.csv"), std::string::npos);
  }
}

TEST(FormatDouble, ShortestRoundTrip) {
  EXPECT_EQ(format_double(0.1), "0.1");
  EXPECT_EQ(format_double(3.0), "3");
  std::mt19937_64 gen(1);
  for (int i = 0; i < 1000; ++i) {
    const double x = std::bit_cast<double>(gen() & 0x7fefffffffffffffULL);
    EXPECT_EQ(std::strtod(format_double(x).c_str(), nullptr), x);
  }
}

}  // namespace
}  // namespace epca
