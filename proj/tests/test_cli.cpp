#include <gtest/gtest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "epca/bundle.hpp"
#include "epca/matrix_io.hpp"
#include "epca/simgen.hpp"
#include "test_util.hpp"

namespace epca {
namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "epca");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::dispatch(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override { unsetenv("EPCA_SEED"); }
  void TearDown() override { unsetenv("EPCA_SEED"); }
  test::TempDir dir{"cli"};
};

TEST_F(Cli, UsageErrors) {
  EXPECT_EQ(run({}).code, 1);
  EXPECT_EQ(run({"frobnicate"}).code, 1);
  EXPECT_EQ(run({"mp", "--gamma", "0.5", "--bogus"}).code, 1);
  EXPECT_EQ(run({"fit", "--input", "x.csv"}).code, 1);
  EXPECT_EQ(run({"mp", "--gamma", "-1"}).code, 1);
  EXPECT_EQ(run({"--help"}).code, 0);
}

TEST_F(Cli, MissingInputIsDataError) {
  const std::string path = (dir / "nope.csv").string();
  const auto r = run({"fit", "--input", path, "--rank", "1", "--out", (dir / "m").string()});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find(path), std::string::npos) << r.err;
}

TEST_F(Cli, MpTable) {
  const auto r = run({"mp", "--gamma", "0.5", "--grid", "11"});
  ASSERT_EQ(r.code, 0) << r.err;
  std::istringstream in(r.out);
  const CsvTable t = read_csv_table(in);
  EXPECT_EQ(t.columns, (std::vector<std::string>{"x", "pdf"}));
  EXPECT_EQ(t.values.rows(), 11);
  EXPECT_NE(r.out.find("# support_hi="), std::string::npos);
  EXPECT_NE(r.out.find("# atom_at_zero=0"), std::string::npos);
}

TEST_F(Cli, SimulateFitDenoiseRoundTrip) {
  const auto sim = dir / "sim";
  auto r = run({"simulate", "--scenario", "spiked", "--n", "400", "--p", "60", "--ell", "3", "--seed", "5",
                "--trials", "2", "--out", sim.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(std::filesystem::exists(sim / "y_0.csv"));
  EXPECT_TRUE(std::filesystem::exists(sim / "x_1.csv"));
  EXPECT_TRUE(std::filesystem::exists(sim / "report.csv"));

  const auto model = dir / "model";
  r = run({"fit", "--input", (sim / "y_0.csv").string(), "--family", "poisson", "--rank", "2", "--out",
           model.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("spike,kept,ell_hat"), std::string::npos);
  EXPECT_EQ(load_bundle(model).model.requested_rank, 2);

  r = run({"denoise", "--model", model.string(), "--input", (sim / "y_0.csv").string(), "--out",
           (dir / "den.csv").string(), "--truth", (sim / "x_0.csv").string(), "--clamp"});
  ASSERT_EQ(r.code, 0) << r.err;
  const Eigen::MatrixXd den = read_matrix(dir / "den.csv");
  EXPECT_EQ(den.rows(), 400);
  EXPECT_GE(den.minCoeff(), 0.0);
  EXPECT_NE(r.out.find("denoised,"), std::string::npos);
}

TEST_F(Cli, DenoiseKeepsInputFormat) {
  SpikedPoissonConfig cfg;
  cfg.n = 200;
  cfg.p = 30;
  cfg.ell = 2.0;
  cfg.seed = 1;
  write_matrix(dir / "y.epm", gen_spiked_poisson(cfg).batch.values());
  ASSERT_EQ(run({"fit", "--input", (dir / "y.epm").string(), "--rank", "1", "--out", (dir / "m").string()}).code, 0);
  const auto r = run({"denoise", "--model", (dir / "m").string(), "--input", (dir / "y.epm").string(), "--out",
                      (dir / "d.out").string(), "--method", "projection"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(sniff_format(dir / "d.out"), MatrixFormat::epm1);
}

TEST_F(Cli, SimulateIsDeterministicAndSeedOverridable) {
  const auto a = dir / "a", b = dir / "b", c = dir / "c";
  const std::vector<std::string> base{"simulate", "--scenario", "lowrank", "--n", "100", "--p", "20",
                                      "--rank", "2", "--trials", "3", "--seed", "9", "--out"};
  auto args = base;
  args.push_back(a.string());
  ASSERT_EQ(run(args).code, 0);
  args.back() = b.string();
  ASSERT_EQ(run(args).code, 0);
  EXPECT_EQ(slurp(a / "report.csv"), slurp(b / "report.csv"));
  EXPECT_EQ(slurp(a / "y_2.csv"), slurp(b / "y_2.csv"));

  setenv("EPCA_SEED", "10", 1);
  args.back() = c.string();
  ASSERT_EQ(run(args).code, 0);
  EXPECT_NE(slurp(a / "y_0.csv"), slurp(c / "y_0.csv"));
  EXPECT_NE(slurp(c / "report.csv").find("base_seed=10"), std::string::npos);

  setenv("EPCA_SEED", "ten", 1);
  EXPECT_EQ(run(args).code, 1);
}

TEST_F(Cli, EigenOnGenotypes) {
  {
    std::ofstream f(dir / "snps.csv");
    f << "s1,s2,s3,s4,s5\n";
    const int rows[8][5] = {{0, 1, 2, 0, 2}, {1, 1, 2, 0, 2}, {2, 0, 1, 1, 2}, {0, 2, 0, 1, 2},
                            {1, 1, 1, 2, 2}, {2, 2, 0, 0, 2}, {0, 0, 1, 1, 2}, {1, 2, 2, 2, 2}};
    for (const auto& row : rows) {
      for (int j = 0; j < 5; ++j) f << (j ? "," : "") << (j == 1 && row[0] == 2 ? std::string("NA") : std::to_string(row[j]));
      f << '\n';
    }
  }
  const auto r = run({"eigen", "--input", (dir / "snps.csv").string(), "--family", "binomial:2",
                      "--normalization", "homogenize", "--rank", "2"});
  ASSERT_EQ(r.code, 0) << r.err;
  std::istringstream in(r.out);
  const CsvTable t = read_csv_table(in);
  EXPECT_EQ(t.columns, (std::vector<std::string>{"pc1", "pc2"}));
  EXPECT_EQ(t.values.rows(), 8);
  EXPECT_NE(r.out.find("4 of 5 SNPs retained"), std::string::npos) << r.out;

  for (const char* norm : {"standardize", "none"}) {
    EXPECT_EQ(run({"eigen", "--input", (dir / "snps.csv").string(), "--family", "binomial:2", "--normalization",
                   norm, "--rank", "2", "--out", (dir / "pcs.csv").string()})
                  .code,
              0);
  }
}

}  // namespace
}  // namespace epca
