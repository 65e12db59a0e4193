#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "epca/errors.hpp"
#include "epca/expfam.hpp"

namespace epca {
namespace {

TEST(VarianceMap, PoissonIsIdentity) {
  EXPECT_EQ(variance_map(ExponentialFamily::poisson(), 3.0), 3.0);
}

TEST(VarianceMap, GaussianIsConstant) {
  EXPECT_EQ(variance_map(ExponentialFamily::gaussian(1.0), 17.3), 1.0);
  EXPECT_EQ(variance_map(ExponentialFamily::gaussian(2.5), -4.0), 2.5);
}

TEST(VarianceMap, BinomialTwoAtHalf) {
  // Outcomes 0, 1, 2 with probabilities 1/4, 1/2, 1/4 around mean 1.
  const double brute = 0.25 * 1.0 + 0.5 * 0.0 + 0.25 * 1.0;
  EXPECT_DOUBLE_EQ(variance_map(ExponentialFamily::binomial(2), 1.0), brute);
}

TEST(VarianceMap, NegativeBinomial) {
  EXPECT_NEAR(variance_map(ExponentialFamily::negative_binomial(5.0), 2.0), 2.8, 1e-15);
}

TEST(VarianceMap, OutOfDomainThrowsNamingFamily) {
  try {
    variance_map(ExponentialFamily::poisson(), -0.5);
    FAIL() << "expected DomainError";
  } catch (const DomainError& e) {
    EXPECT_NE(std::string(e.what()).find("poisson"), std::string::npos);
  }
  EXPECT_THROW(variance_map(ExponentialFamily::binomial(2), 2.5), DomainError);
}

TEST(VarianceMap, ClampMapsIntoDomain) {
  EXPECT_EQ(variance_map(ExponentialFamily::poisson(), -0.5, true), 0.0);
  EXPECT_EQ(variance_map(ExponentialFamily::binomial(2), 2.5, true), 0.0);
}

TEST(ValidateMean, Examples) {
  EXPECT_FALSE(validate_mean(ExponentialFamily::poisson(), -0.1));
  EXPECT_TRUE(validate_mean(ExponentialFamily::binomial(2), 2.0));
  EXPECT_TRUE(validate_mean(ExponentialFamily::gaussian(1.0), -5.0));
  EXPECT_TRUE(validate_mean(ExponentialFamily::poisson(), 0.0));
  EXPECT_FALSE(validate_mean(ExponentialFamily::negative_binomial(3.0), -1e-300));
}

TEST(ExponentialFamily, ParseRoundTrip) {
  for (const char* s : {"poisson", "gaussian:2.5", "binomial:2", "negbin:0.75"}) {
    const auto f = ExponentialFamily::parse(s);
    EXPECT_EQ(f.to_string(), s);
    EXPECT_EQ(ExponentialFamily::parse(f.to_string()), f);
  }
  EXPECT_EQ(ExponentialFamily::parse("binomial:2"), ExponentialFamily::binomial(2));
}

TEST(ExponentialFamily, RejectsBadParameters) {
  EXPECT_ANY_THROW(ExponentialFamily::parse("weibull"));
  EXPECT_ANY_THROW(ExponentialFamily::parse("binomial:0"));
  EXPECT_ANY_THROW(ExponentialFamily::parse("gaussian:-1"));
  EXPECT_ANY_THROW(ExponentialFamily::negative_binomial(0.0));
}

// Empirical variance of 10^6 draws (generated with the standard library, not
// the package's sampler) against V(m), within 3 standard errors.
struct Moments {
  double variance;
  double std_error;
};

template <typename Draw>
Moments empirical(Draw draw, int count) {
  std::vector<double> xs(static_cast<std::size_t>(count));
  double mean = 0.0;
  for (auto& x : xs) {
    x = draw();
    mean += x;
  }
  mean /= count;
  double m2 = 0.0, m4 = 0.0;
  for (double x : xs) {
    const double d2 = (x - mean) * (x - mean);
    m2 += d2;
    m4 += d2 * d2;
  }
  m2 /= count;
  m4 /= count;
  return {m2, std::sqrt((m4 - m2 * m2) / count)};
}

TEST(VarianceMapProperty, MatchesMonteCarlo) {
  constexpr int kDraws = 1'000'000;
  std::mt19937_64 gen(2024);
  {
    std::poisson_distribution<int> d(3.7);
    const auto e = empirical([&] { return static_cast<double>(d(gen)); }, kDraws);
    EXPECT_NEAR(e.variance, variance_map(ExponentialFamily::poisson(), 3.7), 3 * e.std_error);
  }
  {
    std::normal_distribution<double> d(-1.0, std::sqrt(2.0));
    const auto e = empirical([&] { return d(gen); }, kDraws);
    EXPECT_NEAR(e.variance, variance_map(ExponentialFamily::gaussian(2.0), -1.0), 3 * e.std_error);
  }
  {
    std::binomial_distribution<int> d(5, 0.3);
    const auto e = empirical([&] { return static_cast<double>(d(gen)); }, kDraws);
    EXPECT_NEAR(e.variance, variance_map(ExponentialFamily::binomial(5), 1.5), 3 * e.std_error);
  }
  {
    // NB(r) with mean m as a gamma-Poisson mixture.
    const double r = 5.0, m = 2.0;
    std::gamma_distribution<double> g(r, m / r);
    const auto e = empirical(
        [&] {
          std::poisson_distribution<int> d(g(gen));
          return static_cast<double>(d(gen));
        },
        kDraws);
    EXPECT_NEAR(e.variance, variance_map(ExponentialFamily::negative_binomial(r), m), 3 * e.std_error);
  }
}

}  // namespace
}  // namespace epca
