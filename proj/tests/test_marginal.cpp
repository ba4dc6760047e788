#include <gtest/gtest.h>

#include <cmath>

#include "maxid/marginal.hpp"
#include "test_util.hpp"

using namespace maxid;

namespace {

const MarginalLaw& gumbel_law() {
  // Location mixture at alpha=beta1=beta2=1: Lambda(z) = e^{1/2 - z} in
  // closed form (Gumbel with location 1/2).
  static const MarginalLaw law{LocationMeasure{1.0, 1.0, 1.0}};
  return law;
}

const MarginalLaw& frechet_like_law() {
  // Scale mixture at the beta=0 boundary with alpha=1:
  // Lambda(z) = z^{-1} / sqrt(2 pi).
  static const MarginalLaw law{ScaleMeasure{1.0, 0.0}};
  return law;
}

}  // namespace

TEST(MarginalLaw, LocationClosedFormExponent) {
  const auto& law = gumbel_law();
  EXPECT_NEAR(law.exponent_at(2.0), std::exp(-1.5), 1e-9);
  for (double z : {-2.0, 0.0, 1.0, 4.0, 8.0}) {
    EXPECT_NEAR(law.exponent_at(z) / std::exp(0.5 - z), 1.0, 1e-8)
        << "z=" << z;
  }
}

TEST(MarginalLaw, ScaleBoundaryClosedFormExponent) {
  const auto& law = frechet_like_law();
  EXPECT_NEAR(law.exponent_at(1.0), 0.3989422804014327, 1e-9);
  for (double z : {0.5, 2.0, 7.0, 20.0}) {
    EXPECT_NEAR(law.exponent_at(z) * z * std::sqrt(2.0 * kPi), 1.0, 1e-8);
  }
}

TEST(MarginalLaw, ExponentStrictlyDecreasing) {
  const auto& law = gumbel_law();
  double prev = law.exponent_at(-1.0);
  for (double z = -0.5; z < 6.0; z += 0.5) {
    const double cur = law.exponent_at(z);
    EXPECT_LT(cur, prev);
    prev = cur;
  }
}

TEST(MarginalLaw, GumbelCdfValue) {
  EXPECT_NEAR(gumbel_law().cdf(0.5), std::exp(-1.0), 1e-9);
}

TEST(MarginalLaw, CdfNondecreasingOnGrid) {
  const auto& law = frechet_like_law();
  double prev = -1.0;
  for (int i = 0; i < 1000; ++i) {
    const double z = 0.05 + i * 0.02;
    const double c = law.cdf(z);
    EXPECT_GE(c, prev);
    prev = c;
  }
  EXPECT_DOUBLE_EQ(law.cdf(-5.0), 0.0);
}

TEST(MarginalLaw, QuantileCdfRoundTrip) {
  const auto& law = gumbel_law();
  const auto& grid = law.grid_z();
  for (std::size_t i = 5; i < grid.size(); i += 97) {
    const double z = grid[i];
    // In exponent space the round trip holds on the whole table.
    EXPECT_NEAR(law.quantile_from_exponent(law.exponent_interp(z)), z, 1e-7);
    // Through p = exp(-Lambda) the binary64 resolution of p near 1 caps
    // the achievable z accuracy; restrict to the representable range.
    const double p = law.cdf(z);
    if (p <= 0.0 || p >= 1.0 - 1e-8) continue;
    EXPECT_NEAR(law.quantile(p), z, 1e-7);
  }
}

TEST(MarginalLaw, QuantileHitsTargetProbability) {
  for (const MarginalLaw* law : {&gumbel_law(), &frechet_like_law()}) {
    for (double p : {1e-10, 1e-4, 0.05, 0.5, 0.95, 1.0 - 1e-9}) {
      const double z = law->quantile(p);
      EXPECT_NEAR(law->cdf(z), p, 1e-10) << "p=" << p;
    }
  }
}

TEST(MarginalLaw, TabulationAgreesWithFreshQuadrature) {
  const auto& law = frechet_like_law();
  const auto& grid = law.grid_z();
  for (std::size_t i = 1; i < grid.size(); i += 131) {
    const double z = grid[i];
    EXPECT_NEAR(std::exp(-law.exponent_at(z)) / std::exp(-law.exponent_interp(z)),
                1.0, 1e-7);
  }
  // Off-grid points exercise the interpolant against fresh quadrature.
  for (double z : {0.11, 0.77, 3.3, 14.0}) {
    EXPECT_NEAR(law.exponent_interp(z) / law.exponent_at(z), 1.0, 1e-7);
  }
}

TEST(MarginalLaw, DensityMatchesCdfFiniteDifference) {
  const auto& law = gumbel_law();
  RandomStream rng(55, 0);
  for (int i = 0; i < 20; ++i) {
    const double z = law.quantile(0.02 + 0.96 * rng.uniform());
    const double eps = 1e-5;
    const double fd = (law.cdf(z + eps) - law.cdf(z - eps)) / (2.0 * eps);
    EXPECT_NEAR(law.density(z), fd, 1e-5) << "z=" << z;
  }
}

TEST(MarginalLaw, GumbelDensityClosedForm) {
  // g0(z) = e^{1/2-z} exp(-e^{1/2-z}); at z=0.5 this is e^{-1}.
  EXPECT_NEAR(gumbel_law().density(0.5), std::exp(-1.0), 1e-8);
}

TEST(MarginalLaw, DensityNonnegativeAndIntegratesToOne) {
  const auto& law = gumbel_law();
  const double zlo = law.quantile(1e-9);
  const double zhi = law.quantile(1.0 - 1e-9);
  const int n = 2000;
  double acc = 0.0;
  double prev = law.density(zlo);
  EXPECT_GE(prev, 0.0);
  const double dz = (zhi - zlo) / n;
  for (int i = 1; i <= n; ++i) {
    const double d = law.density(zlo + i * dz);
    EXPECT_GE(d, 0.0);
    acc += 0.5 * (prev + d) * dz;
    prev = d;
  }
  EXPECT_NEAR(acc, 1.0, 1e-6);
}

TEST(MarginalLaw, NextLevelDistributionAndMonotonicity) {
  const auto& law = gumbel_law();
  RandomStream rng(60, 0);
  std::vector<double> z(100000);
  for (std::size_t i = 0; i < z.size(); ++i) {
    RandomStream fresh(61, static_cast<std::uint64_t>(i));
    z[i] = law.next_level(0.0, fresh).second;
  }
  EXPECT_LT(test::ks_statistic(z, [&](double t) { return law.cdf(t); }),
            0.01);

  double e = 0.0;
  double prev_z = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 200; ++i) {
    auto [e2, z2] = law.next_level(e, rng);
    EXPECT_GT(e2, e);
    EXPECT_LT(z2, prev_z);
    e = e2;
    prev_z = z2;
    if (e > 25.0) break;
  }
}

TEST(MarginalLaw, NextLevelDeterministicGivenStream) {
  const auto& law = gumbel_law();
  RandomStream a(77, 3), b(77, 3);
  for (int i = 0; i < 100; ++i) {
    const auto ra = law.next_level(0.5, a);
    const auto rb = law.next_level(0.5, b);
    ASSERT_EQ(ra.first, rb.first);
    ASSERT_EQ(ra.second, rb.second);
  }
}

TEST(MarginalLaw, RangeErrors) {
  const auto& law = gumbel_law();
  EXPECT_THROW(law.quantile(0.0), DomainError);
  EXPECT_THROW(law.quantile(1.0), DomainError);
  EXPECT_THROW(law.quantile_from_exponent(60.0), TabulationRangeExceeded);
  EXPECT_THROW(law.quantile_from_exponent(1e-14), TabulationRangeExceeded);
  RandomStream rng(1, 1);
  EXPECT_THROW(law.next_level(-1.0, rng), DomainError);

  const auto& slaw = frechet_like_law();
  EXPECT_THROW(slaw.exponent_at(0.0), DomainError);
  EXPECT_THROW(slaw.exponent_at(-1.0), DomainError);
  EXPECT_DOUBLE_EQ(slaw.lower_endpoint(), 0.0);
  EXPECT_TRUE(std::isinf(law.lower_endpoint()));
}

TEST(MarginalLaw, PaperS4ParametersBuildAndCoverQuantiles) {
  const MarginalLaw law{ScaleMeasure{5.0, 2.0}};
  double prev = -std::numeric_limits<double>::infinity();
  for (double p : {1e-6, 0.05, 0.25, 0.5, 0.75, 0.95, 1.0 - 1e-6}) {
    const double z = law.quantile(p);
    EXPECT_GT(z, prev);
    EXPECT_GT(z, 0.0);
    prev = z;
  }
}
