#include <gtest/gtest.h>

#include <cmath>

#include "maxid/magnitude.hpp"
#include "maxid/quadrature.hpp"
#include "maxid/rng.hpp"

using namespace maxid;

TEST(ScaleMeasure, TailMassAtOneIsOne) {
  for (double alpha : {0.5, 1.0, 5.0}) {
    for (double beta : {0.0, 0.5, 2.0}) {
      EXPECT_DOUBLE_EQ((ScaleMeasure{alpha, beta}.tail_mass(1.0)), 1.0);
    }
  }
}

TEST(ScaleMeasure, SmallBetaApproachesPowerLaw) {
  // kappa -> r^-alpha as beta -> 0; at alpha=1, r=2 the limit is 0.5.
  double prev_err = 1.0;
  for (double beta : {0.1, 0.01, 0.001}) {
    const double v = ScaleMeasure{1.0, beta}.tail_mass(2.0);
    const double err = std::abs(v - 0.5);
    EXPECT_LT(err, prev_err);
    prev_err = err;
  }
  EXPECT_NEAR((ScaleMeasure{1.0, 0.001}.tail_mass(2.0)), 0.5, 1e-3);
}

TEST(ScaleMeasure, DomainErrors) {
  const ScaleMeasure m{1.0, 1.0};
  EXPECT_THROW(m.tail_mass(0.0), DomainError);
  EXPECT_THROW(m.tail_mass(-1.0), DomainError);
  EXPECT_THROW(m.intensity(0.0), DomainError);
  EXPECT_THROW(m.inverse_tail_mass(0.0), DomainError);
}

TEST(LocationMeasure, ExponentialReduction) {
  // alpha=beta1=beta2=1 collapses to kappa(r) = exp(-r) on all of R.
  const LocationMeasure m{1.0, 1.0, 1.0};
  EXPECT_NEAR(m.tail_mass(1.7), std::exp(-1.7), 1e-15);
  EXPECT_NEAR(m.tail_mass(-1.7), std::exp(1.7), 1e-12);
  EXPECT_DOUBLE_EQ(m.tail_mass(0.0), 1.0);
}

TEST(Intensity, MatchesFiniteDifferenceOfTailMass) {
  const ScaleMeasure sm{5.0, 2.0};
  const LocationMeasure lm{1.0, 1.5, 0.5};
  for (double r : {0.7, 3.1}) {
    const double eps = 1e-6 * r;
    const double fd_s =
        (sm.tail_mass(r - eps) - sm.tail_mass(r + eps)) / (2.0 * eps);
    EXPECT_NEAR(sm.intensity(r) / fd_s, 1.0, 1e-6) << "scale r=" << r;
    const double fd_l =
        (lm.tail_mass(r - eps) - lm.tail_mass(r + eps)) / (2.0 * eps);
    EXPECT_NEAR(lm.intensity(r) / fd_l, 1.0, 1e-6) << "loc r=" << r;
    const double fd_ln =
        (lm.tail_mass(-r - eps) - lm.tail_mass(-r + eps)) / (2.0 * eps);
    EXPECT_NEAR(lm.intensity(-r) / fd_ln, 1.0, 1e-6) << "loc r=" << -r;
  }
}

TEST(Intensity, PowerLawBoundaryClosedForm) {
  // beta=0, alpha=1: intensity alpha r^{-alpha-1} = 0.25 at r=2.
  EXPECT_NEAR((ScaleMeasure{1.0, 0.0}.intensity(2.0)), 0.25, 1e-15);
}

TEST(InverseTailMass, RoundTrips) {
  const ScaleMeasure m{5.0, 2.0};
  for (double r0 : {0.1, 1.0, 10.0}) {
    EXPECT_NEAR(m.inverse_tail_mass(m.tail_mass(r0)), r0, 1e-8);
  }
  EXPECT_NEAR((ScaleMeasure{1.0, 0.0}.inverse_tail_mass(4.0)), 0.25, 1e-14);
  const LocationMeasure lm{1.0, 1.0, 1.0};
  EXPECT_NEAR(lm.inverse_tail_mass(std::exp(2.0)), -2.0, 1e-12);
  EXPECT_NEAR(lm.inverse_tail_mass(1.0), 0.0, 1e-15);
}

TEST(TailMass, StrictlyDecreasingProperty) {
  RandomStream rng(77, 0);
  for (int trial = 0; trial < 200; ++trial) {
    const ScaleMeasure sm{0.2 + 5.0 * rng.uniform(), 3.0 * rng.uniform()};
    double r1 = 0.01 + 10.0 * rng.uniform();
    double r2 = 0.01 + 10.0 * rng.uniform();
    if (r1 == r2) continue;
    if (r1 > r2) std::swap(r1, r2);
    EXPECT_GT(sm.tail_mass(r1), sm.tail_mass(r2));

    const LocationMeasure lm{0.2 + 3.0 * rng.uniform(),
                             0.2 + 2.0 * rng.uniform(),
                             0.1 + 1.8 * rng.uniform()};
    double s1 = -5.0 + 10.0 * rng.uniform();
    double s2 = -5.0 + 10.0 * rng.uniform();
    if (s1 == s2) continue;
    if (s1 > s2) std::swap(s1, s2);
    EXPECT_GT(lm.tail_mass(s1), lm.tail_mass(s2));
  }
}

TEST(Intensity, IntegratesBackToTailMassDifference) {
  RandomStream rng(78, 0);
  QuadratureOptions opt;
  opt.rel_tol = 1e-10;
  const ScaleMeasure sm{5.0, 2.0};
  for (int trial = 0; trial < 20; ++trial) {
    const double a = 0.05 + 2.0 * rng.uniform();
    const double b = a + 0.1 + 2.0 * rng.uniform();
    const double integral =
        integrate([&](double r) { return sm.intensity(r); }, a, b, opt);
    EXPECT_NEAR(integral, sm.tail_mass(a) - sm.tail_mass(b), 1e-8);
  }
  const LocationMeasure lm{1.0, 1.5, 0.5};
  for (int trial = 0; trial < 20; ++trial) {
    double a = -3.0 + 6.0 * rng.uniform();
    double b = a + 0.1 + 2.0 * rng.uniform();
    double integral = 0.0;
    if (a < 0.0 && b > 0.0) {
      integral =
          integrate([&](double r) { return lm.intensity(r); }, a, 0.0, opt) +
          integrate([&](double r) { return lm.intensity(r); }, 0.0, b, opt);
    } else {
      integral =
          integrate([&](double r) { return lm.intensity(r); }, a, b, opt);
    }
    EXPECT_NEAR(integral, lm.tail_mass(a) - lm.tail_mass(b), 1e-8);
  }
}

TEST(ScaleMeasure, SmallBetaAgreesWithBoundaryOverRange) {
  const ScaleMeasure tiny{1.0, 0.001};
  const ScaleMeasure boundary{1.0, 0.0};
  for (double r = 0.1; r <= 10.0; r += 0.3) {
    EXPECT_NEAR(tiny.tail_mass(r) / boundary.tail_mass(r), 1.0, 1e-2);
  }
}

TEST(Validation, RejectsBadParameters) {
  EXPECT_THROW((ScaleMeasure{-1.0, 1.0}.validate()), ConfigError);
  EXPECT_THROW((ScaleMeasure{1.0, -0.5}.validate()), ConfigError);
  EXPECT_THROW((LocationMeasure{1.0, 1.0, 2.5}.validate()), ConfigError);
  EXPECT_THROW((LocationMeasure{1.0, -1.0, 0.5}.validate()), ConfigError);
  EXPECT_NO_THROW((LocationMeasure{2.0, 3.0, 1.9}.validate()));
}
