#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "maxid/mvn.hpp"
#include "maxid/normal.hpp"
#include "test_util.hpp"

using namespace maxid;
using maxid::test::ks_statistic;

namespace {

SiteSet line_sites(std::initializer_list<double> xs) {
  std::vector<Site> sites;
  for (double x : xs) {
    Site s(1);
    s << x;
    sites.push_back(s);
  }
  return SiteSet(sites, Ordering::coordinate_wise);
}

CorrelationModel exp_model(double rate) {
  CorrelationModel m;
  m.kind = CorrelationModel::Kind::stationary_exponential;
  m.rate = rate;
  return m;
}

}  // namespace

TEST(Factorize, SingleSiteIsIdentity) {
  const auto f = factorize(exp_model(1.0), line_sites({0.0}), 1.0);
  ASSERT_EQ(f.L.rows(), 1);
  EXPECT_DOUBLE_EQ(f.L(0, 0), 1.0);
  EXPECT_DOUBLE_EQ(f.jitter, 0.0);
}

TEST(Factorize, TwoSiteHandComputedCholesky) {
  // rho = 0.5 at distance log(2) under rate 1.
  const auto f =
      factorize(exp_model(1.0), line_sites({0.0, std::log(2.0)}), 1.0);
  EXPECT_NEAR(f.L(0, 0), 1.0, 1e-14);
  EXPECT_NEAR(f.L(1, 0), 0.5, 1e-14);
  EXPECT_NEAR(f.L(1, 1), std::sqrt(0.75), 1e-14);
  EXPECT_NEAR(f.L(0, 1), 0.0, 1e-14);
}

TEST(Factorize, ReproducesSigmaOnMagnitudeScaledModel) {
  CorrelationModel m;
  m.kind = CorrelationModel::Kind::magnitude_scaled;
  m.lambda.kind = LambdaSurface::Kind::ridge;
  m.nu = 3.0;
  RandomStream rng(11, 0);
  std::vector<Site> sites;
  for (int i = 0; i < 10; ++i) {
    Site s(2);
    s << rng.uniform(), rng.uniform();
    sites.push_back(s);
  }
  const SiteSet ss(sites, Ordering::coordinate_wise);
  const auto f = factorize(m, ss, 0.8);
  const Eigen::MatrixXd recon = f.L * f.L.transpose();
  EXPECT_LT((recon - f.sigma).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(Factorize, JitterStaysTinyOnRandomSiteSets) {
  CorrelationModel m;
  m.kind = CorrelationModel::Kind::magnitude_scaled;
  m.lambda.kind = LambdaSurface::Kind::ridge;
  m.nu = 1.0;
  RandomStream rng(13, 0);
  for (int n : {2, 10, 40, 100}) {
    for (double r : {0.01, 1.0, 100.0}) {
      std::vector<Site> sites;
      for (int i = 0; i < n; ++i) {
        Site s(2);
        s << rng.uniform(), rng.uniform();
        sites.push_back(s);
      }
      const auto f = factorize(m, SiteSet(sites, Ordering::coordinate_wise), r);
      EXPECT_LE(f.jitter, 1e-10) << "n=" << n << " r=" << r;
    }
  }
}

TEST(SampleMvn, SingleSiteMarginalIsStandardNormal) {
  const auto f = factorize(exp_model(1.0), line_sites({0.0}), 1.0);
  RandomStream rng(17, 0);
  std::vector<double> x(10000);
  for (double& v : x) v = sample_mvn(f, rng)[0];
  EXPECT_LT(ks_statistic(x, [](double t) { return norm_cdf(t); }), 0.02);
}

TEST(SampleMvn, EmpiricalCovarianceMatchesSigma) {
  const auto f = factorize(exp_model(2.0), line_sites({0.0, 0.3, 1.0}), 1.0);
  RandomStream rng(19, 0);
  Eigen::Matrix3d acc = Eigen::Matrix3d::Zero();
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const Eigen::VectorXd w = sample_mvn(f, rng);
    acc += w * w.transpose();
  }
  acc /= static_cast<double>(n);
  EXPECT_LT((acc - f.sigma).cwiseAbs().maxCoeff(), 0.02);
}

TEST(SampleMvn, DeterministicGivenStream) {
  const auto f = factorize(exp_model(1.0), line_sites({0.0, 0.5}), 1.0);
  RandomStream a(23, 4), b(23, 4);
  for (int i = 0; i < 20; ++i) {
    ASSERT_EQ(sample_mvn(f, a), sample_mvn(f, b));
  }
}

TEST(ConditionalMvn, ConditioningOnTheOnlySiteReturnsIt) {
  const auto sites = line_sites({0.4});
  RandomStream rng(29, 0);
  const auto w =
      conditional_mvn_given_site(exp_model(1.0), sites, sites[0], 1.7, 1.0,
                                 rng);
  ASSERT_EQ(w.size(), 1);
  EXPECT_DOUBLE_EQ(w[0], 1.7);
}

TEST(ConditionalMvn, DistantConditioningMatchesUnconditional) {
  // rate so large the cross-correlation vanishes: conditional == marginal.
  const auto model = exp_model(200.0);
  const auto sites = line_sites({0.0});
  Site far(1);
  far << 1.0;
  RandomStream rng(31, 0);
  std::vector<double> cond(10000), uncond(10000);
  const auto f = factorize(model, sites, 1.0);
  for (int i = 0; i < 10000; ++i) {
    cond[i] = conditional_mvn_given_site(model, sites, far, 2.0, 1.0, rng)[0];
    uncond[i] = sample_mvn(f, rng)[0];
  }
  EXPECT_LT(maxid::test::ks_two_sample(cond, uncond), 0.03);
}

TEST(ConditionalMvn, TwoSiteMomentsMatchConditionalFormulas) {
  // rho=0.7, w0=1.5: conditional mean 1.05, variance 0.51.
  const double rho = 0.7;
  const auto sites = line_sites({0.0, -std::log(rho)});
  const auto model = exp_model(1.0);
  RandomStream rng(37, 0);
  std::vector<double> x(100000);
  for (double& v : x) {
    const auto w =
        conditional_mvn_given_site(model, sites, sites[0], 1.5, 1.0, rng);
    ASSERT_DOUBLE_EQ(w[0], 1.5);
    v = w[1];
  }
  EXPECT_NEAR(test::mean(x), 1.05, 0.01);
  EXPECT_NEAR(test::variance(x), 0.51, 0.01);
}

TEST(ConditionalMvn, ResampledAnchorRecoversJointLaw) {
  // Drawing w0 ~ N(0,1) then W | W(s0)=w0 must reproduce the unconditional
  // joint law; checked with a two-sample energy statistic against a
  // permutation threshold.
  const auto model = exp_model(2.0);
  const auto sites = line_sites({0.0, 0.25, 0.9});
  const auto f = factorize(model, sites, 1.0);
  const int n = 600;
  RandomStream rng(41, 0);
  std::vector<Eigen::VectorXd> xs, ys;
  for (int i = 0; i < n; ++i) {
    const double w0 = rng.normal();
    xs.push_back(
        conditional_mvn_given_site(model, sites, sites[0], w0, 1.0, rng));
    ys.push_back(sample_mvn(f, rng));
  }
  auto energy = [](const std::vector<Eigen::VectorXd>& a,
                   const std::vector<Eigen::VectorXd>& b) {
    double axy = 0.0, axx = 0.0, ayy = 0.0;
    const auto na = a.size(), nb = b.size();
    for (std::size_t i = 0; i < na; ++i) {
      for (std::size_t j = 0; j < nb; ++j) axy += (a[i] - b[j]).norm();
    }
    for (std::size_t i = 0; i < na; ++i) {
      for (std::size_t j = i + 1; j < na; ++j) axx += (a[i] - a[j]).norm();
    }
    for (std::size_t i = 0; i < nb; ++i) {
      for (std::size_t j = i + 1; j < nb; ++j) ayy += (b[i] - b[j]).norm();
    }
    const double da = static_cast<double>(na), db = static_cast<double>(nb);
    return 2.0 * axy / (da * db) - 2.0 * axx / (da * da) -
           2.0 * ayy / (db * db);
  };
  const double observed = energy(xs, ys);

  // Permutation null: pool and re-split.
  std::vector<Eigen::VectorXd> pool = xs;
  pool.insert(pool.end(), ys.begin(), ys.end());
  int exceed = 0;
  const int n_perm = 49;
  for (int p = 0; p < n_perm; ++p) {
    for (int i = static_cast<int>(pool.size()) - 1; i > 0; --i) {
      const int j = static_cast<int>(rng.below(i + 1));
      std::swap(pool[i], pool[j]);
    }
    std::vector<Eigen::VectorXd> pa(pool.begin(), pool.begin() + n);
    std::vector<Eigen::VectorXd> pb(pool.begin() + n, pool.end());
    if (energy(pa, pb) >= observed) ++exceed;
  }
  // Not in the extreme tail of the permutation null.
  EXPECT_GE(exceed, 3);
}

TEST(ConditionalMvn, AugmentedAnchorKeepsMarginals) {
  // s0 outside the site list: outputs remain standard normal marginally
  // when w0 is resampled from N(0,1).
  const auto model = exp_model(2.0);
  const auto sites = line_sites({0.0, 0.5});
  Site s0(1);
  s0 << 0.2;
  RandomStream rng(43, 0);
  std::vector<double> x(10000);
  for (double& v : x) {
    const double w0 = rng.normal();
    v = conditional_mvn_given_site(model, sites, s0, w0, 1.0, rng)[1];
  }
  EXPECT_LT(ks_statistic(x, [](double t) { return norm_cdf(t); }), 0.02);
}
