#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <cmath>

#include "maxid/correlation.hpp"
#include "maxid/errors.hpp"
#include "maxid/rng.hpp"
#include "maxid/sites.hpp"

namespace maxid {

// Cholesky factor of a correlation matrix, with the diagonal jitter that was
// needed to make the factorization succeed (hard cap 1e-10).
struct FactorizedCovariance {
  Eigen::MatrixXd sigma;
  Eigen::MatrixXd L;
  double jitter = 0.0;
};

namespace detail {

inline bool try_llt(const Eigen::MatrixXd& m, Eigen::MatrixXd& L) {
  Eigen::LLT<Eigen::MatrixXd> llt(m);
  if (llt.info() != Eigen::Success) return false;
  L = llt.matrixL();
  for (int i = 0; i < L.rows(); ++i) {
    if (!(L(i, i) > 0.0) || !std::isfinite(L(i, i))) return false;
  }
  return true;
}

}  // namespace detail

// Factorizes sigma = L L^T, escalating jitter through 0, 1e-14, 1e-12,
// 1e-10 before declaring the matrix not positive definite.
inline FactorizedCovariance factorize_matrix(const Eigen::MatrixXd& sigma) {
  static constexpr double kJitters[] = {0.0, 1e-14, 1e-12, 1e-10};
  FactorizedCovariance out;
  out.sigma = sigma;
  for (double j : kJitters) {
    Eigen::MatrixXd m = sigma;
    if (j > 0.0) m.diagonal().array() += j;
    if (detail::try_llt(m, out.L)) {
      out.jitter = j;
      return out;
    }
  }
  throw NotPositiveDefinite(
      "correlation matrix not positive definite at jitter 1e-10");
}

inline FactorizedCovariance factorize(const CorrelationModel& model,
                                      const SiteSet& sites, double r) {
  const int n = sites.size();
  Eigen::MatrixXd sigma(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      sigma(i, j) = sigma(j, i) = i == j ? 1.0 : model(sites[i], sites[j], r);
    }
  }
  return factorize_matrix(sigma);
}

// Draw L * g with g iid standard normal.
inline Eigen::VectorXd sample_mvn(const FactorizedCovariance& factor,
                                  RandomStream& rng) {
  const int n = static_cast<int>(factor.L.rows());
  Eigen::VectorXd g(n);
  for (int i = 0; i < n; ++i) g[i] = rng.normal();
  return factor.L.template triangularView<Eigen::Lower>() * g;
}

// Conditional draw of a zero-mean unit-variance Gaussian vector over
// `sites`, given the field equals w0 at s0, at profile magnitude r.
//
// Uses conditioning by kriging on the (possibly augmented) joint draw:
//   W' = W + sigma0 (w0 - W(s0)),
// which has exactly the conditional mean sigma0 w0 and covariance
// Sigma - sigma0 sigma0^T.  If s0 is one of the sites the output there is
// w0 exactly.
inline Eigen::VectorXd conditional_mvn_given_site(
    const CorrelationModel& model, const SiteSet& sites, const Site& s0,
    double w0, double r, RandomStream& rng) {
  const int n = sites.size();
  int anchor = -1;
  for (int i = 0; i < n; ++i) {
    if ((sites[i] - s0).norm() == 0.0) {
      anchor = i;
      break;
    }
  }
  if (anchor >= 0) {
    const auto factor = factorize(model, sites, r);
    Eigen::VectorXd w = sample_mvn(factor, rng);
    Eigen::VectorXd out =
        w + factor.sigma.col(anchor) * (w0 - w[anchor]);
    out[anchor] = w0;
    return out;
  }
  // s0 not a member: factorize the joint matrix with s0 appended last.
  const int m = n + 1;
  Eigen::MatrixXd sigma(m, m);
  for (int i = 0; i < m; ++i) {
    const Site& si = i < n ? sites[i] : s0;
    for (int j = i; j < m; ++j) {
      const Site& sj = j < n ? sites[j] : s0;
      sigma(i, j) = sigma(j, i) = i == j ? 1.0 : model(si, sj, r);
    }
  }
  const auto factor = factorize_matrix(sigma);
  Eigen::VectorXd g(m);
  for (int i = 0; i < m; ++i) g[i] = rng.normal();
  Eigen::VectorXd w = factor.L.template triangularView<Eigen::Lower>() * g;
  Eigen::VectorXd out =
      w.head(n) + factor.sigma.col(m - 1).head(n) * (w0 - w[m - 1]);
  return out;
}

}  // namespace maxid
