#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <string>

#include "maxid/errors.hpp"
#include "maxid/normal.hpp"
#include "maxid/sites.hpp"

namespace maxid {

// Analytic range-parameter surface lambda_s > 0.
//
// The built-in "ridge" surface exp[2 - 0.5 Phi{(s_x - 0.5)/0.25}] varies the
// range smoothly along the first coordinate of the unit square.
struct LambdaSurface {
  enum class Kind { constant, ridge };
  Kind kind = Kind::constant;
  double value = 1.0;  // for Kind::constant

  double operator()(const Site& s) const {
    switch (kind) {
      case Kind::constant:
        return value;
      case Kind::ridge:
        return std::exp(2.0 - 0.5 * norm_cdf((s[0] - 0.5) / 0.25));
    }
    return value;
  }

  std::string name() const {
    if (kind == Kind::ridge) return "ridge";
    return "constant:" + std::to_string(value);
  }

  void validate() const {
    if (kind == Kind::constant && !(value > 0.0)) {
      throw ConfigError("lambda surface: constant value must be > 0");
    }
  }
};

// Correlation of the Gaussian profile at magnitude r.  Two families:
//
//  * stationary-exponential: rho(h) = exp(-c h), magnitude-free;
//  * magnitude-scaled: a nonstationary exponential model whose local range
//    lambda_s shrinks with the event magnitude through (1+r)^nu,
//      rho(s1,s2;r) = l1 l2 / m * exp{ -(1+r)^nu |s1-s2| / sqrt(m) },
//    with m = (l1^2 + l2^2)/2.  nu = 0 makes it magnitude-free.
struct CorrelationModel {
  enum class Kind { stationary_exponential, magnitude_scaled };
  Kind kind = Kind::stationary_exponential;
  double rate = 1.0;  // c for the stationary model
  LambdaSurface lambda;
  double nu = 0.0;

  void validate() const {
    if (kind == Kind::stationary_exponential && !(rate > 0.0)) {
      throw ConfigError("correlation: rate must be > 0");
    }
    if (!(nu >= 0.0)) throw ConfigError("correlation: nu must be >= 0");
    lambda.validate();
  }

  bool magnitude_dependent() const {
    return kind == Kind::magnitude_scaled && nu > 0.0;
  }

  double operator()(const Site& s1, const Site& s2, double r) const {
    const double h = (s1 - s2).norm();
    if (kind == Kind::stationary_exponential) return std::exp(-rate * h);
    const double l1 = lambda(s1);
    const double l2 = lambda(s2);
    const double m = 0.5 * (l1 * l1 + l2 * l2);
    return (l1 * l2 / m) *
           std::exp(-std::pow(1.0 + r, nu) * h / std::sqrt(m));
  }
};

// Magnitude-independent parts of the pairwise correlation over a site set,
// precomputed so that per-magnitude matrices cost one exp per entry:
//   Sigma_ij(r) = prefactor_ij * exp(-scaled_dist_ij * (1+r)^nu).
struct PairwiseCache {
  Eigen::MatrixXd prefactor;
  Eigen::MatrixXd scaled_dist;
  double nu = 0.0;
  bool magnitude_dependent = false;

  PairwiseCache() = default;

  PairwiseCache(const CorrelationModel& model, const SiteSet& sites) {
    const int n = sites.size();
    prefactor.resize(n, n);
    scaled_dist.resize(n, n);
    nu = model.kind == CorrelationModel::Kind::magnitude_scaled ? model.nu
                                                                : 0.0;
    magnitude_dependent = model.magnitude_dependent();
    for (int i = 0; i < n; ++i) {
      for (int j = i; j < n; ++j) {
        const double h = sites.distance(i, j);
        double pre = 1.0, sd = 0.0;
        if (model.kind == CorrelationModel::Kind::stationary_exponential) {
          sd = model.rate * h;
        } else {
          const double l1 = model.lambda(sites[i]);
          const double l2 = model.lambda(sites[j]);
          const double m = 0.5 * (l1 * l1 + l2 * l2);
          pre = l1 * l2 / m;
          sd = h / std::sqrt(m);
        }
        prefactor(i, j) = prefactor(j, i) = pre;
        scaled_dist(i, j) = scaled_dist(j, i) = sd;
      }
    }
  }

  void fill(double r, Eigen::MatrixXd& sigma) const {
    const double scale = nu > 0.0 ? std::pow(1.0 + r, nu) : 1.0;
    sigma = prefactor.array() * (-scale * scaled_dist.array()).exp();
  }
};

}  // namespace maxid
