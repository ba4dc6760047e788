#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "maxid/engine.hpp"
#include "maxid/errors.hpp"
#include "maxid/marginal.hpp"
#include "maxid/model.hpp"
#include "maxid/normal.hpp"
#include "maxid/quadrature.hpp"

namespace maxid {

// Level-dependent pairwise extremal coefficient
//   theta_2(z0) = Lambda_K2{ R^2 \ (-inf, z0]^2 } / Lambda_s0(z0),
// with the numerator integrated over the magnitude measure using the
// bivariate normal upper orthant.  theta in [1,2]: 1 is complete
// dependence, 2 independence at that level.
inline double theoretical_theta2(const ModelSpec& spec, const MarginalLaw& law,
                                 const Site& s1, const Site& s2, double z0,
                                 double rel_tol = 1e-8) {
  QuadratureOptions opt;
  opt.rel_tol = rel_tol;
  const double denom = law.exponent_at(z0);

  // P(X > a or Y > a) = 2 P(X > a) - P(X > a, Y > a); both terms small at
  // high levels, so no cancellation.
  auto log_exceed = [&](double a, double rho) {
    const double v = 2.0 * norm_sf(a) - bvn_upper(a, a, rho);
    return v > 0.0 ? std::log(v) : -std::numeric_limits<double>::infinity();
  };

  double numer;
  if (spec.mixture() == Mixture::scale) {
    const auto& m = spec.scale_measure();
    auto lg = [&](double t) {
      const double a = z0 * std::exp(-t);
      if (std::isinf(a)) return -std::numeric_limits<double>::infinity();
      const double rho = spec.correlation(s1, s2, std::exp(t));
      return m.log_intensity_t(t) + log_exceed(a, rho);
    };
    auto f = [&](double t) { return std::exp(lg(t)); };
    double lo, hi;
    expand_mode_bracket(lg, std::log(std::max(z0, 1.0)), 0.5, lo, hi);
    const double mode = find_mode(lg, lo, hi, 1e-6).x;
    numer = integrate_real_line(f, mode - 1.0, mode + 1.0, opt);
  } else {
    const auto& m = spec.location_measure();
    auto lg = [&](double r) {
      const double rho = spec.correlation(s1, s2, r);
      return m.log_intensity(r) + log_exceed(z0 - r, rho);
    };
    auto f = [&](double r) { return std::exp(lg(r)); };
    double lo, hi;
    expand_mode_bracket(lg, std::abs(z0) > 0.5 ? z0 : 0.75, 0.5, lo, hi);
    const double mode = find_mode(lg, lo, hi, 1e-6).x;
    numer = integrate_real_line(f, std::min(mode - 1.0, -0.5),
                                std::max(mode + 1.0, 0.5), opt, {0.0});
  }
  return numer / denom;
}

// Pooled empirical p-quantile over every entry of the replicate matrix
// (margins are identical across sites, so pooling only reduces variance).
inline double pooled_quantile(const Eigen::MatrixXd& samples, double p) {
  std::vector<double> all(samples.data(), samples.data() + samples.size());
  const auto k = static_cast<std::ptrdiff_t>(
      std::min<double>(static_cast<double>(all.size() - 1),
                       p * static_cast<double>(all.size())));
  std::nth_element(all.begin(), all.begin() + k, all.end());
  return all[k];
}

// theta_hat at a fixed threshold: log of the joint non-exceedance fraction
// over the log of the first margin's fraction.
inline double empirical_theta2_at(const Eigen::MatrixXd& samples, int i,
                                  int j, double z0) {
  const long n = samples.rows();
  long both = 0, first = 0;
  for (long r = 0; r < n; ++r) {
    const bool bi = samples(r, i) <= z0;
    const bool bj = samples(r, j) <= z0;
    first += bi;
    both += bi && bj;
  }
  if (both == 0 || first == 0 || first == n || both == n) {
    throw DegenerateLevel("empirical theta2: exceedance fraction is 0 or 1");
  }
  const double fb = static_cast<double>(both) / static_cast<double>(n);
  const double f1 = static_cast<double>(first) / static_cast<double>(n);
  return std::log(fb) / std::log(f1);
}

inline double empirical_theta2(const Eigen::MatrixXd& samples, int i, int j,
                               double p) {
  const long n = samples.rows();
  if (n < 1000) throw DomainError("empirical theta2: need >= 1000 replicates");
  if (!(p > 0.0 && p < 1.0) ||
      static_cast<double>(n) * std::min(p, 1.0 - p) < 20.0) {
    throw DomainError("empirical theta2: level p carries too little mass");
  }
  return empirical_theta2_at(samples, i, j, pooled_quantile(samples, p));
}

// ---------------------------------------------------------------------------
// Marginal KL diagnostic

struct KlResult {
  double divergence = 0.0;      // (1/N) sum log[q(Z_i)/p(Z_i)], q = KDE
  double weighted_sum = 0.0;    // sum p(Z_i) log[q(Z_i)/p(Z_i)]
};

// Log marginal density tabulated on a uniform grid (the KL loop needs p at
// 1e5 points; fresh quadrature per point would dominate the runtime).
struct DensityGrid {
  double lo = 0.0, dz = 1.0;
  std::vector<double> logp;

  static DensityGrid build(const MarginalLaw& law, double lo, double hi,
                           int n = 4096) {
    const double ell = law.lower_endpoint();
    if (std::isfinite(ell)) lo = std::max(lo, ell + 1e-12);
    DensityGrid g;
    g.lo = lo;
    g.dz = (hi - lo) / (n - 1);
    g.logp.resize(n);
    for (int i = 0; i < n; ++i) {
      const double d = law.density(lo + i * g.dz);
      g.logp[i] = std::log(std::max(d, 1e-300));
    }
    return g;
  }

  double operator()(double z) const {
    const double x = (z - lo) / dz;
    const auto n = static_cast<int>(logp.size());
    if (x <= 0.0) return logp.front();
    if (x >= n - 1.0) return logp.back();
    const int k = static_cast<int>(x);
    const double w = x - k;
    return (1.0 - w) * logp[k] + w * logp[k + 1];
  }
};

namespace detail {

struct Kde {
  double lo = 0.0, dz = 1.0;
  std::vector<double> logq;

  double operator()(double z) const {
    const double x = (z - lo) / dz;
    const auto n = static_cast<int>(logq.size());
    if (x <= 0.0) return logq.front();
    if (x >= n - 1.0) return logq.back();
    const int k = static_cast<int>(x);
    const double w = x - k;
    return (1.0 - w) * logq[k] + w * logq[k + 1];
  }
};

// Gaussian KDE with Silverman's bandwidth, evaluated on a uniform grid via
// linear binning.
inline Kde kde_grid(const std::vector<double>& x, int n_grid = 4096) {
  const auto n = static_cast<long>(x.size());
  std::vector<double> sorted = x;
  std::sort(sorted.begin(), sorted.end());
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= static_cast<double>(n);
  double ss = 0.0;
  for (double v : x) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / static_cast<double>(n - 1));
  const double iqr = sorted[static_cast<long>(0.75 * (n - 1))] -
                     sorted[static_cast<long>(0.25 * (n - 1))];
  const double spread = std::min(sd, iqr / 1.34);
  const double bw = 0.9 * std::max(spread, 1e-12) *
                    std::pow(static_cast<double>(n), -0.2);

  Kde kde;
  kde.lo = sorted.front() - 5.0 * bw;
  const double hi = sorted.back() + 5.0 * bw;
  kde.dz = (hi - kde.lo) / (n_grid - 1);

  std::vector<double> bins(n_grid, 0.0);
  for (double v : x) {
    const double pos = (v - kde.lo) / kde.dz;
    const int k = std::clamp(static_cast<int>(pos), 0, n_grid - 2);
    const double w = pos - k;
    bins[k] += 1.0 - w;
    bins[k + 1] += w;
  }
  const int span = std::min(n_grid, static_cast<int>(8.0 * bw / kde.dz) + 1);
  std::vector<double> kernel(span + 1);
  for (int d = 0; d <= span; ++d) {
    kernel[d] = norm_pdf(d * kde.dz / bw) / (bw * static_cast<double>(n));
  }
  kde.logq.assign(n_grid, 0.0);
  std::vector<double> q(n_grid, 0.0);
  for (int i = 0; i < n_grid; ++i) {
    if (bins[i] == 0.0) continue;
    const double b = bins[i];
    const int dlo = std::max(0, i - span);
    const int dhi = std::min(n_grid - 1, i + span);
    for (int j = dlo; j <= dhi; ++j) q[j] += b * kernel[std::abs(j - i)];
  }
  for (int i = 0; i < n_grid; ++i) {
    kde.logq[i] = std::log(std::max(q[i], 1e-300));
  }
  return kde;
}

}  // namespace detail

inline KlResult kl_marginal_with_grid(const std::vector<double>& samples,
                                      const DensityGrid& pgrid,
                                      const detail::Kde& kde) {
  KlResult out;
  const auto n = static_cast<double>(samples.size());
  for (double z : samples) {
    const double lq = kde(z);
    const double lp = pgrid(z);
    const double ratio = lq - lp;
    out.divergence += ratio;
    out.weighted_sum += std::exp(lp) * ratio;
  }
  out.divergence /= n;
  return out;
}

// Kullback-Leibler diagnostic of simulated samples at one site against the
// numerical marginal law.  `divergence` is the Monte Carlo estimate of
// D(q||p) with q the kernel density of the samples; `weighted_sum` is the
// p-weighted variant some pipelines report instead.
inline KlResult kl_marginal(const std::vector<double>& samples,
                            const MarginalLaw& law) {
  if (samples.size() < 10000) {
    throw DomainError("kl_marginal: need >= 1e4 samples");
  }
  const auto kde = detail::kde_grid(samples);
  const auto [mn, mx] = std::minmax_element(samples.begin(), samples.end());
  const auto pgrid = DensityGrid::build(law, *mn - 1e-9, *mx + 1e-9);
  return kl_marginal_with_grid(samples, pgrid, kde);
}

// ---------------------------------------------------------------------------
// Cross-method comparison

struct MethodDiagnostics {
  std::string label;
  long replicates = 0;
  double wall_seconds = 0.0;
  double mean_profiles = 0.0;
  std::vector<double> kl_per_site;
  // theta rows: (pair_i, pair_j, level p, z0, theoretical, empirical)
  std::vector<std::array<double, 6>> theta_rows;
};

struct ComparisonReport {
  std::vector<MethodDiagnostics> methods;
};

// Runs exact-ARS, exact-MH and the naive baseline with matched replicate
// streams, then reports per-site KL and level-dependent extremal
// coefficients against the quadrature truth.  For location mixtures the ARS
// column is dropped (no log-concave target).
inline ComparisonReport comparison_report(
    const ModelSpec& base_spec, const SiteSet& sites, const MarginalLaw& law,
    long replicates, std::uint64_t seed, int workers, int naive_n = 100,
    const std::vector<double>& levels = {0.05, 0.25, 0.5, 0.75, 0.95},
    const std::vector<std::pair<int, int>>& pairs = {}) {
  ComparisonReport report;
  struct MethodDef {
    std::string label;
    SamplerKind sampler;
    int naive_n;
  };
  std::vector<MethodDef> defs;
  if (base_spec.mixture() == Mixture::scale) {
    defs.push_back({"exact-ars", SamplerKind::ars, 0});
  }
  defs.push_back({"exact-mh", SamplerKind::mh, 0});
  defs.push_back({"naive:" + std::to_string(naive_n),
                  base_spec.mixture() == Mixture::scale ? SamplerKind::ars
                                                        : SamplerKind::mh,
                  naive_n});

  for (const auto& def : defs) {
    ModelSpec spec = base_spec;
    spec.sampler = spec.mixture() == Mixture::location ? SamplerKind::mh
                                                       : def.sampler;
    Engine engine(spec, sites, law);
    BatchResult batch =
        simulate_batch(engine, replicates, seed, workers, def.naive_n);

    MethodDiagnostics diag;
    diag.label = def.label;
    diag.replicates = replicates;
    diag.wall_seconds = batch.wall_seconds;
    for (long c : batch.profile_counts) {
      diag.mean_profiles += static_cast<double>(c);
    }
    diag.mean_profiles /= static_cast<double>(replicates);

    // Shared density grid covering every sample of this batch.
    const double mn = batch.samples.minCoeff();
    const double mx = batch.samples.maxCoeff();
    const auto pgrid = DensityGrid::build(law, mn - 1e-9, mx + 1e-9);
    const int n_sites = sites.size();
    std::vector<double> col(replicates);
    for (int s = 0; s < n_sites; ++s) {
      for (long r = 0; r < replicates; ++r) col[r] = batch.samples(r, s);
      const auto kde = detail::kde_grid(col);
      diag.kl_per_site.push_back(
          kl_marginal_with_grid(col, pgrid, kde).divergence);
    }

    for (double p : levels) {
      const double z0 = pooled_quantile(batch.samples, p);
      for (const auto& pr : pairs) {
        const double th = theoretical_theta2(spec, law, sites[pr.first],
                                             sites[pr.second],
                                             law.quantile(p));
        const double em =
            empirical_theta2_at(batch.samples, pr.first, pr.second, z0);
        diag.theta_rows.push_back(
            {static_cast<double>(pr.first), static_cast<double>(pr.second), p,
             z0, th, em});
      }
    }
    report.methods.push_back(std::move(diag));
  }
  return report;
}

}  // namespace maxid
