#pragma once

#include <Eigen/Dense>
#include <chrono>
#include <cmath>
#include <exception>
#include <mutex>
#include <optional>
#include <thread>
#include <vector>

#include "maxid/ars.hpp"
#include "maxid/errors.hpp"
#include "maxid/marginal.hpp"
#include "maxid/metropolis.hpp"
#include "maxid/model.hpp"
#include "maxid/mvn.hpp"

namespace maxid {

// One simulated Poisson profile, pinned to level z at its anchor site.
struct ExtremalFunctionRecord {
  double magnitude = 0.0;
  Eigen::VectorXd values;
  int anchor_index = 0;
  double anchor_level = 0.0;
};

struct ReplicateResult {
  Eigen::VectorXd z;
  long profiles_simulated = 0;
  long levels_proposed = 0;
  long ars_fallbacks = 0;
  double wall_seconds = 0.0;
  // Accepted profiles, filled only on request.
  std::vector<ExtremalFunctionRecord> profiles;
};

// Exact simulation of a max-id process at a fixed ordered site set.
//
// Each replicate walks the sites in order; at each site levels descend
// through the marginal quantile cascade, one conditional profile is drawn
// per level, and a profile joins the running maximum only if it sits
// strictly below the current values at all earlier sites.  The level loop
// stops as soon as the level drops below the running maximum at the site.
class Engine {
 public:
  Engine(ModelSpec spec, SiteSet sites, const MarginalLaw& law)
      : spec_(std::move(spec)),
        sites_(std::move(sites)),
        law_(&law),
        cache_(spec_.correlation, sites_) {
    spec_.validate();
    if (law.mixture() != spec_.mixture()) {
      throw ConfigError("marginal law and model mixture kind disagree");
    }
    if (!cache_.magnitude_dependent) {
      // Correlation free of the magnitude: one factorization serves every
      // profile draw.
      Eigen::MatrixXd sigma;
      cache_.fill(0.0, sigma);
      fixed_ = factorize_matrix(sigma);
    }
  }

  const SiteSet& sites() const { return sites_; }
  const ModelSpec& spec() const { return spec_; }
  const MarginalLaw& law() const { return *law_; }

  ReplicateResult simulate_replicate(RandomStream& rng,
                                     bool collect_profiles = false) const {
    const auto t0 = std::chrono::steady_clock::now();
    const int n_sites = sites_.size();
    Workspace ws(n_sites);
    ReplicateResult out;
    out.z.resize(n_sites);

    long fallbacks = 0;
    double e0 = rng.exponential();
    double z = law_->quantile_from_exponent(e0);
    ++out.levels_proposed;
    draw_profile(0, z, rng, ws, fallbacks);
    ++out.profiles_simulated;
    out.z = ws.vals;
    if (collect_profiles) out.profiles.push_back(record_from(ws, 0, z));

    for (int n = 1; n < n_sites; ++n) {
      e0 = rng.exponential();
      z = law_->quantile_from_exponent(e0);
      ++out.levels_proposed;
      long iters = 0;
      while (z > out.z[n]) {
        if (++iters > kIterationCap) {
          throw IterationCap("level loop exceeded cap at site " +
                             std::to_string(n));
        }
        draw_profile(n, z, rng, ws, fallbacks);
        ++out.profiles_simulated;
        bool below = true;
        for (int i = 0; i < n; ++i) {
          if (!(ws.vals[i] < out.z[i])) {
            below = false;
            break;
          }
        }
        if (below) {
          out.z = out.z.cwiseMax(ws.vals);
          if (collect_profiles) out.profiles.push_back(record_from(ws, n, z));
        }
        e0 += rng.exponential();
        z = law_->quantile_from_exponent(e0);
        ++out.levels_proposed;
      }
    }
    out.ars_fallbacks = fallbacks;
    out.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    return out;
  }

  // Draw from the magnitude distribution conditional on the profile passing
  // through level z at its anchor site.
  double conditional_magnitude(double z, RandomStream& rng,
                               long* fallbacks = nullptr) const {
    long local = 0;
    const double r = draw_magnitude(z, rng, local);
    if (fallbacks) *fallbacks += local;
    return r;
  }

  ExtremalFunctionRecord conditional_profile(int anchor, double z,
                                             RandomStream& rng) const {
    Workspace ws(sites_.size());
    long fallbacks = 0;
    draw_profile(anchor, z, rng, ws, fallbacks);
    return record_from(ws, anchor, z);
  }

  // Truncated-maximum baseline: the n largest magnitudes in descending
  // order, each with an independent unconditional profile.
  ReplicateResult naive_simulate(int n, RandomStream& rng) const {
    if (n < 1) throw DomainError("naive_simulate: n must be >= 1");
    const auto t0 = std::chrono::steady_clock::now();
    const int n_sites = sites_.size();
    Workspace ws(n_sites);
    ReplicateResult out;
    out.z.setConstant(n_sites, -std::numeric_limits<double>::infinity());
    double gamma = 0.0;
    for (int i = 0; i < n; ++i) {
      gamma += rng.exponential();
      double r;
      if (spec_.mixture() == Mixture::scale) {
        r = spec_.scale_measure().inverse_tail_mass(gamma);
      } else {
        r = spec_.location_measure().inverse_tail_mass(gamma);
      }
      unconditional_field(r, rng, ws);
      if (spec_.mixture() == Mixture::scale) {
        ws.vals = r * ws.w;
      } else {
        ws.vals = ws.w.array() + r;
      }
      out.z = out.z.cwiseMax(ws.vals);
      ++out.profiles_simulated;
      ++out.levels_proposed;
    }
    out.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    return out;
  }

 private:
  static constexpr long kIterationCap = 1000000;

  struct Workspace {
    Eigen::MatrixXd sigma, work;
    Eigen::LLT<Eigen::MatrixXd> llt;
    Eigen::VectorXd g, w, vals;
    double magnitude = 0.0;
    explicit Workspace(int n)
        : sigma(n, n), work(n, n), llt(n), g(n), w(n), vals(n) {}
  };

  ExtremalFunctionRecord record_from(const Workspace& ws, int anchor,
                                     double z) const {
    ExtremalFunctionRecord rec;
    rec.magnitude = ws.magnitude;
    rec.values = ws.vals;
    rec.anchor_index = anchor;
    rec.anchor_level = z;
    return rec;
  }

  void factorize_ws(Workspace& ws) const {
    static constexpr double kJitters[] = {0.0, 1e-14, 1e-12, 1e-10};
    for (double j : kJitters) {
      ws.work = ws.sigma;
      if (j > 0.0) ws.work.diagonal().array() += j;
      ws.llt.compute(ws.work);
      if (ws.llt.info() == Eigen::Success) return;
    }
    throw NotPositiveDefinite(
        "profile correlation matrix not positive definite at jitter 1e-10");
  }

  // W | W(anchor) = w0 at magnitude r, via kriging residuals on top of an
  // unconditional draw.
  void conditional_field(int anchor, double w0, double r, RandomStream& rng,
                         Workspace& ws) const {
    const int n = sites_.size();
    for (int i = 0; i < n; ++i) ws.g[i] = rng.normal();
    if (fixed_) {
      ws.w.noalias() =
          fixed_->L.triangularView<Eigen::Lower>() * ws.g;
      ws.w += fixed_->sigma.col(anchor) * (w0 - ws.w[anchor]);
    } else {
      cache_.fill(r, ws.sigma);
      factorize_ws(ws);
      ws.w.noalias() = ws.llt.matrixL() * ws.g;
      ws.w += ws.sigma.col(anchor) * (w0 - ws.w[anchor]);
    }
    ws.w[anchor] = w0;
  }

  void unconditional_field(double r, RandomStream& rng, Workspace& ws) const {
    const int n = sites_.size();
    for (int i = 0; i < n; ++i) ws.g[i] = rng.normal();
    if (fixed_) {
      ws.w.noalias() = fixed_->L.triangularView<Eigen::Lower>() * ws.g;
    } else {
      cache_.fill(r, ws.sigma);
      factorize_ws(ws);
      ws.w.noalias() = ws.llt.matrixL() * ws.g;
    }
  }

  void draw_profile(int anchor, double z, RandomStream& rng, Workspace& ws,
                    long& fallbacks) const {
    const double r = draw_magnitude(z, rng, fallbacks);
    ws.magnitude = r;
    if (spec_.mixture() == Mixture::scale) {
      conditional_field(anchor, z / r, r, rng, ws);
      ws.vals = r * ws.w;
    } else {
      conditional_field(anchor, z - r, r, rng, ws);
      ws.vals = ws.w.array() + r;
    }
    ws.vals[anchor] = z;  // anchor invariant, exact by construction
  }

  double draw_magnitude(double z, RandomStream& rng, long& fallbacks) const {
    if (spec_.mixture() == Mixture::scale) {
      if (spec_.sampler == SamplerKind::ars) {
        try {
          return ars_magnitude(z, rng);
        } catch (const ConcavityViolation&) {
          ++fallbacks;
        } catch (const NonIntegrableEnvelope&) {
          ++fallbacks;
        }
      }
      return mh_scale_magnitude(z, rng);
    }
    return mh_location_magnitude(z, rng);
  }

  // Scale-mixture conditional magnitude on t = log r.  The log target is
  //   h(t) = log f_R(e^t) + log phi(z e^{-t}),
  // the density of T = log R given R W(s0) = z: the 1/r of the joint
  // intensity cancels against the log-scale Jacobian.
  double ars_magnitude(double z, RandomStream& rng) const {
    const auto& m = spec_.scale_measure();
    LogConcaveTarget target;
    target.h = [&m, z](double t) {
      const double x = z * std::exp(-t);
      return m.log_intensity_t(t) - t + norm_logpdf(x);
    };
    target.dh = [&m, z](double t) {
      const double e2 = std::exp(-2.0 * t);
      return m.dlog_intensity_t(t) - 1.0 + z * z * e2;
    };
    const double mode = scale_target_mode(z);
    double curv = -(target.dh(mode + 1e-5) - target.dh(mode - 1e-5)) / 2e-5;
    double scale = curv > 1e-12 ? 1.0 / std::sqrt(curv) : 1.0;
    scale = std::clamp(scale, 1e-3, 10.0);
    static constexpr double kOffsets[] = {-3.0, -1.5, -0.5, 0.5, 1.5, 3.0};
    std::vector<double> anchors;
    anchors.reserve(6);
    for (double o : kOffsets) anchors.push_back(mode + o * scale);
    return std::exp(ars_sample(target, anchors, rng));
  }

  double mh_scale_magnitude(double z, RandomStream& rng) const {
    const auto& m = spec_.scale_measure();
    auto logdens = [&m, z](double r) {
      if (!(r > 0.0)) return -std::numeric_limits<double>::infinity();
      const double t = std::log(r);
      // Density of R itself: subtract the log-scale Jacobian; mh_sample
      // adds it back for its own log-scale chain.
      return m.log_intensity_t(t) - t + norm_logpdf(z * std::exp(-t)) - t;
    };
    MhConfig config = spec_.mh;
    config.init = std::exp(scale_target_mode(z));
    return mh_sample(logdens, ChainSupport::positive, config, rng);
  }

  double mh_location_magnitude(double z, RandomStream& rng) const {
    const auto& m = spec_.location_measure();
    auto logdens = [&m, z](double r) {
      return m.log_intensity(r) + norm_logpdf(z - r);
    };
    MhConfig config = spec_.mh;
    config.init = location_mode_guess(logdens, z,
                                      m.beta1 < 1.0 || m.beta2 < 1.0);
    return mh_sample(logdens, ChainSupport::real_line, config, rng);
  }

  // Root of dh on the log scale; dh decreases from +inf (z > 0) to -inf.
  double scale_target_mode(double z) const {
    const auto& m = spec_.scale_measure();
    auto dh = [&m, z](double t) {
      return m.dlog_intensity_t(t) - 1.0 + z * z * std::exp(-2.0 * t);
    };
    double lo = std::log(std::max(z, 1e-8));
    double hi = lo;
    int guard = 0;
    while (dh(lo) <= 0.0 && ++guard < 400) lo -= 1.0;
    guard = 0;
    while (dh(hi) >= 0.0 && ++guard < 400) hi += 1.0;
    return bisect(dh, lo, hi, 1e-12);
  }

  // Coarse-grid argmax of the (possibly singular) location target; the grid
  // skips a small neighborhood of the r = 0 spike when the intensity
  // diverges there, so the chain never starts frozen inside it.
  template <class F>
  double location_mode_guess(const F& logdens, double z,
                             bool singular) const {
    double lo = std::min(0.0, z) - 10.0;
    double hi = std::max(0.0, z) + 10.0;
    constexpr int kGrid = 512;
    for (int round = 0; round < 24; ++round) {
      double best_x = 0.5 * (lo + hi);
      double best_v = -std::numeric_limits<double>::infinity();
      const double step = (hi - lo) / (kGrid - 1);
      for (int i = 0; i < kGrid; ++i) {
        const double x = lo + i * step;
        if (singular && std::abs(x) < 1e-3) continue;
        const double v = logdens(x);
        if (v > best_v) {
          best_v = v;
          best_x = x;
        }
      }
      const bool at_left = best_x <= lo + 1.5 * step;
      const bool at_right = best_x >= hi - 1.5 * step;
      if (!at_left && !at_right) return best_x;
      if (at_left) lo -= (hi - lo);
      if (at_right) hi += (hi - lo);
    }
    throw Error("location magnitude target has no interior bulk");
  }

  ModelSpec spec_;
  SiteSet sites_;
  const MarginalLaw* law_;
  PairwiseCache cache_;
  std::optional<FactorizedCovariance> fixed_;
};

// Replicate matrix plus per-replicate counters from a deterministic
// parallel fan-out: replicate i always consumes stream id i of `seed`,
// regardless of worker count.
struct BatchResult {
  Eigen::MatrixXd samples;  // replicates x sites
  std::vector<long> profile_counts;
  std::vector<long> level_counts;
  long ars_fallbacks = 0;
  double wall_seconds = 0.0;
};

// naive_n = 0 runs the exact engine; naive_n > 0 runs the truncated
// baseline with that many profiles.
inline BatchResult simulate_batch(const Engine& engine, long replicates,
                                  std::uint64_t seed, int workers,
                                  int naive_n = 0) {
  if (replicates < 1) throw DomainError("simulate_batch: replicates >= 1");
  const auto t0 = std::chrono::steady_clock::now();
  const int n_sites = engine.sites().size();
  BatchResult out;
  out.samples.resize(replicates, n_sites);
  out.profile_counts.assign(replicates, 0);
  out.level_counts.assign(replicates, 0);

  if (workers <= 0) {
    workers = static_cast<int>(std::thread::hardware_concurrency());
    if (workers <= 0) workers = 1;
  }
  workers = static_cast<int>(
      std::min<long>(workers, replicates));

  std::mutex err_mutex;
  std::exception_ptr first_error;
  std::vector<long> fallback_per_worker(workers, 0);

  auto run_range = [&](int worker_idx) {
    try {
      for (long i = worker_idx; i < replicates; i += workers) {
        RandomStream rng(seed, static_cast<std::uint64_t>(i));
        ReplicateResult rep = naive_n > 0
                                  ? engine.naive_simulate(naive_n, rng)
                                  : engine.simulate_replicate(rng);
        out.samples.row(i) = rep.z.transpose();
        out.profile_counts[i] = rep.profiles_simulated;
        out.level_counts[i] = rep.levels_proposed;
        fallback_per_worker[worker_idx] += rep.ars_fallbacks;
      }
    } catch (...) {
      std::lock_guard<std::mutex> lock(err_mutex);
      if (!first_error) first_error = std::current_exception();
    }
  };

  if (workers == 1) {
    run_range(0);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) pool.emplace_back(run_range, w);
    for (auto& t : pool) t.join();
  }
  if (first_error) std::rethrow_exception(first_error);

  for (long f : fallback_per_worker) out.ars_fallbacks += f;
  out.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  return out;
}

struct OrderingStats {
  Ordering ordering;
  double mean_profiles = 0.0;
  double var_profiles = 0.0;
};

// Mean/variance of profiles simulated per replicate under each ordering
// strategy, with matched replicate streams across orderings.
inline std::vector<OrderingStats> count_profile_statistics(
    const ModelSpec& spec, const std::vector<Site>& raw_sites,
    const MarginalLaw& law, long replicates, std::uint64_t seed,
    int workers = 1) {
  std::vector<OrderingStats> out;
  for (Ordering ord :
       {Ordering::coordinate_wise, Ordering::random, Ordering::middle_out,
        Ordering::maximum_minimum}) {
    ModelSpec s = spec;
    s.ordering = ord;
    Engine engine(s, SiteSet(raw_sites, ord, seed), law);
    BatchResult batch = simulate_batch(engine, replicates, seed, workers);
    double mean = 0.0;
    for (long c : batch.profile_counts) mean += static_cast<double>(c);
    mean /= static_cast<double>(replicates);
    double var = 0.0;
    for (long c : batch.profile_counts) {
      const double d = static_cast<double>(c) - mean;
      var += d * d;
    }
    var /= std::max<long>(1, replicates - 1);
    out.push_back({ord, mean, var});
  }
  return out;
}

}  // namespace maxid
