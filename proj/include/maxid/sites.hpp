#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <vector>

#include "maxid/errors.hpp"
#include "maxid/rng.hpp"

namespace maxid {

using Site = Eigen::VectorXd;

enum class Ordering { coordinate_wise, random, middle_out, maximum_minimum };

inline const char* ordering_name(Ordering o) {
  switch (o) {
    case Ordering::coordinate_wise: return "coordinate-wise";
    case Ordering::random: return "random";
    case Ordering::middle_out: return "middle-out";
    case Ordering::maximum_minimum: return "maximum-minimum";
  }
  return "?";
}

// Ordered list of distinct simulation locations.  The simulation algorithm
// iterates sites in the stored order, so ordering is fixed at construction.
class SiteSet {
 public:
  SiteSet() = default;

  // Applies the requested ordering to `sites`.  The random ordering uses a
  // dedicated stream of `seed` so that it never collides with replicate
  // streams.
  SiteSet(std::vector<Site> sites, Ordering ordering,
          std::uint64_t seed = 0ull)
      : sites_(std::move(sites)), ordering_(ordering) {
    if (sites_.empty()) throw ConfigError("site set must be non-empty");
    const auto dim = sites_[0].size();
    for (const auto& s : sites_) {
      if (s.size() != dim) throw ConfigError("sites of mixed dimension");
    }
    for (std::size_t i = 0; i < sites_.size(); ++i) {
      for (std::size_t j = i + 1; j < sites_.size(); ++j) {
        if ((sites_[i] - sites_[j]).norm() == 0.0) {
          throw ConfigError("sites must be pairwise distinct");
        }
      }
    }
    apply_ordering(seed);
  }

  int size() const { return static_cast<int>(sites_.size()); }
  int dim() const { return static_cast<int>(sites_[0].size()); }
  const Site& operator[](int i) const { return sites_[i]; }
  const std::vector<Site>& sites() const { return sites_; }
  Ordering ordering() const { return ordering_; }

  double distance(int i, int j) const {
    return (sites_[i] - sites_[j]).norm();
  }

 private:
  void apply_ordering(std::uint64_t seed) {
    const int n = size();
    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    switch (ordering_) {
      case Ordering::coordinate_wise:
        std::sort(perm.begin(), perm.end(), [&](int a, int b) {
          const Site& sa = sites_[a];
          const Site& sb = sites_[b];
          for (int d = 0; d < sa.size(); ++d) {
            if (sa[d] != sb[d]) return sa[d] < sb[d];
          }
          return false;
        });
        break;
      case Ordering::random: {
        RandomStream rng(seed, 0xFFFFFFFF00000001ull);
        for (int i = n - 1; i > 0; --i) {
          const int j = static_cast<int>(rng.below(i + 1));
          std::swap(perm[i], perm[j]);
        }
        break;
      }
      case Ordering::middle_out: {
        Site center = Site::Zero(dim());
        for (const auto& s : sites_) center += s;
        center /= static_cast<double>(n);
        std::sort(perm.begin(), perm.end(), [&](int a, int b) {
          return (sites_[a] - center).norm() < (sites_[b] - center).norm();
        });
        break;
      }
      case Ordering::maximum_minimum: {
        // Greedy maximin: start nearest the centroid, then repeatedly pick
        // the site farthest from everything chosen so far.
        Site center = Site::Zero(dim());
        for (const auto& s : sites_) center += s;
        center /= static_cast<double>(n);
        std::vector<int> chosen;
        std::vector<bool> used(n, false);
        int first = 0;
        for (int i = 1; i < n; ++i) {
          if ((sites_[i] - center).norm() < (sites_[first] - center).norm())
            first = i;
        }
        chosen.push_back(first);
        used[first] = true;
        std::vector<double> mindist(n,
                                    std::numeric_limits<double>::infinity());
        while (static_cast<int>(chosen.size()) < n) {
          int best = -1;
          double bestd = -1.0;
          for (int i = 0; i < n; ++i) {
            if (used[i]) continue;
            mindist[i] = std::min(mindist[i],
                                  (sites_[i] - sites_[chosen.back()]).norm());
            if (mindist[i] > bestd) {
              bestd = mindist[i];
              best = i;
            }
          }
          chosen.push_back(best);
          used[best] = true;
        }
        perm = chosen;
        break;
      }
    }
    std::vector<Site> reordered(n);
    for (int i = 0; i < n; ++i) reordered[i] = sites_[perm[i]];
    sites_ = std::move(reordered);
  }

  std::vector<Site> sites_;
  Ordering ordering_ = Ordering::coordinate_wise;
};

// n1 x n2 grid of interior points of the unit square: coordinates
// i/(n1+1), j/(n2+1).
inline std::vector<Site> unit_square_grid(int n1, int n2) {
  std::vector<Site> out;
  out.reserve(static_cast<std::size_t>(n1) * n2);
  for (int i = 1; i <= n1; ++i) {
    for (int j = 1; j <= n2; ++j) {
      Site s(2);
      s << static_cast<double>(i) / (n1 + 1),
           static_cast<double>(j) / (n2 + 1);
      out.push_back(s);
    }
  }
  return out;
}

inline std::vector<Site> random_unit_square(int n, RandomStream& rng) {
  std::vector<Site> out;
  out.reserve(n);
  for (int i = 0; i < n; ++i) {
    Site s(2);
    s << rng.uniform(), rng.uniform();
    out.push_back(s);
  }
  return out;
}

}  // namespace maxid
