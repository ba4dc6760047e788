#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

namespace maxid::test {

// One-sample Kolmogorov-Smirnov statistic against a reference CDF.
inline double ks_statistic(std::vector<double> samples,
                           const std::function<double(double)>& cdf) {
  std::sort(samples.begin(), samples.end());
  const auto n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double f = cdf(samples[i]);
    d = std::max(d, std::abs(f - static_cast<double>(i) / n));
    d = std::max(d, std::abs(static_cast<double>(i + 1) / n - f));
  }
  return d;
}

inline double ks_two_sample(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  double d = 0.0;
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i] <= b[j]) {
      ++i;
    } else {
      ++j;
    }
    d = std::max(d, std::abs(static_cast<double>(i) / na -
                             static_cast<double>(j) / nb));
  }
  return d;
}

inline double mean(const std::vector<double>& x) {
  double s = 0.0;
  for (double v : x) s += v;
  return s / static_cast<double>(x.size());
}

inline double variance(const std::vector<double>& x) {
  const double m = mean(x);
  double s = 0.0;
  for (double v : x) s += (v - m) * (v - m);
  return s / static_cast<double>(x.size() - 1);
}

// Normalized CDF of an unnormalized log-density tabulated on [lo, hi] by
// trapezoidal accumulation on a fine grid; an independent oracle for
// sampler outputs.
class GridCdf {
 public:
  GridCdf(const std::function<double(double)>& logdens, double lo, double hi,
          int n = 16384)
      : lo_(lo), dx_((hi - lo) / (n - 1)) {
    std::vector<double> w(n);
    double peak = -1e300;
    for (int i = 0; i < n; ++i) {
      w[i] = logdens(lo_ + i * dx_);
      peak = std::max(peak, w[i]);
    }
    cum_.resize(n, 0.0);
    for (int i = 1; i < n; ++i) {
      const double trap =
          0.5 * (std::exp(w[i - 1] - peak) + std::exp(w[i] - peak));
      cum_[i] = cum_[i - 1] + trap;
    }
    for (double& c : cum_) c /= cum_.back();
  }

  double operator()(double x) const {
    const double pos = (x - lo_) / dx_;
    const auto n = static_cast<int>(cum_.size());
    if (pos <= 0.0) return 0.0;
    if (pos >= n - 1.0) return 1.0;
    const int k = static_cast<int>(pos);
    const double t = pos - k;
    return (1.0 - t) * cum_[k] + t * cum_[k + 1];
  }

 private:
  double lo_, dx_;
  std::vector<double> cum_;
};

}  // namespace maxid::test
