#pragma once

#include <algorithm>
#include <chrono>
#include <limits>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "percospec/core/error.hpp"
#include "percospec/core/rng.hpp"

namespace percospec {

struct EstimatorResult {
  double estimate = 0.0;
  double stderr = 0.0;
  std::uint64_t n = 0;
  SeedSpec seed{};
  std::string meta;
  double wall_seconds = 0.0;

  [[nodiscard]] double relative_stderr() const {
    return estimate != 0.0 ? stderr / std::fabs(estimate) : std::numeric_limits<double>::infinity();
  }
};

inline double combined_stderr(const EstimatorResult& a, const EstimatorResult& b) {
  return std::sqrt(a.stderr * a.stderr + b.stderr * b.stderr);
}

/// Number of combined standard errors separating a and b.
inline double discrepancy_sigmas(const EstimatorResult& a, const EstimatorResult& b) {
  const double se = combined_stderr(a, b);
  const double d = std::fabs(a.estimate - b.estimate);
  if (se == 0.0) return d == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return d / se;
}

inline EstimatorResult bernoulli_estimate(std::uint64_t successes, std::uint64_t n) {
  if (n == 0) throw ParameterError("bernoulli_estimate: n must be >= 1");
  EstimatorResult r;
  r.n = n;
  r.estimate = static_cast<double>(successes) / static_cast<double>(n);
  r.stderr = std::sqrt(r.estimate * (1.0 - r.estimate) / static_cast<double>(n));
  return r;
}

/// Plain mean with the i.i.d. standard error.
inline EstimatorResult mean_estimate(std::span<const double> v) {
  if (v.empty()) throw ParameterError("mean_estimate: no samples");
  EstimatorResult r;
  r.n = v.size();
  double s = 0.0;
  for (double x : v) s += x;
  const double m = s / static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  r.estimate = m;
  r.stderr = v.size() > 1 ? std::sqrt(ss / static_cast<double>(v.size() - 1) / static_cast<double>(v.size())) : 0.0;
  return r;
}

/*
 * Batch-means standard error: the replicas are split into `batches` contiguous groups and the
 * spread of the group means gives the error of the overall mean.
 */
inline EstimatorResult batch_mean_estimate(std::span<const double> v, std::size_t batches = 32) {
  if (v.empty()) throw ParameterError("batch_mean_estimate: no samples");
  EstimatorResult r;
  r.n = v.size();
  double s = 0.0;
  for (double x : v) s += x;
  r.estimate = s / static_cast<double>(v.size());
  const std::size_t b = std::min(batches, v.size());
  if (b < 2) return r;
  std::vector<double> means(b, 0.0);
  std::vector<std::size_t> counts(b, 0);
  for (std::size_t i = 0; i < v.size(); ++i) {
    const std::size_t k = i * b / v.size();
    means[k] += v[i];
    ++counts[k];
  }
  double ss = 0.0;
  for (std::size_t k = 0; k < b; ++k) {
    means[k] /= static_cast<double>(counts[k]);
    ss += (means[k] - r.estimate) * (means[k] - r.estimate);
  }
  r.stderr = std::sqrt(ss / static_cast<double>(b - 1) / static_cast<double>(b));
  return r;
}

/// Ratio of two means estimated on the same replicas, with delta-method error on batch means.
inline EstimatorResult ratio_estimate(std::span<const double> num, std::span<const double> den, std::size_t batches = 32) {
  if (num.size() != den.size() || num.empty()) throw ParameterError("ratio_estimate: size mismatch");
  const std::size_t n = num.size();
  double sn = 0.0, sd = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sn += num[i];
    sd += den[i];
  }
  if (sd == 0.0) throw NormalizationError("ratio_estimate: zero denominator");
  const double ratio = sn / sd;
  const double md = sd / static_cast<double>(n);
  std::vector<double> lin(n);
  for (std::size_t i = 0; i < n; ++i) lin[i] = (num[i] - ratio * den[i]) / md;
  EstimatorResult r = batch_mean_estimate(lin, batches);
  r.estimate = ratio;
  return r;
}

/// Covariance of paired samples (1/n normalisation); error from batch means of the centred products.
inline EstimatorResult covariance_estimate(std::span<const double> a, std::span<const double> b, std::size_t batches = 32) {
  if (a.size() != b.size() || a.empty()) throw ParameterError("covariance_estimate: size mismatch");
  const std::size_t n = a.size();
  double ma = 0.0, mb = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= static_cast<double>(n);
  mb /= static_cast<double>(n);
  std::vector<double> prod(n);
  for (std::size_t i = 0; i < n; ++i) prod[i] = (a[i] - ma) * (b[i] - mb);
  return batch_mean_estimate(prod, batches);
}

/*
 * Weighted least-squares fit of log p = c - s log x, returning s. Weights come from the relative
 * errors of the estimates (delta method).
 */
inline EstimatorResult decay_exponent(std::span<const double> x, std::span<const EstimatorResult> p) {
  if (x.size() != p.size() || x.size() < 2) throw ParameterError("decay_exponent needs at least two points");
  double sw = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0)) throw ParameterError("decay_exponent: abscissae must be positive");
    if (!(p[i].estimate > 0.0)) throw NormalizationError("decay_exponent: zero estimate, more replicas needed");
    const double rel = p[i].stderr / p[i].estimate;
    const double w = rel > 0.0 ? 1.0 / (rel * rel) : 1e12;
    const double lx = std::log(x[i]), ly = std::log(p[i].estimate);
    sw += w;
    sx += w * lx;
    sy += w * ly;
    sxx += w * lx * lx;
    sxy += w * lx * ly;
  }
  const double det = sw * sxx - sx * sx;
  if (!(det > 0.0)) throw ParameterError("decay_exponent: abscissae must differ");
  EstimatorResult r;
  r.estimate = -(sw * sxy - sx * sy) / det;
  r.stderr = std::sqrt(sw / det);
  r.n = x.size();
  r.meta = "decay exponent";
  return r;
}

class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  [[nodiscard]] double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

}  // namespace percospec
