#include "stpot/tail.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "stpot/error.hpp"

namespace stpot {

namespace {

// The moment ratio m1^2/m2 approaches 1 when all excesses coincide; the
// estimators blow up there, so treat it as degenerate input.
constexpr double kDegenerateRatio = 1.0 - 1e-12;

}  // namespace

double global_threshold(std::span<const double> values, int k) {
  std::vector<double> pool;
  pool.reserve(values.size());
  for (double v : values) {
    if (!std::isnan(v)) pool.push_back(v);
  }
  if (k < 1 || static_cast<std::size_t>(k) >= pool.size()) {
    throw std::invalid_argument("global_threshold: need 1 <= k < pooled sample size (k=" +
                                std::to_string(k) + ", size=" +
                                std::to_string(pool.size()) + ")");
  }
  std::nth_element(pool.begin(), pool.begin() + k, pool.end(), std::greater<double>());
  double threshold = pool[k];
  if (!(threshold > 0.0)) {
    throw NumericalError("global_threshold: threshold is not positive; "
                         "log moments require positive levels");
  }
  return threshold;
}

double global_threshold(const ObservationPanel& panel, int k) {
  return global_threshold(std::span<const double>(panel.values()), k);
}

LogMoments log_moments(std::span<const double> values, double threshold, int k) {
  if (k < 1) throw std::invalid_argument("log_moments: k must be >= 1");
  if (!(threshold > 0.0)) {
    throw std::invalid_argument("log_moments: threshold must be positive");
  }
  const double log_thr = std::log(threshold);
  LogMoments mom;
  double s1 = 0.0, s2 = 0.0;
  for (double v : values) {
    if (std::isnan(v) || !(v > threshold)) continue;
    double d = std::log(v) - log_thr;
    s1 += d;
    s2 += d * d;
    ++mom.exceedances;
  }
  mom.m1 = s1 / static_cast<double>(k);
  mom.m2 = s2 / static_cast<double>(k);
  return mom;
}

LogMoments log_moments(const ObservationPanel& panel, double threshold, int k) {
  return log_moments(std::span<const double>(panel.values()), threshold, k);
}

double fit_gamma(double m1, double m2) {
  if (!(m2 > 0.0)) {
    throw NumericalError("fit_gamma: second log moment is not positive");
  }
  double ratio = m1 * m1 / m2;
  if (ratio >= kDegenerateRatio) {
    throw NumericalError("fit_gamma: degenerate excesses (m1^2/m2 ~ 1)");
  }
  return m1 + 1.0 - 0.5 / (1.0 - ratio);
}

double fit_scale(double threshold, double m1, double m2) {
  if (!(m2 > 0.0)) {
    throw NumericalError("fit_scale: second log moment is not positive");
  }
  double ratio = m1 * m1 / m2;
  if (ratio >= kDegenerateRatio) {
    throw NumericalError("fit_scale: degenerate excesses (m1^2/m2 ~ 1)");
  }
  return threshold * (m1 / 2.0) / (1.0 - ratio);
}

TailFit fit_tail(std::span<const double> values, int k) {
  TailFit fit;
  fit.k = k;
  fit.threshold = global_threshold(values, k);
  LogMoments mom = log_moments(values, fit.threshold, k);
  fit.m1 = mom.m1;
  fit.m2 = mom.m2;
  fit.exceedance_count = mom.exceedances;
  fit.gamma_hat = fit_gamma(mom.m1, mom.m2);
  fit.scale_hat = fit_scale(fit.threshold, mom.m1, mom.m2);
  fit.location_hat = fit.threshold;
  for (double v : values) {
    if (!std::isnan(v)) ++fit.n_values;
  }
  return fit;
}

TailFit fit_tail(const ObservationPanel& panel, int k) {
  return fit_tail(std::span<const double>(panel.values()), k);
}

std::vector<TailTracePoint> tail_trace(const ObservationPanel& panel,
                                       std::span<const int> k_grid) {
  std::vector<double> pool = pooled_values(panel);
  std::sort(pool.begin(), pool.end(), std::greater<double>());

  std::vector<TailTracePoint> trace;
  trace.reserve(k_grid.size());
  for (int k : k_grid) {
    if (k < 1 || static_cast<std::size_t>(k) >= pool.size()) {
      throw std::invalid_argument("tail_trace: k=" + std::to_string(k) +
                                  " outside [1, sample size)");
    }
    double threshold = pool[k];
    if (!(threshold > 0.0)) {
      throw NumericalError("tail_trace: non-positive threshold at k=" +
                           std::to_string(k));
    }
    const double log_thr = std::log(threshold);
    double s1 = 0.0, s2 = 0.0;
    long long count = 0;
    for (std::size_t i = 0; i < static_cast<std::size_t>(k); ++i) {
      if (!(pool[i] > threshold)) break;  // ties with the threshold stop early
      double d = std::log(pool[i]) - log_thr;
      s1 += d;
      s2 += d * d;
      ++count;
    }
    double m1 = s1 / k, m2 = s2 / k;
    TailTracePoint pt;
    pt.k = k;
    pt.threshold = threshold;
    pt.gamma_hat = fit_gamma(m1, m2);
    pt.scale_hat = fit_scale(threshold, m1, m2);
    pt.exceedance_count = count;
    trace.push_back(pt);
  }
  return trace;
}

std::vector<double> pooled_values(const ObservationPanel& panel) {
  std::vector<double> pool;
  pool.reserve(panel.values().size());
  for (double v : panel.values()) {
    if (!std::isnan(v)) pool.push_back(v);
  }
  return pool;
}

std::vector<double> station_values(const ObservationPanel& panel, int station) {
  std::vector<double> out;
  out.reserve(panel.n_days());
  for (int i = 0; i < panel.n_days(); ++i) {
    double v = panel.value(i, station);
    if (!std::isnan(v)) out.push_back(v);
  }
  return out;
}

}  // namespace stpot
