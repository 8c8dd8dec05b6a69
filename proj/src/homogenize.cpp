#include "stpot/homogenize.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>

#include "stpot/error.hpp"

namespace stpot {

double homogenize_value(double x, double c, double gamma, double scale,
                        double location) {
  if (!(c > 0.0)) {
    throw NumericalError("homogenize_value: trend level must be positive");
  }
  if (std::fabs(gamma) < 1e-8) {
    return x - scale * std::log(c);
  }
  double cg = std::pow(c, -gamma);
  return cg * x - scale * ((1.0 - cg) / gamma) * (1.0 - gamma * location / scale);
}

HomogenizedSample homogenize_panel(const ObservationPanel& panel,
                                   const TailFit& tail,
                                   const ExceedanceProcess& process,
                                   const ScedasisEstimate& trend) {
  const int n = panel.n_days();
  const int m = panel.n_stations();
  HomogenizedSample out;
  out.tail = tail;
  out.bandwidth = trend.bandwidth();
  out.n_days = n;
  out.n_stations = m;
  out.exceedance_counts = process.station_counts;
  out.times.resize(n);
  for (int i = 0; i < n; ++i) out.times[i] = static_cast<double>(i + 1) / n;

  const double nan = std::numeric_limits<double>::quiet_NaN();
  out.z.assign(static_cast<std::size_t>(n) * m, nan);
  out.c.assign(static_cast<std::size_t>(n) * m, nan);

  for (int i = 0; i < n; ++i) {
    double t = out.times[i];
    for (int j = 0; j < m; ++j) {
      double x = panel.value(i, j);
      if (std::isnan(x)) continue;
      double c = trend.value(t, j);
      if (!(c > 0.0)) {
        throw DataError("trend estimate vanishes at day " + std::to_string(i) +
                        ", station " + std::to_string(j) +
                        "; increase the bandwidth or the level k");
      }
      std::size_t idx = static_cast<std::size_t>(i) * m + j;
      out.c[idx] = c;
      out.z[idx] = homogenize_value(x, c, tail.gamma_hat, tail.scale_hat,
                                    tail.location_hat);
    }
  }

  // k-th largest of the pooled homogenized values.
  std::vector<double> pool;
  pool.reserve(out.z.size());
  for (double v : out.z) {
    if (!std::isnan(v)) pool.push_back(v);
  }
  if (static_cast<int>(pool.size()) < tail.k) {
    throw DataError("homogenize: fewer values than the level k");
  }
  std::nth_element(pool.begin(), pool.begin() + (tail.k - 1), pool.end(),
                   std::greater<double>());
  out.z_k = pool[tail.k - 1];
  return out;
}

HomogenizedSample homogenize_panel(const ObservationPanel& panel, int k,
                                   double bandwidth, int threads) {
  TailFit tail = fit_tail(panel, k);
  ExceedanceProcess process = extract_exceedances(panel, k);
  // Evaluate the trend exactly at the day times so no interpolation enters.
  std::vector<double> day_times(panel.n_days());
  for (int i = 0; i < panel.n_days(); ++i) {
    day_times[i] = static_cast<double>(i + 1) / panel.n_days();
  }
  ScedasisEstimate trend = estimate_c(process, bandwidth, day_times, threads);
  return homogenize_panel(panel, tail, process, trend);
}

}  // namespace stpot
