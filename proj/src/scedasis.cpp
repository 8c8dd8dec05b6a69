#include "stpot/scedasis.hpp"

#include <algorithm>
#include <cmath>

#include "stpot/error.hpp"
#include "stpot/numerics.hpp"

namespace stpot {

double biweight_kernel(double x) {
  if (x < -1.0 || x > 1.0) return 0.0;
  double u = 1.0 - x * x;
  return (15.0 / 16.0) * u * u;
}

double biweight_mass(double x) {
  if (x <= -1.0) return 0.0;
  if (x >= 1.0) return 1.0;
  return (15.0 / 16.0) * (x - 2.0 * x * x * x / 3.0 + std::pow(x, 5) / 5.0) + 0.5;
}

ExceedanceProcess extract_exceedances(const ObservationPanel& panel, int k) {
  ExceedanceProcess process;
  process.n_days = panel.n_days();
  process.n_stations = panel.n_stations();
  process.k = k;
  process.threshold = global_threshold(panel, k);
  process.station_counts.assign(panel.n_stations(), 0);

  for (int i = 0; i < panel.n_days(); ++i) {
    for (int j = 0; j < panel.n_stations(); ++j) {
      double x = panel.value(i, j);
      if (std::isnan(x) || x <= process.threshold) continue;
      double t = static_cast<double>(i + 1) / panel.n_days();
      process.records.push_back(ExceedanceRecord{i, j, t, x});
      ++process.station_counts[j];
    }
  }
  return process;
}

ScedasisEstimate::ScedasisEstimate(std::vector<double> times,
                                   std::vector<double> values, int n_stations,
                                   double bandwidth, int k, bool low_resolution)
    : times_(std::move(times)),
      values_(std::move(values)),
      n_stations_(n_stations),
      bandwidth_(bandwidth),
      k_(k),
      low_resolution_(low_resolution) {}

double ScedasisEstimate::at(int grid_index, int station) const {
  return values_[static_cast<std::size_t>(grid_index) * n_stations_ + station];
}

double ScedasisEstimate::value(double t, int station) const {
  if (times_.empty()) throw DataError("scedasis estimate has an empty grid");
  if (t <= times_.front()) return at(0, station);
  if (t >= times_.back()) return at(static_cast<int>(times_.size()) - 1, station);
  auto it = std::upper_bound(times_.begin(), times_.end(), t);
  int hi = static_cast<int>(it - times_.begin());
  int lo = hi - 1;
  double span = times_[hi] - times_[lo];
  double w = span > 0.0 ? (t - times_[lo]) / span : 0.0;
  return (1.0 - w) * at(lo, station) + w * at(hi, station);
}

ScedasisEstimate estimate_c(const ExceedanceProcess& process, double bandwidth,
                            std::span<const double> eval_times, int threads) {
  if (!(bandwidth > 0.0) || bandwidth > 1.0) {
    throw DataError("scedasis bandwidth must lie in (0, 1]");
  }
  if (process.k < 1) throw DataError("scedasis needs a positive exceedance level");

  std::vector<double> grid;
  if (eval_times.empty()) {
    grid.resize(201);
    for (std::size_t g = 0; g < grid.size(); ++g) grid[g] = g / 200.0;
  } else {
    grid.assign(eval_times.begin(), eval_times.end());
    for (double t : grid) {
      if (!(t >= 0.0 && t <= 1.0)) {
        throw DataError("scedasis evaluation times must lie in [0, 1]");
      }
    }
  }

  // Exceedance times per station, sorted, so each evaluation only touches the
  // kernel window.
  std::vector<std::vector<double>> station_times(process.n_stations);
  for (const auto& rec : process.records) {
    station_times[rec.station].push_back(rec.time);
  }
  for (auto& v : station_times) std::sort(v.begin(), v.end());

  const double h = bandwidth;
  const double inv_kh = 1.0 / (process.k * h);
  std::vector<double> values(grid.size() * process.n_stations, 0.0);

  parallel_for(process.n_stations, threads, [&](std::size_t j) {
    const auto& ts = station_times[j];
    for (std::size_t g = 0; g < grid.size(); ++g) {
      double t = grid[g];
      double boundary = biweight_mass(std::min(1.0, t / h)) -
                        biweight_mass(std::max(-1.0, (t - 1.0) / h));
      auto lo = std::lower_bound(ts.begin(), ts.end(), t - h);
      auto hi = std::upper_bound(ts.begin(), ts.end(), t + h);
      double sum = 0.0;
      for (auto it = lo; it != hi; ++it) {
        sum += biweight_kernel((t - *it) / h);
      }
      values[g * process.n_stations + j] = sum * inv_kh / boundary;
    }
  });

  bool low_resolution = process.k * h < 20.0;
  return ScedasisEstimate(std::move(grid), std::move(values),
                          process.n_stations, h, process.k, low_resolution);
}

StepFunction::StepFunction(std::vector<double> jump_times, double step)
    : jump_times_(std::move(jump_times)), step_(step) {
  std::sort(jump_times_.begin(), jump_times_.end());
}

double StepFunction::value(double t) const {
  auto it = std::upper_bound(jump_times_.begin(), jump_times_.end(), t);
  return step_ * static_cast<double>(it - jump_times_.begin());
}

double StepFunction::total() const {
  return step_ * static_cast<double>(jump_times_.size());
}

StepFunction estimate_C(const ExceedanceProcess& process, int station) {
  if (station < 0 || station >= process.n_stations) {
    throw std::invalid_argument("estimate_C: station index out of range");
  }
  std::vector<double> times;
  times.reserve(process.station_counts[station]);
  for (const auto& rec : process.records) {
    if (rec.station == station) times.push_back(rec.time);
  }
  return StepFunction(std::move(times), 1.0 / process.k);
}

}  // namespace stpot
