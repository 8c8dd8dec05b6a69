#pragma once

#include <span>
#include <vector>

#include "stpot/panel.hpp"
#include "stpot/tail.hpp"

namespace stpot {

/** Biweight kernel (15/16)(1-x^2)^2 on [-1,1], zero outside. */
double biweight_kernel(double x);

/** Integral of the biweight kernel over (-inf, x]; 0 below -1, 1 above 1. */
double biweight_mass(double x);

struct ExceedanceRecord {
  int day;        // 0-based day index
  int station;    // 0-based station index
  double time;    // (day+1)/n_days, in (0,1]
  double value;
};

/**
 * All observations strictly above the unified space-time threshold at level k,
 * ordered by day then station.
 */
struct ExceedanceProcess {
  int n_days = 0;
  int n_stations = 0;
  int k = 0;
  double threshold = 0.0;
  std::vector<ExceedanceRecord> records;
  std::vector<int> station_counts;  // exceedances per station; sums to <= k
};

ExceedanceProcess extract_exceedances(const ObservationPanel& panel, int k);

/**
 * Kernel estimate of the trend surface on a time grid.  Raw values integrate
 * (summed over stations) to one; `normalized` multiplies by the station count
 * so a trend-free panel sits at level one.
 */
class ScedasisEstimate {
 public:
  ScedasisEstimate(std::vector<double> times, std::vector<double> values,
                   int n_stations, double bandwidth, int k, bool low_resolution);

  int n_stations() const { return n_stations_; }
  double bandwidth() const { return bandwidth_; }
  int k() const { return k_; }
  const std::vector<double>& times() const { return times_; }

  /** True when k*h is too small for the kernel window to be trustworthy. */
  bool low_resolution() const { return low_resolution_; }

  /** Raw estimate at grid index g for a station. */
  double at(int grid_index, int station) const;

  /** Linear interpolation between grid points; clamped at the ends. */
  double value(double t, int station) const;

  double normalized(double t, int station) const {
    return n_stations_ * value(t, station);
  }

 private:
  std::vector<double> times_;
  std::vector<double> values_;  // row-major: grid point x station
  int n_stations_;
  double bandwidth_;
  int k_;
  bool low_resolution_;
};

/**
 * Boundary-corrected kernel estimate of the trend surface evaluated at
 * `eval_times` (each in [0,1]).  With no grid supplied, a uniform 201-point
 * grid on [0,1] is used.
 */
ScedasisEstimate estimate_c(const ExceedanceProcess& process, double bandwidth,
                            std::span<const double> eval_times = {},
                            int threads = 1);

/** Right-continuous step function with equal jumps at the given times. */
class StepFunction {
 public:
  StepFunction(std::vector<double> jump_times, double step);

  double value(double t) const;       // step * #{jumps <= t}
  double total() const;               // value at t = 1
  const std::vector<double>& jump_times() const { return jump_times_; }
  double step() const { return step_; }

 private:
  std::vector<double> jump_times_;  // sorted ascending
  double step_;
};

/** Integrated-trend estimate for one station: jumps 1/k at its exceedances. */
StepFunction estimate_C(const ExceedanceProcess& process, int station);

}  // namespace stpot
