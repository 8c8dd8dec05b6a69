#pragma once

#include <vector>

#include "stpot/panel.hpp"
#include "stpot/scedasis.hpp"
#include "stpot/tail.hpp"

namespace stpot {

/**
 * Maps one observation to the common stationary scale.  `c` is the local
 * trend level, `gamma`/`scale`/`location` the fitted tail; c = 1 is the
 * identity.  The gamma = 0 limit subtracts scale * log(c).
 */
double homogenize_value(double x, double c, double gamma, double scale,
                        double location);

/** A panel mapped cell by cell onto the common stationary scale. */
struct HomogenizedSample {
  TailFit tail;                       // unified-threshold fit behind the map
  double bandwidth = 0.0;
  int n_days = 0;
  int n_stations = 0;
  std::vector<double> times;          // (i+1)/n per day
  std::vector<double> z;              // row-major day x station, NaN = missing
  std::vector<double> c;              // trend level used per cell, same layout
  std::vector<int> exceedance_counts; // per station, over the unified threshold
  double z_k = 0.0;                   // k-th largest homogenized value, pooled

  double value(int day, int station) const {
    return z[static_cast<std::size_t>(day) * n_stations + station];
  }
  double trend(int day, int station) const {
    return c[static_cast<std::size_t>(day) * n_stations + station];
  }
};

/**
 * Fits the unified tail at level k, estimates the trend surface with
 * bandwidth h, and maps every non-missing observation to the stationary
 * scale.  Throws DataError when the trend estimate vanishes at a cell that
 * must be mapped.
 */
HomogenizedSample homogenize_panel(const ObservationPanel& panel, int k,
                                   double bandwidth, int threads = 1);

/** Same, but reusing an existing fit + trend estimate. */
HomogenizedSample homogenize_panel(const ObservationPanel& panel,
                                   const TailFit& tail,
                                   const ExceedanceProcess& process,
                                   const ScedasisEstimate& trend);

}  // namespace stpot
