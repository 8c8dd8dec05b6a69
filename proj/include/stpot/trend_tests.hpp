#pragma once

#include <string>
#include <vector>

#include "stpot/scedasis.hpp"

namespace stpot {

/**
 * Null calibration for the homogeneity tests.  `max_sd` standardizes by the
 * largest standard deviation the statistic can attain under the null, which
 * is conservative but needs no independence assumption across stations.
 * `independence` uses the exact null variance when exceedance indicators are
 * independent across space.
 */
enum class NullMode { max_sd, independence };

NullMode null_mode_from_string(const std::string& s);
std::string to_string(NullMode mode);

struct StationTestResult {
  int station = 0;
  double c_total = 0.0;     // integrated-trend estimate at t = 1
  double statistic = 0.0;   // scaled sup/endpoint deviation
  double z = 0.0;           // standardized statistic (space test only)
  double sigma_star = 0.0;  // bounding sd of the limit process (time test only)
  double p_value = 1.0;
  bool reject = false;      // at level alpha / n_stations
};

struct TrendTestReport {
  NullMode mode = NullMode::max_sd;
  double alpha = 0.05;
  int k = 0;
  int n_stations = 0;
  std::vector<StationTestResult> space;
  std::vector<StationTestResult> time;
  bool any_space_reject = false;
  bool any_time_reject = false;
};

/**
 * Tests equality of the stations' total exceedance shares: under space
 * homogeneity each station collects 1/m of the exceedances.  The statistic is
 * sqrt(k) |C_j(1) - 1/m|; p-values are two-sided normal.
 */
std::vector<StationTestResult> test_space_homogeneity(
    const ExceedanceProcess& process, NullMode mode, double alpha);

/**
 * Tests constancy of each station's trend over time via the sup deviation of
 * its integrated exceedance share from linearity,
 * sqrt(k) sup_t |C_j(t) - t C_j(1)|.  The limit is a time-changed Brownian
 * bridge; p-values use the Kolmogorov sup distribution.
 */
std::vector<StationTestResult> test_time_homogeneity(
    const ExceedanceProcess& process, NullMode mode, double alpha);

/** Runs both tests with a Bonferroni split of alpha across stations. */
TrendTestReport run_trend_tests(const ExceedanceProcess& process, NullMode mode,
                                double alpha = 0.05);

}  // namespace stpot
