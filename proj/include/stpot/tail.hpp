#ifndef STPOT_TAIL_HPP
#define STPOT_TAIL_HPP

#include <span>
#include <vector>

#include "stpot/panel.hpp"

namespace stpot {

struct LogMoments {
  double m1 = 0.0;
  double m2 = 0.0;
  long long exceedances = 0;  // strictly above the threshold
};

struct TailFit {
  int k = 0;
  double threshold = 0.0;     // unified space-time threshold
  double m1 = 0.0;
  double m2 = 0.0;
  double gamma_hat = 0.0;
  double scale_hat = 0.0;     // dispersion of excesses at the threshold level
  double location_hat = 0.0;  // equals the threshold
  long long exceedance_count = 0;
  long long n_values = 0;     // pooled non-missing sample size
};

/** (k+1)-th largest of the pooled non-missing values, so that exactly k
 *  values exceed it when values are distinct.  Requires 1 <= k < sample
 *  size and a positive result (log moments need a positive threshold). */
double global_threshold(std::span<const double> values, int k);
double global_threshold(const ObservationPanel& panel, int k);

/** Empirical moments of log excesses above the threshold with divisor k:
 *  m_l = (1/k) sum (log x - log threshold)^l over values strictly above. */
LogMoments log_moments(std::span<const double> values, double threshold, int k);
LogMoments log_moments(const ObservationPanel& panel, double threshold, int k);

/** Moment estimator of the extreme value index:
 *  m1 + 1 - (1/2) / (1 - m1^2 / m2).  Throws NumericalError when the
 *  moment ratio degenerates (m2 <= 0 or m1^2 / m2 ~ 1). */
double fit_gamma(double m1, double m2);

/** Companion scale estimator: threshold * (m1 / 2) / (1 - m1^2 / m2). */
double fit_scale(double threshold, double m1, double m2);

TailFit fit_tail(std::span<const double> values, int k);
TailFit fit_tail(const ObservationPanel& panel, int k);

struct TailTracePoint {
  int k;
  double threshold;
  double gamma_hat;
  double scale_hat;
  long long exceedance_count;
};

/** Estimator path over a grid of k values (stability plot data). */
std::vector<TailTracePoint> tail_trace(const ObservationPanel& panel,
                                       std::span<const int> k_grid);

/** Pooled non-missing values of a panel. */
std::vector<double> pooled_values(const ObservationPanel& panel);

/** One station's non-missing values. */
std::vector<double> station_values(const ObservationPanel& panel, int station);

}  // namespace stpot

#endif
