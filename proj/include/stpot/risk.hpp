#pragma once

#include "stpot/homogenize.hpp"
#include "stpot/tail.hpp"

namespace stpot {

/**
 * Exceedance probability P(X > x) for a single stationary series of length n
 * fitted at level k: (k/n) (1 + gamma (x - threshold)/scale)^(-1/gamma),
 * with the exponential limit at gamma = 0.  Clamped to [0, 1].
 */
double iid_failure_prob(const TailFit& fit, long long n, double x);

/**
 * Exceedance probability P(X_t(s_j) > x) for one cell of a trended panel:
 * the local trend level times the stationary tail beyond the k-th largest
 * homogenized value.  `c_value` is the trend estimate at (t, s_j).
 */
double marginal_failure_prob(const HomogenizedSample& sample, double c_value,
                             double x);

struct JointRisk {
  double p = 0.0;      // P(both stations exceed their levels on one day)
  double l_value = 0.0;
  bool clamped = false;  // raw combination left [0, min(p_i, p_j)]
};

/**
 * Joint exceedance probability for two stations with marginal probabilities
 * p_i, p_j and fitted pairwise variogram value v:
 * p_i + p_j - L(1/p_i, 1/p_j), evaluated in complement form so the limits
 * are exact: v = 0 gives min(p_i, p_j), v = inf gives the independent-
 * extremes limit 0.  The result is a tail first-order approximation.
 */
JointRisk joint_failure_prob(double p_i, double p_j, double v);

}  // namespace stpot
