#include "stpot/risk.hpp"

#include <algorithm>
#include <cmath>

#include "stpot/dependence.hpp"
#include "stpot/error.hpp"

namespace stpot {

namespace {

/** Survival of the fitted generalized Pareto beyond `anchor`, unit mass at
 *  the anchor itself. */
double gp_survival(double x, double anchor, double gamma, double scale) {
  if (!(scale > 0.0)) throw NumericalError("risk: non-positive fitted scale");
  if (x <= anchor) return 1.0;
  if (std::fabs(gamma) < 1e-8) {
    return std::exp(-(x - anchor) / scale);
  }
  double base = 1.0 + gamma * (x - anchor) / scale;
  if (base <= 0.0) return 0.0;  // beyond the finite endpoint (gamma < 0)
  return std::pow(base, -1.0 / gamma);
}

}  // namespace

double iid_failure_prob(const TailFit& fit, long long n, double x) {
  if (n < 1) throw std::invalid_argument("iid_failure_prob: n must be positive");
  double p = (static_cast<double>(fit.k) / n) *
             gp_survival(x, fit.threshold, fit.gamma_hat, fit.scale_hat);
  return std::clamp(p, 0.0, 1.0);
}

double marginal_failure_prob(const HomogenizedSample& sample, double c_value,
                             double x) {
  if (c_value < 0.0) {
    throw std::invalid_argument("marginal_failure_prob: trend level must be >= 0");
  }
  if (c_value == 0.0) return 0.0;  // degenerate trend; caller should warn
  double n_total = static_cast<double>(sample.n_days) * sample.n_stations;
  double p = c_value * (sample.tail.k / n_total) *
             gp_survival(x, sample.z_k, sample.tail.gamma_hat,
                         sample.tail.scale_hat);
  return std::clamp(p, 0.0, 1.0);
}

JointRisk joint_failure_prob(double p_i, double p_j, double v) {
  if (p_i < 0.0 || p_j < 0.0 || p_i > 1.0 || p_j > 1.0) {
    throw std::invalid_argument("joint_failure_prob: marginals must lie in [0,1]");
  }
  JointRisk out;
  if (p_i == 0.0 || p_j == 0.0) {
    out.l_value = (p_i == 0.0 && p_j == 0.0) ? 0.0 : std::max(p_i, p_j);
    out.p = 0.0;
    return out;
  }
  // L is homogeneous of degree -1, so the common-frequency factor cancels:
  // p_i + p_j - (k/N) L((k/N)/p_i, (k/N)/p_j) = p_i + p_j - L(1/p_i, 1/p_j).
  out.l_value = hr_pair_L(v, 1.0 / p_i, 1.0 / p_j);
  double cap = std::min(p_i, p_j);
  double raw;
  if (v == 0.0) {
    raw = cap;  // complete dependence: the smaller margin is hit jointly
  } else if (std::isinf(v)) {
    raw = 0.0;
  } else {
    // Complement form of p_i + p_j - L: subtracting inside each normal-cdf
    // term instead of between near-equal sums keeps the two limits exact
    // (v -> inf underflows to 0, v -> 0 saturates at the smaller margin).
    double s = std::sqrt(v);
    double lr = std::log(p_i / p_j);
    raw = p_i * std_normal_cdf(-(0.5 * s + lr / s)) +
          p_j * std_normal_cdf(-(0.5 * s - lr / s));
  }
  out.p = std::clamp(raw, 0.0, cap);
  out.clamped = raw < -1e-15 || raw > cap + 1e-15;
  return out;
}

}  // namespace stpot
