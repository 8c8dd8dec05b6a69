#pragma once

#include <array>
#include <span>
#include <vector>

#include "stpot/homogenize.hpp"
#include "stpot/numerics.hpp"
#include "stpot/panel.hpp"

namespace stpot {

/**
 * Empirical pairwise extremal coefficient: with per-station thresholds set to
 * the kp-th largest value, L = |union of exceedance days| / kp, clamped to
 * [1, 2].  1 means complete dependence, 2 independence.
 */
double pair_l_at(std::span<const double> zi, std::span<const double> zj, int kp);

struct PairDependence {
  int station_i = 0;
  int station_j = 0;
  double dx_km = 0.0;        // east-west separation
  double dy_km = 0.0;        // north-south separation
  double distance_km = 0.0;
  int k_pair = 0;            // per-pair exceedance level
  double l_hat = 1.0;
  double v_hat = 0.0;        // variogram value implied by l_hat
  bool censored = false;     // l_hat at the independence boundary
};

/**
 * All station pairs of a homogenized panel.  The per-pair level is the
 * smaller of the two stations' exceedance counts over the unified threshold.
 */
std::vector<PairDependence> pairwise_dependence(const HomogenizedSample& sample,
                                                const ObservationPanel& panel);

/** Pairwise coefficient of a bivariate Huesler-Reiss law with variogram v,
 *  evaluated at weights (x, y); homogeneous of degree -1. */
double hr_pair_L(double v, double x, double y);

/** Inverse of v -> hr_pair_L(v, 1, 1) = 2 Phi(sqrt(v)/2).  Values at or above
 *  2 - 1e-6 are censored (returns infinity). */
double invert_variogram(double l_hat);

struct VariogramParams {
  double b1 = 1.0;     // inverse range along the first principal axis (1/km)
  double b2 = 1.0;     // inverse range along the second axis (1/km)
  double theta = 0.0;  // axis rotation, radians in (-pi/2, pi/2]
  double alpha = 1.0;  // power, in (0, 2)
};

/** Anisotropic power variogram (|A h|^2)^(alpha/2) with
 *  A = diag(b1, b2) * rotation(theta). */
double variogram_model(const VariogramParams& p, double dx_km, double dy_km);

struct VariogramFit {
  VariogramParams params;
  std::array<double, 4> se{};        // order: b1, b2, theta, alpha
  std::array<double, 4> p_values{};  // two-sided normal, H0: parameter = 0
  double rss = 0.0;
  int n_pairs = 0;       // non-censored pairs entering the fit
  int n_censored = 0;
  bool converged = false;
};

/**
 * Least-squares fit of the anisotropic variogram to the pairwise coefficients.
 * Censored pairs are dropped.  Requires at least 8 usable pairs spanning at
 * least 3 distinct directions.  The fitted axes are reported with b1 <= b2.
 */
VariogramFit fit_variogram(const std::vector<PairDependence>& pairs,
                           const MinimizerOptions& options = {});

}  // namespace stpot
