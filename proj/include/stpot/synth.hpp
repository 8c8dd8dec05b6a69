#ifndef STPOT_SYNTH_HPP
#define STPOT_SYNTH_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "stpot/panel.hpp"

namespace stpot {

enum class TrendFamily { constant, linear, sinusoid, station_weights };
enum class DependenceKind { independent, comonotone, gaussian_copula };

/** Synthetic panel generator with exact generalized-Pareto tails.
 *
 *  Marginal upper tail of the latent stationary variable:
 *      P(Z > x) = (1 + gamma (x - location) / scale)^(-1/gamma),  x >= location
 *  (exponential branch at gamma = 0).  Each cell (day i, station j) draws a
 *  survival uniform V and returns the exact inverse of
 *      P(X > x) = c(i/n, s_j) * P(Z > x)   for x >= location,
 *  with a linear bulk on (0, location) below.  The trend surface c is
 *  normalized so that sum_j integral_0^1 c(t, s_j) dt = 1. */
struct SynthSpec {
  int n_days = 1000;
  int n_stations = 4;
  double gamma = 0.0;
  double location = 8.0;
  double scale = 1.0;

  TrendFamily trend = TrendFamily::constant;
  // linear: shape(t) = trend_a + trend_b t (must stay positive on [0,1]);
  // sinusoid: shape(t) = 1 + trend_a sin(2 pi t + trend_b), |trend_a| < 1.
  double trend_a = 1.0;
  double trend_b = 0.0;
  /** Optional per-station weights; empty means equal weights. */
  std::vector<double> station_weights;

  DependenceKind dependence = DependenceKind::independent;
  /** Row-major n_stations x n_stations correlation matrix for the Gaussian
   *  copula; ignored for the other dependence kinds. */
  std::vector<double> rho;

  std::uint64_t seed = 1;

  /** Station layout: deterministic scatter inside a lon/lat box. */
  double box_lon_min = 7.3, box_lon_max = 10.7;
  double box_lat_min = 51.4, box_lat_max = 53.8;
};

/** Validates the spec; throws DataError with the reason when inconsistent. */
void validate_spec(const SynthSpec& spec);

/** True trend value c(t, s_j) under the spec normalization. */
double true_trend(const SynthSpec& spec, double t, int station);

/** True latent survival P(Z > x). */
double true_tail(const SynthSpec& spec, double x);

/** True latent quantile: x with P(Z > x) = p, p in (0, 1]. */
double true_tail_quantile(const SynthSpec& spec, double p);

/** Simulates the panel.  Day substreams are derived from the seed with a
 *  counter, so results are independent of evaluation order and bitwise
 *  reproducible. */
ObservationPanel simulate_panel(const SynthSpec& spec);

/** Limiting pairwise extremal dependence L(1,1) of the spec: 1 for the
 *  comonotone kind, 2 for independent and for any Gaussian copula with
 *  correlation below 1.  With threshold_fraction q > 0 returns instead the
 *  pre-asymptotic value P(V_i > 1-q or V_j > 1-q)/q computed by 1-d
 *  quadrature of the bivariate normal. */
double true_pair_L(const SynthSpec& spec, int station_i, int station_j,
                   double threshold_fraction = 0.0);

/** Key=value spec file loader for the simulate command. */
SynthSpec parse_spec_file(const std::string& path);

}  // namespace stpot

#endif
