#include "stpot/dependence.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <set>
#include <vector>

#include "stpot/error.hpp"

namespace stpot {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kCensorEdge = 2.0 - 1e-6;

/** kp-th largest finite value; NaNs are skipped. */
double station_threshold(std::span<const double> z, int kp) {
  std::vector<double> vals;
  vals.reserve(z.size());
  for (double v : z) {
    if (!std::isnan(v)) vals.push_back(v);
  }
  if (static_cast<int>(vals.size()) < kp) {
    throw DataError("pair_l_at: fewer finite values than the pair level");
  }
  std::nth_element(vals.begin(), vals.begin() + (kp - 1), vals.end(),
                   std::greater<double>());
  return vals[kp - 1];
}

}  // namespace

double pair_l_at(std::span<const double> zi, std::span<const double> zj, int kp) {
  if (zi.size() != zj.size()) {
    throw std::invalid_argument("pair_l_at: series lengths differ");
  }
  if (kp < 1) throw std::invalid_argument("pair_l_at: level must be positive");
  double ti = station_threshold(zi, kp);
  double tj = station_threshold(zj, kp);
  int uni = 0;
  for (std::size_t d = 0; d < zi.size(); ++d) {
    bool hit_i = !std::isnan(zi[d]) && zi[d] >= ti;
    bool hit_j = !std::isnan(zj[d]) && zj[d] >= tj;
    if (hit_i || hit_j) ++uni;
  }
  double l = static_cast<double>(uni) / kp;
  return std::clamp(l, 1.0, 2.0);
}

std::vector<PairDependence> pairwise_dependence(const HomogenizedSample& sample,
                                                const ObservationPanel& panel) {
  const int m = sample.n_stations;
  if (panel.n_stations() != m || panel.n_days() != sample.n_days) {
    throw DataError("pairwise_dependence: panel does not match the sample");
  }
  if (!panel.has_planar_coordinates()) {
    throw DataError("pairwise_dependence: panel has no planar coordinates; "
                    "project the station layout first");
  }

  // Column views of the day-by-station matrix.
  const int n = sample.n_days;
  std::vector<std::vector<double>> cols(m, std::vector<double>(n));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < m; ++j) cols[j][i] = sample.value(i, j);
  }

  std::vector<PairDependence> pairs;
  pairs.reserve(static_cast<std::size_t>(m) * (m - 1) / 2);
  for (int i = 0; i < m; ++i) {
    for (int j = i + 1; j < m; ++j) {
      PairDependence p;
      p.station_i = i;
      p.station_j = j;
      const auto& ci = panel.planar_km()[i];
      const auto& cj = panel.planar_km()[j];
      p.dx_km = cj[0] - ci[0];
      p.dy_km = cj[1] - ci[1];
      p.distance_km = std::hypot(p.dx_km, p.dy_km);
      p.k_pair = std::min(sample.exceedance_counts[i], sample.exceedance_counts[j]);
      if (p.k_pair < 1) {
        p.l_hat = std::numeric_limits<double>::quiet_NaN();
        p.v_hat = std::numeric_limits<double>::quiet_NaN();
        p.censored = true;
      } else {
        p.l_hat = pair_l_at(cols[i], cols[j], p.k_pair);
        p.censored = p.l_hat >= kCensorEdge;
        p.v_hat = p.censored ? std::numeric_limits<double>::infinity()
                             : invert_variogram(p.l_hat);
      }
      pairs.push_back(p);
    }
  }
  return pairs;
}

double hr_pair_L(double v, double x, double y) {
  if (!(x > 0.0) || !(y > 0.0)) {
    throw std::invalid_argument("hr_pair_L: weights must be positive");
  }
  if (v < 0.0) throw std::invalid_argument("hr_pair_L: variogram must be >= 0");
  if (v == 0.0) return 1.0 / std::min(x, y);
  if (std::isinf(v)) return 1.0 / x + 1.0 / y;
  double s = std::sqrt(v);
  double lr = std::log(y / x);
  return std_normal_cdf(0.5 * s + lr / s) / x +
         std_normal_cdf(0.5 * s - lr / s) / y;
}

double invert_variogram(double l_hat) {
  if (l_hat <= 1.0) return 0.0;
  if (l_hat >= kCensorEdge) return std::numeric_limits<double>::infinity();
  double q = std_normal_quantile(l_hat / 2.0);
  return 4.0 * q * q;
}

double variogram_model(const VariogramParams& p, double dx_km, double dy_km) {
  double c = std::cos(p.theta), s = std::sin(p.theta);
  double u = p.b1 * (c * dx_km + s * dy_km);
  double w = p.b2 * (-s * dx_km + c * dy_km);
  double q = u * u + w * w;
  return std::pow(q, 0.5 * p.alpha);
}

namespace {

double sigmoid(double q) { return 1.0 / (1.0 + std::exp(-q)); }

VariogramParams decode(std::span<const double> q) {
  VariogramParams p;
  p.b1 = std::exp(q[0]);
  p.b2 = std::exp(q[1]);
  p.theta = std::remainder(q[2], kPi);
  p.alpha = 2.0 * sigmoid(q[3]);
  return p;
}

/** b1 <= b2, theta wrapped to (-pi/2, pi/2]; swapping axes rotates by pi/2. */
void canonicalize(VariogramParams& p) {
  if (p.b1 > p.b2) {
    std::swap(p.b1, p.b2);
    p.theta += 0.5 * kPi;
  }
  p.theta = std::remainder(p.theta, kPi);
  if (p.theta <= -0.5 * kPi) p.theta += kPi;
  if (p.theta > 0.5 * kPi) p.theta -= kPi;
}

}  // namespace

VariogramFit fit_variogram(const std::vector<PairDependence>& pairs,
                           const MinimizerOptions& options) {
  std::vector<const PairDependence*> usable;
  int censored = 0;
  for (const auto& p : pairs) {
    if (p.censored || std::isnan(p.v_hat)) {
      ++censored;
      continue;
    }
    if (!(p.distance_km > 0.0)) {
      throw DataError("fit_variogram: coincident stations in a pair");
    }
    usable.push_back(&p);
  }
  if (static_cast<int>(usable.size()) < 8) {
    throw DataError("fit_variogram: needs at least 8 non-censored pairs, got " +
                    std::to_string(usable.size()));
  }
  std::set<long long> directions;
  for (const auto* p : usable) {
    double ang = std::remainder(std::atan2(p->dy_km, p->dx_km), kPi);
    directions.insert(std::llround(ang * 1e6));
  }
  if (directions.size() < 3) {
    throw DataError("fit_variogram: pairs span fewer than 3 directions; "
                    "the anisotropy is not identifiable");
  }

  auto objective = [&](std::span<const double> q) {
    VariogramParams p = decode(q);
    double rss = 0.0;
    for (const auto* pd : usable) {
      double r = pd->v_hat - variogram_model(p, pd->dx_km, pd->dy_km);
      rss += r * r;
    }
    return rss;
  };

  // Deterministic multistarts: two powers times four orientations, with the
  // inverse-range scale chosen so typical model values match the data.
  std::vector<double> med_v, med_d;
  for (const auto* p : usable) {
    med_v.push_back(p->v_hat);
    med_d.push_back(p->distance_km);
  }
  auto median = [](std::vector<double> v) {
    std::nth_element(v.begin(), v.begin() + v.size() / 2, v.end());
    return v[v.size() / 2];
  };
  double v_med = std::max(median(med_v), 1e-6);
  double d_med = median(med_d);

  MinimizerResult best;
  best.f = std::numeric_limits<double>::infinity();
  for (double alpha0 : {0.7, 1.3}) {
    double s0 = std::pow(v_med, 1.0 / alpha0) / d_med;
    for (double theta0 : {0.0, 0.25 * kPi, 0.5 * kPi, -0.25 * kPi}) {
      std::array<double, 4> q0 = {std::log(s0), std::log(s0), theta0,
                                  std::log(alpha0 / (2.0 - alpha0))};
      MinimizerResult r = minimize(objective, q0, options);
      if (r.f < best.f) best = r;
    }
  }
  if (!std::isfinite(best.f)) {
    throw NumericalError("fit_variogram: objective did not evaluate finitely");
  }

  VariogramFit fit;
  fit.params = decode(best.x);
  canonicalize(fit.params);
  fit.rss = best.f;
  fit.n_pairs = static_cast<int>(usable.size());
  fit.n_censored = censored;
  fit.converged = best.converged;

  // Gauss-Newton covariance in the natural parameters (b1, b2, theta, alpha).
  const int np = static_cast<int>(usable.size());
  std::array<double, 4> est = {fit.params.b1, fit.params.b2, fit.params.theta,
                               fit.params.alpha};
  std::vector<double> jac(static_cast<std::size_t>(np) * 4);
  for (int c = 0; c < 4; ++c) {
    double step = 1e-5 * std::max(1.0, std::fabs(est[c]));
    std::array<double, 4> hi = est, lo = est;
    hi[c] += step;
    lo[c] -= step;
    VariogramParams ph{hi[0], hi[1], hi[2], hi[3]};
    VariogramParams pl{lo[0], lo[1], lo[2], lo[3]};
    for (int r = 0; r < np; ++r) {
      double fh = variogram_model(ph, usable[r]->dx_km, usable[r]->dy_km);
      double fl = variogram_model(pl, usable[r]->dx_km, usable[r]->dy_km);
      jac[static_cast<std::size_t>(r) * 4 + c] = (fh - fl) / (2.0 * step);
    }
  }
  std::vector<double> jtj(16, 0.0);
  for (int r = 0; r < np; ++r) {
    for (int a = 0; a < 4; ++a) {
      for (int b = 0; b < 4; ++b) {
        jtj[a * 4 + b] += jac[static_cast<std::size_t>(r) * 4 + a] *
                          jac[static_cast<std::size_t>(r) * 4 + b];
      }
    }
  }
  double dof = std::max(np - 4, 1);
  double sigma2 = fit.rss / dof;
  if (invert_spd(jtj, 4)) {
    for (int c = 0; c < 4; ++c) {
      double var = sigma2 * jtj[c * 4 + c];
      fit.se[c] = var > 0.0 ? std::sqrt(var) : 0.0;
      if (fit.se[c] > 0.0) {
        double z = est[c] / fit.se[c];
        fit.p_values[c] =
            std::clamp(2.0 * (1.0 - std_normal_cdf(std::fabs(z))), 0.0, 1.0);
      } else {
        fit.p_values[c] = est[c] == 0.0 ? 1.0 : 0.0;
      }
    }
  } else {
    fit.se.fill(std::numeric_limits<double>::quiet_NaN());
    fit.p_values.fill(std::numeric_limits<double>::quiet_NaN());
  }
  return fit;
}

}  // namespace stpot
