#include "stpot/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <thread>

#include "stpot/error.hpp"

namespace stpot {

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr double kSqrt2 = 1.4142135623730950488;
constexpr double kInvSqrt2Pi = 0.39894228040143267794;
}  // namespace

double std_normal_cdf(double x) { return 0.5 * std::erfc(-x / kSqrt2); }

double std_normal_pdf(double x) { return kInvSqrt2Pi * std::exp(-0.5 * x * x); }

double std_normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw std::domain_error("std_normal_quantile: p must lie in (0, 1)");
  }

  // Acklam's rational approximation, then one Halley refinement.
  static const double a[6] = {-3.969683028665376e+01, 2.209460984245205e+02,
                              -2.759285104469687e+02, 1.383577518672690e+02,
                              -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[5] = {-5.447609879822406e+01, 1.615858368580409e+02,
                              -1.556989798598866e+02, 6.680131188771972e+01,
                              -1.328068155288572e+01};
  static const double c[6] = {-7.784894002430293e-03, -3.223964580411365e-01,
                              -2.400758277161838e+00, -2.549732539343734e+00,
                              4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[4] = {7.784695709041462e-03, 3.224671290700398e-01,
                              2.445134137142996e+00, 3.754408661907416e+00};
  const double p_low = 0.02425;

  double x;
  if (p < p_low) {
    double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p <= 1.0 - p_low) {
    double q = p - 0.5;
    double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    double q = std::sqrt(-2.0 * std::log1p(-p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }

  // Halley step: e is the cdf error, u its ratio to the density.
  double e = std_normal_cdf(x) - p;
  double u = e / std_normal_pdf(x);
  x -= u / (1.0 + 0.5 * x * u);
  return x;
}

double kolmogorov_sup_cdf(double x) {
  if (x <= 0.0) return 0.0;
  double sum;
  if (x < 1.0) {
    // Jacobi dual of the alternating series; converges in a few terms for
    // small arguments, where the alternating form cancels catastrophically.
    const double q = kPi * kPi / (8.0 * x * x);
    sum = 0.0;
    for (int j = 1; j <= 99; j += 2) {
      double term = std::exp(-q * j * j);
      sum += term;
      if (term < 1e-17) break;
    }
    sum *= std::sqrt(2.0 * kPi) / x;
  } else {
    sum = 1.0;
    double sign = -1.0;
    for (int j = 1; j <= 100; ++j) {
      double term = std::exp(-2.0 * j * j * x * x);
      sum += 2.0 * sign * term;
      sign = -sign;
      if (term < 1e-16) break;
    }
  }
  return std::clamp(sum, 0.0, 1.0);
}

std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9E3779B97F4A7C15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

double uniform_open01(std::uint64_t& state) {
  // 53-bit mantissa offset by half a step keeps the draw inside (0, 1).
  return (static_cast<double>(splitmix64(state) >> 11) + 0.5) *
         (1.0 / 9007199254740992.0);
}

std::uint64_t substream_seed(std::uint64_t base, std::uint64_t index) {
  std::uint64_t s = base ^ (0xA5A5A5A55A5A5A5AULL + index * 0x9E3779B97F4A7C15ULL);
  (void)splitmix64(s);
  return s;
}

namespace {

struct Simplex {
  std::vector<std::vector<double>> points;
  std::vector<double> values;
};

double run_nelder_mead(const std::function<double(std::span<const double>)>& f,
                       std::vector<double>& best_x, double best_f,
                       std::vector<double> start, double step_scale,
                       const MinimizerOptions& opt, int& iterations_used,
                       bool& hit_tolerance) {
  const std::size_t dim = start.size();
  Simplex s;
  s.points.assign(dim + 1, start);
  for (std::size_t i = 0; i < dim; ++i) {
    double step = opt.initial_step * step_scale * std::max(1.0, std::fabs(start[i]));
    s.points[i + 1][i] += step;
  }
  s.values.resize(dim + 1);
  for (std::size_t i = 0; i <= dim; ++i) {
    s.values[i] = f(s.points[i]);
  }

  std::vector<double> centroid(dim), trial(dim), trial2(dim);
  int iter = 0;
  while (iter < opt.max_iterations) {
    ++iter;
    std::size_t lo = 0, hi = 0, second_hi = 0;
    for (std::size_t i = 1; i <= dim; ++i) {
      if (s.values[i] < s.values[lo]) lo = i;
      if (s.values[i] > s.values[hi]) hi = i;
    }
    second_hi = lo;
    for (std::size_t i = 0; i <= dim; ++i) {
      if (i != hi && s.values[i] > s.values[second_hi]) second_hi = i;
    }

    double spread_f = s.values[hi] - s.values[lo];
    double spread_x = 0.0;
    for (std::size_t j = 0; j < dim; ++j) {
      spread_x = std::max(spread_x, std::fabs(s.points[hi][j] - s.points[lo][j]));
    }
    if (spread_f <= opt.tolerance_f * (std::fabs(s.values[lo]) + opt.tolerance_f) &&
        spread_x <= opt.tolerance_x) {
      hit_tolerance = true;
      break;
    }

    for (std::size_t j = 0; j < dim; ++j) {
      double sum = 0.0;
      for (std::size_t i = 0; i <= dim; ++i) {
        if (i != hi) sum += s.points[i][j];
      }
      centroid[j] = sum / static_cast<double>(dim);
    }

    for (std::size_t j = 0; j < dim; ++j) {
      trial[j] = centroid[j] + (centroid[j] - s.points[hi][j]);
    }
    double f_reflect = f(trial);

    if (f_reflect < s.values[lo]) {
      for (std::size_t j = 0; j < dim; ++j) {
        trial2[j] = centroid[j] + 2.0 * (centroid[j] - s.points[hi][j]);
      }
      double f_expand = f(trial2);
      if (f_expand < f_reflect) {
        s.points[hi] = trial2;
        s.values[hi] = f_expand;
      } else {
        s.points[hi] = trial;
        s.values[hi] = f_reflect;
      }
    } else if (f_reflect < s.values[second_hi]) {
      s.points[hi] = trial;
      s.values[hi] = f_reflect;
    } else {
      for (std::size_t j = 0; j < dim; ++j) {
        trial2[j] = centroid[j] + 0.5 * (s.points[hi][j] - centroid[j]);
      }
      double f_contract = f(trial2);
      if (f_contract < s.values[hi]) {
        s.points[hi] = trial2;
        s.values[hi] = f_contract;
      } else {
        for (std::size_t i = 0; i <= dim; ++i) {
          if (i == lo) continue;
          for (std::size_t j = 0; j < dim; ++j) {
            s.points[i][j] = s.points[lo][j] + 0.5 * (s.points[i][j] - s.points[lo][j]);
          }
          s.values[i] = f(s.points[i]);
        }
      }
    }
  }
  iterations_used += iter;

  std::size_t lo = 0;
  for (std::size_t i = 1; i <= dim; ++i) {
    if (s.values[i] < s.values[lo]) lo = i;
  }
  if (s.values[lo] < best_f) {
    best_f = s.values[lo];
    best_x = s.points[lo];
  }
  return best_f;
}

}  // namespace

MinimizerResult minimize(const std::function<double(std::span<const double>)>& f,
                         std::span<const double> x0,
                         const MinimizerOptions& options) {
  std::vector<double> best_x(x0.begin(), x0.end());
  double best_f = f(best_x);
  if (!std::isfinite(best_f)) {
    throw NumericalError("minimize: objective is not finite at the start point");
  }

  MinimizerResult result;
  result.iterations = 0;
  bool hit_tolerance = false;
  best_f = run_nelder_mead(f, best_x, best_f, best_x, 1.0, options,
                           result.iterations, hit_tolerance);

  std::uint64_t rng = options.seed;
  for (int r = 0; r < options.restarts; ++r) {
    std::vector<double> start = best_x;
    double scale = 0.25 / static_cast<double>(1 << r);
    for (double& v : start) {
      v += (uniform_open01(rng) - 0.5) * 2.0 * scale * std::max(1.0, std::fabs(v));
    }
    best_f = run_nelder_mead(f, best_x, best_f, start, scale, options,
                             result.iterations, hit_tolerance);
  }

  result.x = best_x;
  result.f = best_f;
  result.converged = hit_tolerance && std::isfinite(best_f);
  return result;
}

void parallel_for(std::size_t count, int threads,
                  const std::function<void(std::size_t)>& fn) {
  if (count == 0) return;
  unsigned workers = threads > 0 ? static_cast<unsigned>(threads)
                                 : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min<unsigned>(workers, static_cast<unsigned>(count));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&, w]() {
      for (std::size_t i = w; i < count; i += workers) fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

bool cholesky_factor(std::vector<double>& matrix, int dim) {
  for (int i = 0; i < dim; ++i) {
    for (int j = 0; j <= i; ++j) {
      double sum = matrix[i * dim + j];
      for (int k = 0; k < j; ++k) {
        sum -= matrix[i * dim + k] * matrix[j * dim + k];
      }
      if (i == j) {
        if (sum <= 0.0 || !std::isfinite(sum)) return false;
        matrix[i * dim + j] = std::sqrt(sum);
      } else {
        matrix[i * dim + j] = sum / matrix[j * dim + j];
      }
    }
    for (int j = i + 1; j < dim; ++j) matrix[i * dim + j] = 0.0;
  }
  return true;
}

bool invert_spd(std::vector<double>& matrix, int dim) {
  std::vector<double> chol = matrix;
  if (!cholesky_factor(chol, dim)) return false;

  // Invert the lower triangular factor, then assemble L^-T L^-1.
  std::vector<double> inv_l(dim * dim, 0.0);
  for (int i = 0; i < dim; ++i) {
    inv_l[i * dim + i] = 1.0 / chol[i * dim + i];
    for (int j = 0; j < i; ++j) {
      double sum = 0.0;
      for (int k = j; k < i; ++k) {
        sum -= chol[i * dim + k] * inv_l[k * dim + j];
      }
      inv_l[i * dim + j] = sum / chol[i * dim + i];
    }
  }
  for (int i = 0; i < dim; ++i) {
    for (int j = 0; j < dim; ++j) {
      double sum = 0.0;
      for (int k = std::max(i, j); k < dim; ++k) {
        sum += inv_l[k * dim + i] * inv_l[k * dim + j];
      }
      matrix[i * dim + j] = sum;
    }
  }
  return true;
}

}  // namespace stpot
