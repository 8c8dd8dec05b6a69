#ifndef STPOT_NUMERICS_HPP
#define STPOT_NUMERICS_HPP

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace stpot {

/** Standard normal distribution function, accurate to about 1e-15 absolute. */
double std_normal_cdf(double x);

/** Standard normal density. */
double std_normal_pdf(double x);

/** Inverse of std_normal_cdf on (0, 1).  Rational initial guess polished by
 *  one Halley step; |std_normal_cdf(result) - p| stays below 1e-12 for
 *  p in [1e-300, 1 - 1e-12].  Throws std::domain_error outside (0, 1). */
double std_normal_quantile(double p);

/** P(sup_{t in [0,1]} |B(t)| <= x) for a standard Brownian bridge B.
 *  Alternating series 1 + 2 sum_j (-1)^j exp(-2 j^2 x^2), truncated when a
 *  term drops below 1e-12 (at most 100 terms); clamped to [0, 1]. */
double kolmogorov_sup_cdf(double x);

struct MinimizerOptions {
  int max_iterations = 2000;
  double tolerance_f = 1e-12;
  double tolerance_x = 1e-10;
  int restarts = 2;
  std::uint64_t seed = 0x5eedULL;
  double initial_step = 0.1;
};

struct MinimizerResult {
  std::vector<double> x;
  double f = 0.0;
  int iterations = 0;
  bool converged = false;
};

/** Derivative-free Nelder-Mead minimizer.  Restarts re-seed the simplex
 *  around the incumbent with deterministic pseudo-random perturbations, so
 *  results are reproducible for a fixed seed.  Never returns a point worse
 *  than x0.  Throws NumericalError if f(x0) is not finite. */
MinimizerResult minimize(const std::function<double(std::span<const double>)>& f,
                         std::span<const double> x0,
                         const MinimizerOptions& options = {});

/** SplitMix64 step; the basis for all deterministic sampling in this
 *  library.  Advances the state and returns a 64-bit output. */
std::uint64_t splitmix64(std::uint64_t& state);

/** Uniform draw on the open interval (0, 1) from a SplitMix64 state. */
double uniform_open01(std::uint64_t& state);

/** Derives an independent substream seed from a base seed and an index. */
std::uint64_t substream_seed(std::uint64_t base, std::uint64_t index);

/** Runs fn(i) for i in [0, count) on up to `threads` workers.  Results must
 *  be written to disjoint slots; the partition is deterministic. */
void parallel_for(std::size_t count, int threads,
                  const std::function<void(std::size_t)>& fn);

/** Solves the symmetric positive definite system via Cholesky; used for the
 *  small covariance factorizations in simulation and curve fitting.
 *  Returns false when the matrix (given row-major, dim x dim) is not
 *  numerically positive definite. */
bool cholesky_factor(std::vector<double>& matrix, int dim);

/** Inverts a small symmetric positive definite matrix in place (row-major).
 *  Returns false on numerical failure. */
bool invert_spd(std::vector<double>& matrix, int dim);

}  // namespace stpot

#endif
