#pragma once

// Chaining functionals on a finite metric space: the Fernique-Talagrand
// functional, exact partition gamma_2 for tiny spaces, and two building
// blocks of the rate-distortion comparison (the Gibbs penalty and the
// penalized step-function integral).

#include <cstddef>
#include <vector>

#include "mmt/process.hpp"
#include "mmt/random.hpp"

namespace mmt {

struct MeasureOnT {
  std::vector<double> weights;
  /// Smallest atom allowed while optimizing.
  double floor = 0.0;
};

/// sup_t of the integral over [0, diam] of sqrt(log 1 / mu(B(t, r))), with
/// closed balls. Exact: mu(B(t, .)) is a step function jumping at the sorted
/// distances from t. Returns +inf when some ball of positive length is empty.
double ft_value(const FiniteMetric& metric, const MeasureOnT& mu);

struct FtBudget {
  std::size_t restarts = 8;
  /// Line-searched steps per restart, across all smoothing stages.
  std::size_t iterations = 2000;
  double floor = 1e-8;
};

struct FtResult {
  MeasureOnT measure;
  /// ft_value(metric, measure): an upper bound on the infimum over measures.
  double value = 0.0;
  std::size_t restart = 0;
};

/// Entropic mirror descent on a log-sum-exp smoothing of the sup, annealed
/// toward the exact objective. Steps are taken in log-weight coordinates with
/// a BFGS metric and an Armijo line search. Restart 0 starts at the uniform
/// measure. BadParams when the atom floor times |T| reaches 1.
FtResult ft_optimize(const FiniteMetric& metric, const FtBudget& budget, Seed seed);

/// Minimum of ft_value over the simplex lattice with spacing `step`
/// (1 / step must be an integer). TooLarge past 10^7 lattice points.
FtResult ft_grid_search(const FiniteMetric& metric, double step);

inline constexpr std::size_t kGamma2MaxPoints = 8;

/// Exact inf over partition sequences (|A_n| <= N_n, N_n = 2^(2^n) for n >= 1
/// and N_0 = level0_cap) of sup_t sum_n 2^(n/2) diam(A_n(t)). Levels with
/// N_n >= |T| take singletons and contribute nothing. TooLarge beyond 8 points.
double gamma2_part_exact(const FiniteMetric& metric, std::size_t level0_cap);

/// -log sum_y mu(y) exp(-d(x, y)^2 / alpha^2), the closed form of
/// inf_nu { alpha^-2 E_nu d(x, Y)^2 + KL(nu || mu) }.
double psi_gibbs(const FiniteMetric& metric, const MeasureOnT& mu, std::size_t x, double alpha);

/// Nonincreasing right-continuous step function on [0, end]:
/// y = values[k] on [knots[k], knots[k+1]) (the last piece stops at `end`),
/// and y(end) = 0.
struct StepFunction {
  std::vector<double> knots;
  std::vector<double> values;
  double end = 0.0;
};

/// Integral over alpha in (0, inf) of inf_{0 <= r <= end} { r^2 / alpha^2 + y(r)^2 },
/// evaluated piecewise in closed form. Throws MalformedStep on bad input.
double penalized_functional(const StepFunction& y);

/// Integral of y over [0, end].
double step_integral(const StepFunction& y);

}  // namespace mmt
