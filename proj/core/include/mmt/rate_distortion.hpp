#pragma once

// Self-coupled rate-distortion: R(r) = inf I(V; V') over couplings with both
// marginals equal to the prior and E d(V, V')^2 <= r^2, plus its inverse.
//
// For a multiplier lambda >= 0 the minimizer of KL(P || pi x pi) +
// lambda E d^2 over the transportation polytope is the scaled Gibbs kernel
// P(u,v) = pi(u) pi(v) exp(f(u) + g(v) - lambda d(u,v)^2). Sweeping lambda
// traces the lower envelope of the (distortion, rate) region; the KL term is
// the mutual information because both marginals are pinned to pi.

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "mmt/process.hpp"

namespace mmt {

inline constexpr double kDefaultCouplingTol = 1e-10;
inline constexpr std::size_t kMaxScalingIterations = 100'000;

struct Coupling {
  /// n x n joint law; rows and columns of zero-mass atoms are zero.
  Eigen::MatrixXd joint;
  /// l1 distance of the row marginal plus that of the column marginal to pi.
  double marginal_residual = 0.0;
  std::size_t iterations = 0;
};

/// Log-domain symmetric scaling of pi(u) pi(v) exp(-lambda d^2) to marginals (pi, pi).
/// Throws NoConvergence after kMaxScalingIterations sweeps.
Coupling gibbs_coupling(const FiniteMetric& metric, const Prior& prior, double lambda,
                        double tol = kDefaultCouplingTol);

struct CouplingStats {
  double rate = 0.0;  // nats
  double distortion_sq = 0.0;
};

/// Mutual information against the coupling's own marginals, and E d^2.
CouplingStats coupling_stats(const Coupling& c, const FiniteMetric& metric, const Prior& prior);

struct RDPoint {
  double lambda = 0.0;
  double rate = 0.0;
  double distortion_sq = 0.0;
};

struct RDCurve {
  std::vector<RDPoint> points;
  double entropy_cap = 0.0;
  double max_marginal_residual = 0.0;
};

/// Solves each lambda independently (no warm start, so the trace can be
/// computed in any order) and appends the lambda = inf endpoint (H(pi), 0).
/// Throws NoConvergence if the trace is not monotone.
RDCurve pareto_trace(const FiniteMetric& metric, const Prior& prior, const std::vector<double>& lambdas,
                     double tol = kDefaultCouplingTol);

/// E d(V, V')^2 under the product coupling.
double independent_distortion_sq(const FiniteMetric& metric, const Prior& prior);

/// R(r) in nats; zero once r^2 reaches the product distortion.
double rate_at_distortion(const FiniteMetric& metric, const Prior& prior, double r,
                          double tol = kDefaultCouplingTol);

/// Root-mean-square distortion D(A) at mutual information A.
double distortion_at_rate(const FiniteMetric& metric, const Prior& prior, double rate,
                          double tol = kDefaultCouplingTol);

/// Integral of sqrt(R(r)) over [0, diam], absolute tolerance 1e-4.
double sqrt_rate_integral(const FiniteMetric& metric, const Prior& prior, double tol = kDefaultCouplingTol);

/// Integral of D(A) / sqrt(A) over [0, H(pi)] computed as 2 * integral of
/// D(u^2) over [0, sqrt(H)], absolute tolerance 1e-4.
double layer_cake_integral(const FiniteMetric& metric, const Prior& prior, double tol = kDefaultCouplingTol);

/// Two points at distance D with prior (p, 1-p). Closed form
/// (ln 2 - H_b(min(r^2 / D^2, 1/2)))_+ for p = 1/2; other p by a grid scan
/// (step 1e-5) over the off-diagonal mass of symmetric 2 x 2 couplings.
double two_point_rd_exact(double distance, double prior_p, double r);

}  // namespace mmt
