#pragma once

// Gaussian additive model Y_s = s h_X + Z with X ~ prior and Z ~ N(0, I):
// MLE and posterior computations, Monte Carlo error / information curves
// over an SNR grid, certified integration over [0, inf), and the closed-form
// binary channel.

#include <cstddef>
#include <limits>
#include <vector>

#include <Eigen/Dense>

#include "mmt/process.hpp"
#include "mmt/random.hpp"

namespace mmt {

struct ChannelSample {
  std::size_t x_index = 0;
  Eigen::VectorXd y;
  Eigen::VectorXd noise;
  double s = 0.0;
};

/// Sampled function of the SNR with per-point standard errors.
struct SnrCurve {
  std::vector<double> grid;
  std::vector<double> values;
  std::vector<double> std_errors;
  /// Certified bound on the integral of the curve beyond grid.back();
  /// zero for curves that are not meant to be integrated.
  double tail_bound = 0.0;
  /// Standard error of the trapezoid area, estimated per sample. NaN when the
  /// producer did not track it.
  double area_std_error = std::numeric_limits<double>::quiet_NaN();
};

/// Inputs of the union-bound tail: MSE_s <= (n-1) diam^2 Q(s d_min / 2).
struct DecayCertificate {
  std::size_t n = 1;
  double diam = 0.0;
  double d_min = 0.0;
};

DecayCertificate decay_certificate(const FiniteMetric& metric);

/// Bound on the integral of any MSE curve over [s, inf):
/// (n-1) diam^2 (2 / d_min) phi(s d_min / 2).
double tail_bound_beyond(const DecayCertificate& cert, double s);

/// Smallest s with tail_bound_beyond(cert, s) <= 1e-6 diam.
double certified_s_max(const DecayCertificate& cert);

inline constexpr std::size_t kDefaultGridPoints = 64;

/// 0 followed by `points` values reaching certified_s_max: a linear run
/// through the knee (s <= 8 / diam) and a geometric run out to s_max.
std::vector<double> snr_grid(const DecayCertificate& cert, std::size_t points = kDefaultGridPoints);

ChannelSample sample_observation(const EmbeddedProcess& emb, const Prior& prior, double s, Seed seed);

/// argmax_u <y, h_u> - (s/2)||h_u||^2, ties to the lowest index.
std::size_t mle_point(const EmbeddedProcess& emb, const Eigen::VectorXd& y, double s);

/// w(u) ∝ prior(u) exp(s <y,h_u> - s^2 ||h_u||^2 / 2), max-shifted.
std::vector<double> posterior_weights(const EmbeddedProcess& emb, const Prior& prior, const Eigen::VectorXd& y,
                                      double s);

/// All Monte Carlo curves from one common-random-number pass. Sample i uses
/// the counter stream (seed, i): one uniform for X, then dim() normals for Z,
/// then one uniform per grid point for the posterior resample.
struct ChannelCurves {
  SnrCurve mse_mle;
  SnrCurve mmse;
  SnrCurve mi;
  /// E||h_X - h_V||^2 for V drawn from the posterior.
  SnrCurve resample_mse;
  /// Paired per-sample residual (resample loss - 2 * posterior-mean loss).
  SnrCurve nishimori_gap;
  /// Paired per-sample residual at interior grid points:
  /// central difference of the information minus s * (posterior-mean loss).
  SnrCurve immse_gap;
};

ChannelCurves channel_curves(const EmbeddedProcess& emb, const Prior& prior, const std::vector<double>& grid,
                             std::size_t samples, Seed seed);

SnrCurve mse_mle_curve(const EmbeddedProcess& emb, const Prior& prior, const std::vector<double>& grid,
                       std::size_t samples, Seed seed);
SnrCurve mmse_curve(const EmbeddedProcess& emb, const Prior& prior, const std::vector<double>& grid,
                    std::size_t samples, Seed seed);
SnrCurve mutual_info_curve(const EmbeddedProcess& emb, const Prior& prior, const std::vector<double>& grid,
                           std::size_t samples, Seed seed);

/// Integrated MMSE with X averaged exactly over the prior (stratified) and a
/// shared noise stream for every atom, so the estimate is smooth in the prior.
double integrated_mmse_stratified(const EmbeddedProcess& emb, const Prior& prior, const std::vector<double>& grid,
                                  std::size_t samples, Seed seed);

struct SnrIntegral {
  double value = 0.0;
  double std_error = 0.0;
  /// |trapezoid(grid) - trapezoid(every other point)|.
  double quadrature_error = 0.0;
  double tail_bound = 0.0;
  double s_max = 0.0;

  /// Statistical plus quadrature allowance; the tail is reported separately.
  double error_bound() const { return std_error + quadrature_error; }
};

/// Trapezoid integral over the grid with a certified tail. Throws
/// TailNotCertified when the grid stops before certified_s_max(cert).
SnrIntegral integrate_snr_curve(const SnrCurve& curve, const DecayCertificate& cert);

struct BinaryChannelPoint {
  double delta = 0.0;
  double s = 0.0;
  double mmse = 0.0;
  double mi = 0.0;
};

/// Two points at distance delta with the uniform prior: alpha = s delta / 2,
/// mmse = (delta^2 / 4) E sech^2(alpha Y), mi = integral of u mmse(u).
BinaryChannelPoint binary_channel_exact(double delta, double s);

/// E sech^2(alpha (alpha + N)), the scalar MMSE of B = ±1 at amplitude alpha.
double binary_unit_mmse(double alpha);

/// Integral of the binary MMSE over s in [0, inf).
double binary_integrated_mmse(double delta);

}  // namespace mmt
