#pragma once

#include <cstddef>

#include "mmt/process.hpp"
#include "mmt/random.hpp"

namespace mmt {

/// Monte Carlo estimate of W(T) = E sup_t <Z, h_t>.
struct WidthEstimate {
  double value = 0.0;
  double std_error = 0.0;
  std::size_t samples = 0;
  Seed seed = 0;
};

inline constexpr std::size_t kDefaultWidthSamples = 200'000;

/// Sample i draws Z from the counter stream (seed, i). The estimator averages
/// max_t <Z, h_t - h_0>; subtracting the fixed point h_0 leaves the
/// expectation unchanged (Z is centered), makes the singleton exactly zero, and
/// keeps the estimate pathwise monotone when points are appended.
WidthEstimate width_mc(const EmbeddedProcess& emb, std::size_t samples, Seed seed);

/// E max(G_a, G_b) for d(a, b) = D, i.e. D / sqrt(2 pi).
double width_two_point_exact(double distance);

/// E max of n i.i.d. standard normals by quadrature of x n phi(x) Phi(x)^(n-1).
double width_iid_max_exact(std::size_t n);

}  // namespace mmt
