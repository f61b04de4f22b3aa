#include "mmt/width.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "mmt/error.hpp"
#include "mmt/math.hpp"
#include "mmt/parallel.hpp"
#include "mmt/stats.hpp"

namespace mmt {
namespace {
constexpr std::size_t kBlock = 2048;
}

WidthEstimate width_mc(const EmbeddedProcess& emb, std::size_t samples, Seed seed) {
  if (samples < 2) throw Error(ErrorCode::BadParams, "width_mc needs at least 2 samples");
  const std::size_t n = emb.size();
  const std::size_t dim = emb.dim();
  Eigen::MatrixXd shifted = emb.points().rowwise() - emb.points().row(0);

  auto block = [&](std::size_t begin, std::size_t end) {
    MeanAccumulator acc;
    Eigen::VectorXd z(static_cast<Eigen::Index>(dim));
    Eigen::VectorXd proj(static_cast<Eigen::Index>(n));
    for (std::size_t i = begin; i < end; ++i) {
      CounterRng rng(seed, i);
      rng.fill_normal({z.data(), dim});
      proj.noalias() = shifted * z;
      acc.add(std::max(0.0, proj.maxCoeff()));
    }
    return acc;
  };
  const MeanAccumulator total = blocked_reduce<MeanAccumulator>(samples, kBlock, block);

  WidthEstimate out;
  out.value = total.mean();
  out.std_error = total.stderr_of_mean();
  out.samples = samples;
  out.seed = seed;
  return out;
}

double width_two_point_exact(double distance) {
  if (!(distance >= 0.0)) throw Error(ErrorCode::BadParams, "distance must be >= 0");
  return distance / std::sqrt(2.0 * std::numbers::pi);
}

double width_iid_max_exact(std::size_t n) {
  if (n == 0) throw Error(ErrorCode::BadParams, "need at least one variable");
  if (n == 1) return 0.0;
  const double k = static_cast<double>(n);
  auto integrand = [k](double x) {
    return x * k * normal_pdf(x) * std::pow(normal_cdf(x), k - 1.0);
  };
  // Mass lives well inside [-12, 12 + sqrt(2 log n)].
  const double hi = 12.0 + std::sqrt(2.0 * std::log(k));
  return integrate(integrand, -12.0, 0.0, 1e-11).value + integrate(integrand, 0.0, hi, 1e-11).value;
}

}  // namespace mmt
