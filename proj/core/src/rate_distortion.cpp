#include "mmt/rate_distortion.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include <boost/math/tools/roots.hpp>

#include "mmt/error.hpp"
#include "mmt/math.hpp"

namespace mmt {
namespace {

constexpr double kIntegralTol = 1e-4;
constexpr double kLambdaCeiling = 1e300;

/// The problem restricted to the prior's support.
struct Reduced {
  std::vector<std::size_t> support;
  Eigen::VectorXd pi;
  Eigen::VectorXd log_pi;
  Eigen::MatrixXd sq;
  double entropy = 0.0;
  double product_distortion = 0.0;

  Reduced(const FiniteMetric& metric, const Prior& prior) {
    if (prior.size() != metric.size()) throw Error(ErrorCode::BadParams, "prior length does not match metric");
    for (std::size_t u = 0; u < prior.size(); ++u)
      if (prior[u] > 0.0) support.push_back(u);
    const Eigen::Index m = static_cast<Eigen::Index>(support.size());
    pi.resize(m);
    log_pi.resize(m);
    sq.resize(m, m);
    for (Eigen::Index a = 0; a < m; ++a) {
      pi(a) = prior[support[static_cast<std::size_t>(a)]];
      log_pi(a) = std::log(pi(a));
      for (Eigen::Index b = 0; b < m; ++b)
        sq(a, b) = metric.squared(support[static_cast<std::size_t>(a)], support[static_cast<std::size_t>(b)]);
    }
    entropy = entropy_of(prior);
    product_distortion = pi.dot(sq * pi);
  }

  std::size_t size() const { return support.size(); }

  static double entropy_of(const Prior& p) { return mmt::entropy(p); }
};

struct Potentials {
  Eigen::VectorXd f;
  Eigen::VectorXd g;
};

struct Solved {
  Eigen::MatrixXd joint;  // reduced
  double residual = 0.0;
  std::size_t iterations = 0;
};

Solved solve_scaling(const Reduced& r, double lambda, double tol, Potentials& pot) {
  const Eigen::Index m = static_cast<Eigen::Index>(r.size());
  if (pot.f.size() != m) {
    pot.f = Eigen::VectorXd::Zero(m);
    pot.g = Eigen::VectorXd::Zero(m);
  }
  const Eigen::MatrixXd cost = -lambda * r.sq;
  Eigen::VectorXd lse(m);
  std::vector<double> scratch(static_cast<std::size_t>(m));

  auto row_lse = [&](const Eigen::VectorXd& g) {
    for (Eigen::Index u = 0; u < m; ++u) {
      for (Eigen::Index v = 0; v < m; ++v) scratch[static_cast<std::size_t>(v)] = r.log_pi(v) + cost(u, v) + g(v);
      lse(u) = log_sum_exp(scratch);
    }
  };

  // Symmetric damped scaling: both marginals equal pi, so the solution has
  // f = g and f <- (f - lse(f)) / 2 is a contraction (rate <= 1/2) for the
  // positive definite Gaussian kernel. Plain alternating scaling stalls when
  // the points form clusters.
  Solved out;
  for (std::size_t it = 0; it < kMaxScalingIterations; ++it) {
    row_lse(pot.f);
    double row_residual = 0.0;
    for (Eigen::Index u = 0; u < m; ++u) row_residual += r.pi(u) * std::abs(std::expm1(pot.f(u) + lse(u)));
    out.iterations = it;
    if (row_residual <= 0.25 * tol) break;
    pot.f = 0.5 * (pot.f - lse);
    if (it + 1 == kMaxScalingIterations) {
      std::ostringstream os;
      os << "marginal scaling did not converge at lambda = " << lambda;
      throw Error(ErrorCode::NoConvergence, os.str());
    }
  }
  pot.g = pot.f;

  out.joint.resize(m, m);
  for (Eigen::Index u = 0; u < m; ++u)
    for (Eigen::Index v = 0; v < m; ++v)
      out.joint(u, v) = std::exp(r.log_pi(u) + r.log_pi(v) + cost(u, v) + pot.f(u) + pot.g(v));
  out.residual = (out.joint.rowwise().sum() - r.pi).cwiseAbs().sum() +
                 (out.joint.colwise().sum().transpose() - r.pi).cwiseAbs().sum();
  return out;
}

CouplingStats reduced_stats(const Eigen::MatrixXd& joint, const Eigen::MatrixXd& sq) {
  CouplingStats s;
  const Eigen::VectorXd row = joint.rowwise().sum();
  const Eigen::VectorXd col = joint.colwise().sum().transpose();
  for (Eigen::Index u = 0; u < joint.rows(); ++u) {
    for (Eigen::Index v = 0; v < joint.cols(); ++v) {
      const double p = joint(u, v);
      if (p <= 0.0) continue;
      s.rate += p * std::log(p / (row(u) * col(v)));
      s.distortion_sq += p * sq(u, v);
    }
  }
  s.rate = std::max(0.0, s.rate);
  return s;
}

/// Warm-started evaluations of the Lagrangian family for one root search.
class LambdaFamily {
 public:
  LambdaFamily(const Reduced& r, double tol) : r_(r), tol_(tol) {}

  CouplingStats at(double lambda) {
    const Solved s = solve_scaling(r_, lambda, tol_, pot_);
    return reduced_stats(s.joint, r_.sq);
  }

 private:
  const Reduced& r_;
  double tol_;
  Potentials pot_;
};

/// Finds log(lambda) where `increasing(lambda)` crosses zero; the function is
/// negative at lambda -> 0 and positive for large lambda.
template <class F>
double solve_log_lambda(F&& increasing, double scale) {
  double hi = 1.0 / scale;
  double f_hi = increasing(hi);
  while (f_hi < 0.0) {
    hi *= 2.0;
    if (hi > kLambdaCeiling) throw Error(ErrorCode::NoConvergence, "multiplier search overflowed");
    f_hi = increasing(hi);
  }
  if (f_hi == 0.0) return std::log(hi);
  double lo = hi * 0.5;
  double f_lo = increasing(lo);
  for (int i = 0; f_lo >= 0.0 && i < 200; ++i) {
    if (f_lo == 0.0) return std::log(lo);
    hi = lo;
    f_hi = f_lo;
    lo *= 0.5;
    f_lo = increasing(lo);
  }
  if (f_lo >= 0.0) return std::log(lo);

  auto g = [&](double t) { return increasing(std::exp(t)); };
  boost::uintmax_t max_iter = 200;
  const auto bracket = boost::math::tools::toms748_solve(g, std::log(lo), std::log(hi), f_lo, f_hi,
                                                         boost::math::tools::eps_tolerance<double>(50), max_iter);
  return 0.5 * (bracket.first + bracket.second);
}

double diameter_scale(const Reduced& r) {
  const double d = r.sq.maxCoeff();
  return d > 0.0 ? d : 1.0;
}

}  // namespace

Coupling gibbs_coupling(const FiniteMetric& metric, const Prior& prior, double lambda, double tol) {
  if (!(lambda >= 0.0)) throw Error(ErrorCode::BadParams, "lambda must be >= 0");
  const Reduced r(metric, prior);
  Potentials pot;
  const Solved s = solve_scaling(r, lambda, tol, pot);
  const Eigen::Index n = static_cast<Eigen::Index>(metric.size());
  Coupling c;
  c.joint = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t a = 0; a < r.size(); ++a)
    for (std::size_t b = 0; b < r.size(); ++b)
      c.joint(static_cast<Eigen::Index>(r.support[a]), static_cast<Eigen::Index>(r.support[b])) =
          s.joint(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
  c.marginal_residual = s.residual;
  c.iterations = s.iterations;
  return c;
}

CouplingStats coupling_stats(const Coupling& c, const FiniteMetric& metric, const Prior& prior) {
  if (c.joint.rows() != static_cast<Eigen::Index>(metric.size()) || prior.size() != metric.size())
    throw Error(ErrorCode::BadParams, "coupling, metric and prior sizes differ");
  return reduced_stats(c.joint, metric.dist.cwiseProduct(metric.dist));
}

double independent_distortion_sq(const FiniteMetric& metric, const Prior& prior) {
  return Reduced(metric, prior).product_distortion;
}

RDCurve pareto_trace(const FiniteMetric& metric, const Prior& prior, const std::vector<double>& lambdas, double tol) {
  if (lambdas.empty() || lambdas.front() != 0.0) throw Error(ErrorCode::BadParams, "lambdas must start at 0");
  for (std::size_t i = 1; i < lambdas.size(); ++i)
    if (!(lambdas[i] > lambdas[i - 1])) throw Error(ErrorCode::BadParams, "lambdas must be increasing");

  const Reduced r(metric, prior);
  RDCurve curve;
  curve.entropy_cap = r.entropy;
  for (double lambda : lambdas) {
    Potentials cold;
    const Solved s = solve_scaling(r, lambda, tol, cold);
    const CouplingStats st = reduced_stats(s.joint, r.sq);
    curve.max_marginal_residual = std::max(curve.max_marginal_residual, s.residual);
    curve.points.push_back({lambda, st.rate, st.distortion_sq});
  }
  curve.points.push_back({kInf, r.entropy, 0.0});

  const double slack = 1e-9;
  for (std::size_t i = 1; i < curve.points.size(); ++i) {
    const RDPoint& a = curve.points[i - 1];
    const RDPoint& b = curve.points[i];
    if (b.rate < a.rate - slack || b.distortion_sq > a.distortion_sq + slack) {
      std::ostringstream os;
      os << "trace not monotone between lambda " << a.lambda << " and " << b.lambda;
      throw Error(ErrorCode::NoConvergence, os.str());
    }
  }
  return curve;
}

double rate_at_distortion(const FiniteMetric& metric, const Prior& prior, double r, double tol) {
  if (!(r >= 0.0)) throw Error(ErrorCode::BadParams, "r must be >= 0");
  const Reduced red(metric, prior);
  if (red.size() < 2) return 0.0;
  const double target = r * r;
  if (target >= red.product_distortion) return 0.0;
  if (r == 0.0) return red.entropy;

  LambdaFamily family(red, tol);
  // distortion decreases in lambda; negate to get an increasing function.
  const double t = solve_log_lambda([&](double lambda) { return target - family.at(lambda).distortion_sq; },
                                    diameter_scale(red));
  return std::clamp(family.at(std::exp(t)).rate, 0.0, red.entropy);
}

double distortion_at_rate(const FiniteMetric& metric, const Prior& prior, double rate, double tol) {
  if (!(rate >= 0.0)) throw Error(ErrorCode::BadParams, "rate must be >= 0");
  const Reduced red(metric, prior);
  if (red.size() < 2 || rate >= red.entropy) return 0.0;
  if (rate == 0.0) return std::sqrt(red.product_distortion);

  LambdaFamily family(red, tol);
  const double t =
      solve_log_lambda([&](double lambda) { return family.at(lambda).rate - rate; }, diameter_scale(red));
  return std::sqrt(std::max(0.0, family.at(std::exp(t)).distortion_sq));
}

double sqrt_rate_integral(const FiniteMetric& metric, const Prior& prior, double tol) {
  const Reduced red(metric, prior);
  if (red.size() < 2 || red.entropy <= 0.0) return 0.0;
  // The integrand vanishes beyond the product-coupling distortion.
  const double upper = std::min(metric.diam, std::sqrt(red.product_distortion));
  auto f = [&](double r) { return std::sqrt(rate_at_distortion(metric, prior, r, tol)); };
  return integrate(f, 0.0, upper, kIntegralTol).value;
}

double layer_cake_integral(const FiniteMetric& metric, const Prior& prior, double tol) {
  const Reduced red(metric, prior);
  if (red.size() < 2 || red.entropy <= 0.0) return 0.0;
  auto f = [&](double u) { return distortion_at_rate(metric, prior, u * u, tol); };
  return 2.0 * integrate(f, 0.0, std::sqrt(red.entropy), kIntegralTol).value;
}

double two_point_rd_exact(double distance, double prior_p, double r) {
  if (!(distance > 0.0)) throw Error(ErrorCode::BadParams, "distance must be > 0");
  if (!(prior_p > 0.0 && prior_p < 1.0)) throw Error(ErrorCode::BadParams, "prior_p must lie in (0, 1)");
  if (!(r >= 0.0 && r <= distance * (1.0 + 1e-12))) throw Error(ErrorCode::BadParams, "need 0 <= r <= D");

  if (prior_p == 0.5) {
    const double flip = std::min(r * r / (distance * distance), 0.5);
    return std::max(0.0, std::numbers::ln2 - binary_entropy(flip));
  }

  // Symmetric couplings [[p - m, m], [m, q - m]], distortion 2 m D^2.
  const double p = prior_p;
  const double q = 1.0 - p;
  const double m_cap = std::min(p, q);
  const double budget = r * r / (2.0 * distance * distance);
  auto info = [&](double m) {
    double total = 0.0;
    const double cells[4] = {p - m, m, m, q - m};
    const double outer[4] = {p * p, p * q, q * p, q * q};
    for (int i = 0; i < 4; ++i)
      if (cells[i] > 0.0) total += cells[i] * std::log(cells[i] / outer[i]);
    return std::max(0.0, total);
  };
  constexpr double kStep = 1e-5;
  double best = info(0.0);
  for (std::size_t k = 1;; ++k) {
    const double m = static_cast<double>(k) * kStep;
    if (m > m_cap || m > budget) break;
    best = std::min(best, info(m));
  }
  // The scan also visits the binding endpoint of the constraint.
  return std::min(best, info(std::min(m_cap, budget)));
}

}  // namespace mmt
