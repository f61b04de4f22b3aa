#include <gtest/gtest.h>

#include <array>
#include <cmath>
#include <numbers>

#include "brute_force.hpp"
#include "frozen.hpp"
#include "mmt/rate_distortion.hpp"

namespace mmt {
namespace {

FiniteMetric line_metric(std::vector<double> xs) {
  Eigen::MatrixXd p(static_cast<Eigen::Index>(xs.size()), 1);
  for (std::size_t i = 0; i < xs.size(); ++i) p(static_cast<Eigen::Index>(i), 0) = xs[i];
  return metric_of(EmbeddedProcess::from_points(p));
}

FiniteMetric two_point() { return line_metric({0.5, -0.5}); }

FiniteMetric cloud(int n, int salt) {
  Eigen::MatrixXd p(n, 3);
  for (int i = 0; i < p.size(); ++i) p.data()[i] = std::sin(2.7 * i + salt) * std::cos(0.9 * i * salt + 1.0);
  return metric_of(EmbeddedProcess::from_points(p));
}

double total_mass(const Coupling& c) { return c.joint.sum(); }

TEST(GibbsCoupling, ZeroLambdaIsProduct) {
  const Prior prior = Prior::from_weights({0.2, 0.3, 0.5});
  const Coupling c = gibbs_coupling(cloud(3, 1), prior, 0.0);
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) EXPECT_NEAR(c.joint(a, b), prior[a] * prior[b], 1e-14);
  const auto st = coupling_stats(c, cloud(3, 1), prior);
  EXPECT_NEAR(st.rate, 0.0, 1e-14);
  EXPECT_NEAR(st.distortion_sq, independent_distortion_sq(cloud(3, 1), prior), 1e-14);
}

TEST(GibbsCoupling, TwoPointLambdaOne) {
  const Coupling c = gibbs_coupling(two_point(), Prior::uniform(2), 1.0);
  EXPECT_NEAR(c.joint(0, 1) + c.joint(1, 0), frozen::kRdTwoPointLambda1OffDiagonal, 1e-10);
  const auto st = coupling_stats(c, two_point(), Prior::uniform(2));
  EXPECT_NEAR(st.rate, frozen::kRdTwoPointLambda1Rate, 1e-9);
  EXPECT_NEAR(st.distortion_sq, frozen::kRdTwoPointLambda1OffDiagonal, 1e-10);
}

TEST(GibbsCoupling, HugeLambdaIsIdentity) {
  const Prior prior = Prior::uniform(4);
  const Coupling c = gibbs_coupling(cloud(4, 2), prior, 1e6);
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) EXPECT_NEAR(c.joint(a, b), a == b ? 0.25 : 0.0, 1e-6);
  const auto st = coupling_stats(c, cloud(4, 2), prior);
  EXPECT_NEAR(st.rate, std::log(4.0), 1e-6);
  EXPECT_NEAR(st.distortion_sq, 0.0, 1e-6);
}

TEST(GibbsCoupling, MarginalResidualContract) {
  for (int n : {3, 8, 16})
    for (double lambda : {0.1, 1.0, 8.0, 30.0, 300.0}) {
      const Prior prior = Prior::uniform(static_cast<std::size_t>(n));
      const Coupling c = gibbs_coupling(cloud(n, n), prior, lambda);
      EXPECT_LE(c.marginal_residual, 1e-10) << n << " " << lambda;
      EXPECT_NEAR(total_mass(c), 1.0, 1e-12);
      EXPECT_GE(c.joint.minCoeff(), 0.0);
    }
}

TEST(GibbsCoupling, ZeroMassAtomsDropped) {
  const Prior prior = Prior::from_weights({0.5, 0.0, 0.5});
  const Coupling c = gibbs_coupling(line_metric({0.0, 0.3, 1.0}), prior, 1.0);
  EXPECT_EQ(c.joint.row(1).sum(), 0.0);
  EXPECT_EQ(c.joint.col(1).sum(), 0.0);
  const double with_gap = rate_at_distortion(line_metric({0.0, 0.3, 1.0}), prior, 0.4);
  const double pair = rate_at_distortion(line_metric({0.0, 1.0}), Prior::uniform(2), 0.4);
  EXPECT_NEAR(with_gap, pair, 1e-9);
}

TEST(ParetoTrace, EndpointsAndMonotone) {
  const FiniteMetric m = cloud(5, 3);
  const Prior prior = Prior::uniform(5);
  std::vector<double> lambdas{0.0};
  for (int k = -2; k <= 6; ++k) lambdas.push_back(std::pow(3.0, k));
  const RDCurve c = pareto_trace(m, prior, lambdas);
  EXPECT_NEAR(c.points.front().rate, 0.0, 1e-12);
  EXPECT_NEAR(c.points.front().distortion_sq, independent_distortion_sq(m, prior), 1e-12);
  EXPECT_TRUE(std::isinf(c.points.back().lambda));
  EXPECT_NEAR(c.points.back().rate, std::log(5.0), 1e-15);
  EXPECT_EQ(c.points.back().distortion_sq, 0.0);
  EXPECT_LE(c.max_marginal_residual, 1e-10);
  for (std::size_t i = 1; i < c.points.size(); ++i) {
    EXPECT_GE(c.points[i].rate, c.points[i - 1].rate - 1e-12);
    EXPECT_LE(c.points[i].distortion_sq, c.points[i - 1].distortion_sq + 1e-12);
  }
}

TEST(ParetoTrace, TwoPointMatchesClosedForm) {
  std::vector<double> lambdas{0.0};
  for (int k = 0; k < 30; ++k) lambdas.push_back(0.05 * std::pow(1.4, k));
  const RDCurve c = pareto_trace(two_point(), Prior::uniform(2), lambdas);
  for (const auto& p : c.points)
    EXPECT_NEAR(p.rate, two_point_rd_exact(1.0, 0.5, std::sqrt(p.distortion_sq)), 1e-8) << p.lambda;
}

TEST(RateAtDistortion, Examples) {
  EXPECT_NEAR(rate_at_distortion(two_point(), Prior::uniform(2), 0.5), frozen::kRdTwoPointR05, 1e-9);
  EXPECT_NEAR(rate_at_distortion(two_point(), Prior::uniform(2), 0.0), std::numbers::ln2, 1e-15);
  EXPECT_EQ(rate_at_distortion(two_point(), Prior::uniform(2), std::sqrt(0.5)), 0.0);
  EXPECT_EQ(rate_at_distortion(two_point(), Prior::uniform(2), 1.0), 0.0);
}

TEST(RateAtDistortion, MatchesTwoPointOracleOnGrid) {
  for (int k = 0; k <= 10; ++k) {
    const double r = 0.1 * k;
    EXPECT_NEAR(rate_at_distortion(two_point(), Prior::uniform(2), r), two_point_rd_exact(1.0, 0.5, r), 1e-6) << r;
  }
}

TEST(RateAtDistortion, NonUniformTwoPointAgainstScan) {
  const Prior prior = Prior::from_weights({0.3, 0.7});
  for (double r : {0.1, 0.3, 0.5, 0.6}) {
    EXPECT_NEAR(rate_at_distortion(two_point(), prior, r), two_point_rd_exact(1.0, 0.3, r), 1e-6) << r;
  }
}

TEST(RateAtDistortion, ThreePointBruteForce) {
  const std::vector<std::array<double, 3>> triangles{{1.0, 1.0, 1.0}, {1.0, 1.5, 0.8}, {0.4, 1.0, 0.9}};
  for (const auto& t : triangles) {
    Eigen::MatrixXd d(3, 3);
    d << 0.0, t[0], t[1], t[0], 0.0, t[2], t[1], t[2], 0.0;
    const FiniteMetric m = FiniteMetric::from_distances(d);
    for (double frac : {0.15, 0.4, 0.7}) {
      const double r = frac * std::sqrt(independent_distortion_sq(m, Prior::uniform(3)));
      const double solver = rate_at_distortion(m, Prior::uniform(3), r);
      const double brute = brute::rd_three_point_uniform(t[0], t[1], t[2], r);
      EXPECT_NEAR(solver, brute, 1e-3) << t[0] << "," << t[1] << "," << t[2] << " r=" << r;
      EXPECT_LE(solver, brute + 1e-9);  // the solver is the infimum
    }
  }
}

TEST(RateAtDistortion, MonotoneInDistortion) {
  const FiniteMetric m = cloud(6, 5);
  const Prior prior = Prior::normalized({1, 2, 3, 1, 2, 3});
  double prev = 1e300;
  for (int k = 0; k < 20; ++k) {
    const double v = rate_at_distortion(m, prior, m.diam * k / 19.0);
    EXPECT_LE(v, prev + 1e-12);
    prev = v;
  }
}

TEST(DistortionAtRate, ExamplesAndMonotone) {
  EXPECT_NEAR(distortion_at_rate(two_point(), Prior::uniform(2), 0.0), std::sqrt(0.5), 1e-15);
  EXPECT_EQ(distortion_at_rate(two_point(), Prior::uniform(2), std::numbers::ln2), 0.0);
  EXPECT_EQ(distortion_at_rate(two_point(), Prior::uniform(2), 5.0), 0.0);
  const FiniteMetric m = cloud(5, 7);
  const Prior prior = Prior::uniform(5);
  EXPECT_GE(distortion_at_rate(m, prior, 0.1), distortion_at_rate(m, prior, 0.3));
  double prev = 1e300;
  for (int k = 0; k < 20; ++k) {
    const double v = distortion_at_rate(m, prior, std::log(5.0) * k / 19.0);
    EXPECT_LE(v, prev + 1e-12);
    prev = v;
  }
}

TEST(DistortionAtRate, InvertsRateAtDistortion) {
  const FiniteMetric m = cloud(4, 9);
  const Prior prior = Prior::normalized({1, 2, 3, 4});
  for (double rate : {0.05, 0.3, 0.8, 1.1}) {
    const double d = distortion_at_rate(m, prior, rate);
    EXPECT_NEAR(rate_at_distortion(m, prior, d), rate, 1e-7);
  }
}

TEST(Integrals, TwoPointValues) {
  EXPECT_NEAR(sqrt_rate_integral(two_point(), Prior::uniform(2)), frozen::kSqrtRateIntegralTwoPoint, 1e-4);
  EXPECT_NEAR(layer_cake_integral(two_point(), Prior::uniform(2)), frozen::kLayerCakeTwoPoint, 2e-4);
  EXPECT_NEAR(sqrt_rate_integral(two_point(), Prior::uniform(2)), 0.364, 0.005);
  EXPECT_NEAR(layer_cake_integral(two_point(), Prior::uniform(2)), 0.728, 0.01);
}

TEST(Integrals, DegeneratePriorGivesZero) {
  EXPECT_EQ(sqrt_rate_integral(cloud(4, 1), Prior::point_mass(4, 2)), 0.0);
  EXPECT_EQ(layer_cake_integral(cloud(4, 1), Prior::point_mass(4, 2)), 0.0);
}

TEST(Integrals, LayerCakeIdentity) {
  for (int n : {3, 6, 10}) {
    const FiniteMetric m = cloud(n, n + 1);
    const Prior prior = Prior::uniform(static_cast<std::size_t>(n));
    const double a = layer_cake_integral(m, prior);
    const double b = 2.0 * sqrt_rate_integral(m, prior);
    EXPECT_LE(std::abs(a - b), 2e-3 * std::max(1.0, b)) << n;
  }
}

TEST(TwoPointRdExact, Examples) {
  EXPECT_NEAR(two_point_rd_exact(1.0, 0.5, 0.0), std::numbers::ln2, 1e-15);
  EXPECT_NEAR(two_point_rd_exact(1.0, 0.5, 0.5), frozen::kRdTwoPointR05, 1e-15);
  EXPECT_EQ(two_point_rd_exact(1.0, 0.5, 1.0), 0.0);
  EXPECT_NEAR(two_point_rd_exact(1.0, 0.25, 0.0), frozen::kEntropyQuarter, 1e-12);
}

}  // namespace
}  // namespace mmt
