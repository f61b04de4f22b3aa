#include <gtest/gtest.h>

#include <cmath>

#include "frozen.hpp"
#include "mmt/error.hpp"
#include "mmt/process.hpp"

namespace mmt {
namespace {

template <class F>
ErrorCode code_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no mmt::Error thrown";
  return ErrorCode::IoError;
}

TEST(Covariance, RejectsAsymmetric) {
  Eigen::MatrixXd k(2, 2);
  k << 1.0, 0.5, 0.4, 1.0;
  EXPECT_EQ(code_of([&] { validate_covariance(k); }), ErrorCode::NotSymmetric);
}

TEST(Covariance, RejectsNegativeEigenvalue) {
  Eigen::MatrixXd k(2, 2);
  k << 1.0, 2.0, 2.0, 1.0;
  EXPECT_EQ(code_of([&] { validate_covariance(k); }), ErrorCode::NotPSD);
}

TEST(Covariance, ClipsRoundoffNegativeEigenvalue) {
  Eigen::MatrixXd k(2, 2);
  k << 1.0, 1.0 + 1e-12, 1.0 + 1e-12, 1.0;
  const CovarianceMatrix c = validate_covariance(k);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(c.entries());
  EXPECT_GE(es.eigenvalues().minCoeff(), -1e-15);
}

TEST(Embed, ReproducesGram) {
  Eigen::MatrixXd k(3, 3);
  k << 2.0, 0.5, 0.1, 0.5, 1.0, 0.3, 0.1, 0.3, 1.5;
  const EmbeddedProcess emb = embed(validate_covariance(k));
  EXPECT_LE((emb.gram() - k).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Embed, IdentityGivesOrthonormalDistances) {
  const EmbeddedProcess emb = embed(validate_covariance(Eigen::MatrixXd::Identity(3, 3)));
  const FiniteMetric m = metric_of(emb);
  for (std::size_t a = 0; a < 3; ++a)
    for (std::size_t b = 0; b < 3; ++b) EXPECT_NEAR(m(a, b), a == b ? 0.0 : std::sqrt(2.0), 1e-12);
}

TEST(Embed, CoincidentPointsViolateDistinctness) {
  Eigen::MatrixXd k = Eigen::MatrixXd::Ones(2, 2);
  EXPECT_EQ(code_of([&] { embed(validate_covariance(k)); }), ErrorCode::DistinctnessViolation);
  Eigen::MatrixXd p(2, 2);
  p << 1.0, 2.0, 1.0, 2.0;
  EXPECT_EQ(code_of([&] { EmbeddedProcess::from_points(p); }), ErrorCode::DistinctnessViolation);
}

TEST(Embed, RankDeficientFactorization) {
  Eigen::MatrixXd k(2, 2);
  k << 1.0, 0.0, 0.0, 0.0;
  const FiniteMetric m = metric_of(embed(validate_covariance(k)));
  EXPECT_NEAR(m(0, 1), 1.0, 1e-12);
}

TEST(Covariance, TinyNegativeEigenvalueAccepted) {
  Eigen::MatrixXd k = Eigen::MatrixXd::Identity(2, 2);
  k(1, 1) = -1e-14;
  EXPECT_NO_THROW(validate_covariance(k));
  EXPECT_EQ(validate_covariance(Eigen::MatrixXd::Identity(2, 2)).entries(), Eigen::MatrixXd::Identity(2, 2));
}

TEST(Embed, RandomCovarianceRoundTrip) {
  for (int n : {2, 5, 9, 16}) {
    Eigen::MatrixXd a(n, n + 2);
    for (int i = 0; i < a.size(); ++i) a.data()[i] = std::sin(1.3 * i + n) + 0.1 * std::cos(7.1 * i);
    const Eigen::MatrixXd k = a * a.transpose();
    const EmbeddedProcess emb = embed(validate_covariance(k));
    EXPECT_LE((emb.gram() - k).cwiseAbs().maxCoeff(), 1e-8) << n;
    const FiniteMetric m = metric_of(emb);
    for (int s = 0; s < n; ++s)
      for (int t = 0; t < n; ++t) {
        EXPECT_NEAR(m.squared(s, t), k(s, s) + k(t, t) - 2.0 * k(s, t), 1e-8);
        for (int u = 0; u < n; ++u) EXPECT_LE(m(s, u), m(s, t) + m(t, u) + 1e-10);
      }
  }
}

TEST(Metric, DiameterAndMinimumDistance) {
  Eigen::MatrixXd p(3, 1);
  p << 0.0, 1.0, 3.0;
  const FiniteMetric m = metric_of(EmbeddedProcess::from_points(p));
  EXPECT_DOUBLE_EQ(m.diam, 3.0);
  EXPECT_DOUBLE_EQ(m.d_min, 1.0);
}

TEST(Metric, SingletonHasInfiniteMinimumDistance) {
  const FiniteMetric m = metric_of(EmbeddedProcess::from_points(Eigen::MatrixXd::Zero(1, 2)));
  EXPECT_EQ(m.diam, 0.0);
  EXPECT_TRUE(std::isinf(m.d_min));
}

TEST(Metric, FromDistancesValidates) {
  Eigen::MatrixXd d(2, 2);
  d << 0.0, 1.0, 2.0, 0.0;
  EXPECT_THROW(FiniteMetric::from_distances(d), Error);
}

TEST(Prior, ValidatesWeights) {
  EXPECT_THROW(Prior::from_weights({0.5, 0.6}), Error);
  EXPECT_THROW(Prior::from_weights({-0.1, 1.1}), Error);
  EXPECT_NO_THROW(Prior::from_weights({0.25, 0.75}));
  const Prior p = Prior::normalized({1.0, 3.0});
  EXPECT_DOUBLE_EQ(p[0], 0.25);
}

TEST(Prior, Entropy) {
  EXPECT_NEAR(entropy(Prior::from_weights({0.25, 0.75})), frozen::kEntropyQuarter, 1e-15);
  EXPECT_EQ(entropy(Prior::point_mass(3, 1)), 0.0);
  EXPECT_NEAR(entropy(Prior::uniform(4)), std::log(4.0), 1e-15);
}

}  // namespace
}  // namespace mmt
