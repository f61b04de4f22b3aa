#include "mmt/process.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "mmt/error.hpp"

namespace mmt {
namespace {

constexpr double kSymmetryTol = 1e-12;
constexpr double kPsdTol = 1e-10;
constexpr double kGramTol = 1e-8;
constexpr double kDistinctTol = 1e-9;
constexpr double kPriorSumTol = 1e-12;

Eigen::MatrixXd pairwise_distances(const Eigen::MatrixXd& points) {
  const Eigen::Index n = points.rows();
  Eigen::MatrixXd dist = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index s = 0; s < n; ++s) {
    for (Eigen::Index t = s + 1; t < n; ++t) {
      const double d = (points.row(s) - points.row(t)).norm();
      dist(s, t) = d;
      dist(t, s) = d;
    }
  }
  return dist;
}

void fill_extent(FiniteMetric& m) {
  const Eigen::Index n = m.dist.rows();
  m.diam = n > 0 ? m.dist.maxCoeff() : 0.0;
  m.d_min = std::numeric_limits<double>::infinity();
  for (Eigen::Index s = 0; s < n; ++s)
    for (Eigen::Index t = s + 1; t < n; ++t) m.d_min = std::min(m.d_min, m.dist(s, t));
}

void check_distinct(const Eigen::MatrixXd& dist) {
  const Eigen::Index n = dist.rows();
  if (n < 2) return;
  const double diam = dist.maxCoeff();
  const double threshold = kDistinctTol * (diam > 0.0 ? diam : 1.0);
  for (Eigen::Index s = 0; s < n; ++s) {
    for (Eigen::Index t = s + 1; t < n; ++t) {
      if (dist(s, t) < threshold) {
        std::ostringstream os;
        os << "points " << s << " and " << t << " coincide (d = " << dist(s, t) << ")";
        throw Error(ErrorCode::DistinctnessViolation, os.str());
      }
    }
  }
}

}  // namespace

CovarianceMatrix validate_covariance(const Eigen::MatrixXd& k) {
  if (k.rows() != k.cols() || k.rows() == 0)
    throw Error(ErrorCode::BadParams, "covariance must be a nonempty square matrix");
  if (!k.allFinite()) throw Error(ErrorCode::BadParams, "covariance has non-finite entries");

  const double scale = std::max(1.0, k.cwiseAbs().maxCoeff());
  if ((k - k.transpose()).cwiseAbs().maxCoeff() > kSymmetryTol * scale)
    throw Error(ErrorCode::NotSymmetric, "covariance is not symmetric");

  Eigen::MatrixXd sym = 0.5 * (k + k.transpose());
  const double max_diag = sym.diagonal().maxCoeff();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sym);
  const Eigen::VectorXd& lambda = eig.eigenvalues();
  const double floor = -kPsdTol * std::max(max_diag, 0.0);
  if (lambda.minCoeff() < floor) {
    std::ostringstream os;
    os << "eigenvalue " << lambda.minCoeff() << " below tolerance " << floor;
    throw Error(ErrorCode::NotPSD, os.str());
  }
  if (lambda.minCoeff() < 0.0) {
    const Eigen::VectorXd clipped = lambda.cwiseMax(0.0);
    sym = eig.eigenvectors() * clipped.asDiagonal() * eig.eigenvectors().transpose();
    sym = 0.5 * (sym + sym.transpose()).eval();
  }
  return CovarianceMatrix(std::move(sym));
}

EmbeddedProcess EmbeddedProcess::from_points(Eigen::MatrixXd points, std::vector<std::string> labels) {
  if (points.rows() == 0) throw Error(ErrorCode::BadParams, "empty point set");
  if (!points.allFinite()) throw Error(ErrorCode::BadParams, "points have non-finite coordinates");
  if (!labels.empty() && labels.size() != static_cast<std::size_t>(points.rows()))
    throw Error(ErrorCode::BadParams, "label count does not match point count");
  check_distinct(pairwise_distances(points));
  return EmbeddedProcess(std::move(points), std::move(labels));
}

EmbeddedProcess EmbeddedProcess::scaled(double factor) const { return EmbeddedProcess(points_ * factor, labels_); }

EmbeddedProcess EmbeddedProcess::subset(std::span<const std::size_t> rows) const {
  Eigen::MatrixXd pts(static_cast<Eigen::Index>(rows.size()), points_.cols());
  std::vector<std::string> labels;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    pts.row(static_cast<Eigen::Index>(i)) = points_.row(static_cast<Eigen::Index>(rows[i]));
    if (!labels_.empty()) labels.push_back(labels_[rows[i]]);
  }
  return EmbeddedProcess(std::move(pts), std::move(labels));
}

EmbeddedProcess embed(const CovarianceMatrix& cov) {
  const Eigen::MatrixXd& k = cov.entries();
  const Eigen::Index n = k.rows();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(k);
  Eigen::MatrixXd a(n, n);
  // Eigen sorts ascending; emit columns in decreasing order.
  for (Eigen::Index j = 0; j < n; ++j) {
    const Eigen::Index src = n - 1 - j;
    Eigen::VectorXd v = eig.eigenvectors().col(src);
    Eigen::Index arg = 0;
    v.cwiseAbs().maxCoeff(&arg);
    if (v(arg) < 0.0) v = -v;
    a.col(j) = v * std::sqrt(std::max(eig.eigenvalues()(src), 0.0));
  }

  const double tol = kGramTol * std::max(1.0, k.diagonal().maxCoeff());
  if ((a * a.transpose() - k).cwiseAbs().maxCoeff() > tol)
    throw Error(ErrorCode::NotPSD, "factorization does not reproduce the covariance");

  check_distinct(pairwise_distances(a));
  return EmbeddedProcess(std::move(a), {});
}

FiniteMetric FiniteMetric::from_distances(Eigen::MatrixXd dist) {
  if (dist.rows() != dist.cols() || dist.rows() == 0)
    throw Error(ErrorCode::BadParams, "distance table must be a nonempty square matrix");
  for (Eigen::Index s = 0; s < dist.rows(); ++s) {
    if (dist(s, s) != 0.0) throw Error(ErrorCode::BadParams, "distance table needs a zero diagonal");
    for (Eigen::Index t = 0; t < dist.cols(); ++t) {
      if (!(dist(s, t) >= 0.0) || dist(s, t) != dist(t, s))
        throw Error(ErrorCode::BadParams, "distance table must be symmetric and nonnegative");
    }
  }
  check_distinct(dist);
  FiniteMetric m;
  m.dist = std::move(dist);
  fill_extent(m);
  return m;
}

FiniteMetric FiniteMetric::scaled(double factor) const {
  FiniteMetric m;
  m.dist = dist * factor;
  fill_extent(m);
  return m;
}

FiniteMetric metric_of(const EmbeddedProcess& emb) {
  FiniteMetric m;
  m.dist = pairwise_distances(emb.points());
  fill_extent(m);
  return m;
}

Prior Prior::from_weights(std::vector<double> weights) {
  if (weights.empty()) throw Error(ErrorCode::BadParams, "prior must be nonempty");
  double sum = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw Error(ErrorCode::BadParams, "prior weights must be finite and >= 0");
    sum += w;
  }
  if (std::abs(sum - 1.0) > kPriorSumTol) {
    std::ostringstream os;
    os << "prior sums to " << sum;
    throw Error(ErrorCode::BadParams, os.str());
  }
  return Prior(std::move(weights));
}

Prior Prior::normalized(std::vector<double> weights) {
  double sum = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw Error(ErrorCode::BadParams, "prior weights must be finite and >= 0");
    sum += w;
  }
  if (!(sum > 0.0)) throw Error(ErrorCode::BadParams, "prior weights sum to zero");
  for (double& w : weights) w /= sum;
  return Prior(std::move(weights));
}

Prior Prior::uniform(std::size_t n) {
  if (n == 0) throw Error(ErrorCode::BadParams, "prior must be nonempty");
  return Prior(std::vector<double>(n, 1.0 / static_cast<double>(n)));
}

Prior Prior::point_mass(std::size_t n, std::size_t at) {
  if (at >= n) throw Error(ErrorCode::BadParams, "point mass outside index set");
  std::vector<double> w(n, 0.0);
  w[at] = 1.0;
  return Prior(std::move(w));
}

double entropy(const Prior& p) {
  double h = 0.0;
  for (double w : p.weights())
    if (w > 0.0) h -= w * std::log(w);
  return h;
}

}  // namespace mmt
