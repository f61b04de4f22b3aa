#pragma once

// Finite centered Gaussian processes: covariance validation, Euclidean
// realization G_t = <Z, h_t>, the canonical metric, and priors on T.

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace mmt {

/// Symmetric positive semidefinite covariance K(s,t) = E G_s G_t.
class CovarianceMatrix {
 public:
  CovarianceMatrix() = default;
  const Eigen::MatrixXd& entries() const { return entries_; }
  std::size_t size() const { return static_cast<std::size_t>(entries_.rows()); }

 private:
  friend CovarianceMatrix validate_covariance(const Eigen::MatrixXd& k);
  explicit CovarianceMatrix(Eigen::MatrixXd k) : entries_(std::move(k)) {}
  Eigen::MatrixXd entries_;
};

/// Symmetrizes K and checks its spectrum. Eigenvalues in
/// [-1e-10 * max diag, 0) are clipped to zero; anything lower is NotPSD.
/// Asymmetry above 1e-12 relative to the largest entry is NotSymmetric.
CovarianceMatrix validate_covariance(const Eigen::MatrixXd& k);

/// Index set realized as distinct vectors h_t (rows of `points`).
class EmbeddedProcess {
 public:
  EmbeddedProcess() = default;

  /// Wraps explicit points; throws DistinctnessViolation on coincident rows.
  static EmbeddedProcess from_points(Eigen::MatrixXd points, std::vector<std::string> labels = {});

  const Eigen::MatrixXd& points() const { return points_; }
  const std::vector<std::string>& labels() const { return labels_; }
  std::size_t size() const { return static_cast<std::size_t>(points_.rows()); }
  std::size_t dim() const { return static_cast<std::size_t>(points_.cols()); }
  Eigen::VectorXd point(std::size_t t) const { return points_.row(static_cast<Eigen::Index>(t)).transpose(); }

  /// Gram matrix <h_s, h_t>.
  Eigen::MatrixXd gram() const { return points_ * points_.transpose(); }

  EmbeddedProcess scaled(double factor) const;
  /// Keeps the listed rows in the given order.
  EmbeddedProcess subset(std::span<const std::size_t> rows) const;

 private:
  EmbeddedProcess(Eigen::MatrixXd points, std::vector<std::string> labels)
      : points_(std::move(points)), labels_(std::move(labels)) {}
  friend EmbeddedProcess embed(const CovarianceMatrix& k);

  Eigen::MatrixXd points_;
  std::vector<std::string> labels_;
};

/// Rows A_t of A with A A^T = K, from the clipped eigendecomposition.
/// Columns are ordered by decreasing eigenvalue and sign-normalized so the
/// result is deterministic.
EmbeddedProcess embed(const CovarianceMatrix& k);

/// Canonical metric d(s,t) = ||h_s - h_t||.
struct FiniteMetric {
  Eigen::MatrixXd dist;
  double diam = 0.0;
  /// Smallest off-diagonal distance; +inf for a singleton.
  double d_min = 0.0;

  std::size_t size() const { return static_cast<std::size_t>(dist.rows()); }
  double operator()(std::size_t s, std::size_t t) const {
    return dist(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(t));
  }
  double squared(std::size_t s, std::size_t t) const {
    const double d = (*this)(s, t);
    return d * d;
  }

  /// Builds a metric from an explicit distance table (zero diagonal,
  /// symmetric, nonnegative). Used for spaces given without coordinates.
  static FiniteMetric from_distances(Eigen::MatrixXd dist);
  FiniteMetric scaled(double factor) const;
};

FiniteMetric metric_of(const EmbeddedProcess& emb);

/// Probability vector on T. Support may be a strict subset.
class Prior {
 public:
  Prior() = default;

  /// Validates nonnegativity and |sum - 1| <= 1e-12.
  static Prior from_weights(std::vector<double> weights);
  /// Rescales nonnegative weights with positive sum.
  static Prior normalized(std::vector<double> weights);
  static Prior uniform(std::size_t n);
  static Prior point_mass(std::size_t n, std::size_t at);

  const std::vector<double>& weights() const { return weights_; }
  std::size_t size() const { return weights_.size(); }
  double operator[](std::size_t i) const { return weights_[i]; }

 private:
  explicit Prior(std::vector<double> w) : weights_(std::move(w)) {}
  std::vector<double> weights_;
};

/// Shannon entropy in nats, 0 log 0 = 0.
double entropy(const Prior& p);

}  // namespace mmt
