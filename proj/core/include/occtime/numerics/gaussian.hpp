#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Core>

namespace occtime::numerics {

struct GaussianSpec {
  Eigen::VectorXd mean;
  Eigen::MatrixXd covariance;

  /// Checks shape, symmetry (1e-12 relative) and PSD-ness up to
  /// -1e-12 * trace; throws Error{Domain}.
  void validate() const;
};

/// Multivariate normal density with the Cholesky factor computed once.
/// Throws Error{SingularCovariance} when the covariance is not strictly
/// positive definite.
class GaussianKernel {
 public:
  explicit GaussianKernel(const GaussianSpec& spec);

  double operator()(const Eigen::VectorXd& point) const;
  /// Density of a zero-mean deviation, skipping the mean subtraction.
  double at_offset(const Eigen::VectorXd& offset) const;
  /// Mahalanobis inner product u^T C^{-1} v.
  double inner(const Eigen::VectorXd& u, const Eigen::VectorXd& v) const;

  Eigen::Index dimension() const noexcept { return mean_.size(); }

 private:
  Eigen::VectorXd mean_;
  Eigen::LLT<Eigen::MatrixXd> chol_;
  double log_norm_;
};

double gaussian_pdf(const Eigen::VectorXd& point, const GaussianSpec& spec);

/// Scalar normal density, for the many one-dimensional call sites.
double normal_pdf(double x, double mean, double variance);

}  // namespace occtime::numerics
