#include "occtime/numerics/gaussian.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <numbers>

#include "occtime/errors.hpp"

namespace occtime::numerics {

void GaussianSpec::validate() const {
  const Eigen::Index m = mean.size();
  if (m == 0 || covariance.rows() != m || covariance.cols() != m) {
    throw Error(ErrorKind::Domain, "GaussianSpec: covariance must be m x m with m = mean size");
  }
  const double scale = std::max(1.0, covariance.cwiseAbs().maxCoeff());
  if ((covariance - covariance.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw Error(ErrorKind::Domain, "GaussianSpec: covariance is not symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(covariance, Eigen::EigenvaluesOnly);
  if (eig.eigenvalues().minCoeff() < -1e-12 * std::abs(covariance.trace())) {
    throw Error(ErrorKind::Domain, "GaussianSpec: covariance is not positive semidefinite");
  }
}

GaussianKernel::GaussianKernel(const GaussianSpec& spec)
    : mean_(spec.mean), chol_(spec.covariance) {
  spec.validate();
  if (chol_.info() != Eigen::Success) {
    throw Error(ErrorKind::SingularCovariance, "gaussian_pdf: Cholesky factorisation failed");
  }
  const Eigen::VectorXd diag = chol_.matrixLLT().diagonal();
  if ((diag.array() <= 0.0).any()) {
    throw Error(ErrorKind::SingularCovariance, "gaussian_pdf: covariance is singular");
  }
  const double m = static_cast<double>(mean_.size());
  log_norm_ = -0.5 * m * std::log(2.0 * std::numbers::pi) - diag.array().log().sum();
}

double GaussianKernel::at_offset(const Eigen::VectorXd& offset) const {
  const Eigen::VectorXd z = chol_.matrixL().solve(offset);
  return std::exp(log_norm_ - 0.5 * z.squaredNorm());
}

double GaussianKernel::operator()(const Eigen::VectorXd& point) const {
  return at_offset(point - mean_);
}

double GaussianKernel::inner(const Eigen::VectorXd& u, const Eigen::VectorXd& v) const {
  return u.dot(chol_.solve(v));
}

double gaussian_pdf(const Eigen::VectorXd& point, const GaussianSpec& spec) {
  return GaussianKernel(spec)(point);
}

double normal_pdf(double x, double mean, double variance) {
  const double d = x - mean;
  return std::exp(-0.5 * d * d / variance) / std::sqrt(2.0 * std::numbers::pi * variance);
}

}  // namespace occtime::numerics
