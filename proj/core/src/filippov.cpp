#include "occtime/filippov.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <utility>

#include "occtime/errors.hpp"

namespace occtime {

FilippovSystem::FilippovSystem(int dimension, HalfSpaceDrift left, HalfSpaceDrift right)
    : dimension_(dimension), left_(std::move(left)), right_(std::move(right)) {
  if (dimension_ < 2) {
    throw Error(ErrorKind::InvalidConfig, "FilippovSystem: dimension must be at least 2");
  }
  if (!left_ || !right_) {
    throw Error(ErrorKind::InvalidConfig, "FilippovSystem: both half-space drifts are required");
  }
}

FilippovSystem FilippovSystem::piecewise_affine(const MatrixXd& a_left, const VectorXd& c_left,
                                                const MatrixXd& a_right,
                                                const VectorXd& c_right) {
  const Eigen::Index n = a_left.rows();
  if (n < 2 || a_left.cols() != n || a_right.rows() != n || a_right.cols() != n ||
      c_left.size() != n || c_right.size() != n) {
    throw Error(ErrorKind::InvalidConfig,
                "piecewise_affine: A_L, A_R must be N x N and c_L, c_R of length N (N >= 2)");
  }
  auto affine = [](MatrixXd a, VectorXd c) {
    return [a = std::move(a), c = std::move(c)](double x, const VectorXd& y) -> VectorXd {
      return a.col(0) * x + a.rightCols(a.cols() - 1) * y + c;
    };
  };
  FilippovSystem system(static_cast<int>(n), affine(a_left, c_left), affine(a_right, c_right));
  system.affine_ = AffineDrifts{a_left, c_left, a_right, c_right};

  // Omega = (a_L b_R + a_R b_L)/(a_L + a_R) is a ratio of affine maps here,
  // so its Jacobian has a closed form.
  const VectorXd gl = a_left.row(0).tail(n - 1).transpose();
  const VectorXd gr = -a_right.row(0).tail(n - 1).transpose();
  const MatrixXd bl_jac = a_left.bottomRightCorner(n - 1, n - 1);
  const MatrixXd br_jac = a_right.bottomRightCorner(n - 1, n - 1);
  system.with_sliding_jacobian([=, left = system.left_, right = system.right_](const VectorXd& y) {
    const VectorXd zero_left = left(0.0, y);
    const VectorXd zero_right = right(0.0, y);
    const double al = zero_left(0);
    const double ar = -zero_right(0);
    const VectorXd bl = zero_left.tail(n - 1);
    const VectorXd br = zero_right.tail(n - 1);
    const double s = al + ar;
    const VectorXd num = al * br + ar * bl;
    // d(num)/dy = b_R gl^T + a_L Jbr + b_L gr^T + a_R Jbl
    const MatrixXd dnum = br * gl.transpose() + al * br_jac + bl * gr.transpose() + ar * bl_jac;
    const VectorXd ds = gl + gr;
    return MatrixXd(dnum / s - num * ds.transpose() / (s * s));
  });
  return system;
}

FilippovSystem FilippovSystem::builtin_example() {
  MatrixXd a(2, 2);
  a << -1.0, 1.0, -1.0, 0.0;
  FilippovSystem system = piecewise_affine(a, VectorXd::Constant(2, 1.0), a,
                                           (VectorXd(2) << -3.0, -2.0).finished());
  system.with_boundary_coefficients(
      [](const VectorXd& y) { return 1.0 + y(0); }, [](const VectorXd& y) { return 3.0 - y(0); },
      [](const VectorXd&) { return VectorXd::Constant(1, 1.0); },
      [](const VectorXd&) { return VectorXd::Constant(1, -2.0); });
  // Omega(y) = (1 - 3y)/4
  system.with_sliding_jacobian([](const VectorXd&) { return MatrixXd::Constant(1, 1, -0.75); });
  return system;
}

void FilippovSystem::check_y(const VectorXd& y) const {
  if (y.size() != dimension_ - 1) {
    std::ostringstream msg;
    msg << "FilippovSystem: y has length " << y.size() << ", expected " << dimension_ - 1;
    throw Error(ErrorKind::Domain, msg.str());
  }
}

VectorXd FilippovSystem::drift_left(double x, const VectorXd& y) const { return left_(x, y); }
VectorXd FilippovSystem::drift_right(double x, const VectorXd& y) const { return right_(x, y); }

VectorXd FilippovSystem::drift(double x, const VectorXd& y) const {
  return x < 0.0 ? left_(x, y) : right_(x, y);
}

double FilippovSystem::rate_left(const VectorXd& y) const {
  check_y(y);
  return rate_left_ ? rate_left_(y) : left_(0.0, y)(0);
}

double FilippovSystem::rate_right(const VectorXd& y) const {
  check_y(y);
  return rate_right_ ? rate_right_(y) : -right_(0.0, y)(0);
}

VectorXd FilippovSystem::parallel_left(const VectorXd& y) const {
  check_y(y);
  return parallel_left_ ? parallel_left_(y) : VectorXd(left_(0.0, y).tail(dimension_ - 1));
}

VectorXd FilippovSystem::parallel_right(const VectorXd& y) const {
  check_y(y);
  return parallel_right_ ? parallel_right_(y) : VectorXd(right_(0.0, y).tail(dimension_ - 1));
}

bool FilippovSystem::stable_sliding(const VectorXd& y) const {
  return rate_left(y) > 0.0 && rate_right(y) > 0.0;
}

FilippovSystem& FilippovSystem::with_boundary_coefficients(ScalarFieldY rate_left,
                                                           ScalarFieldY rate_right,
                                                           VectorFieldY parallel_left,
                                                           VectorFieldY parallel_right) {
  rate_left_ = std::move(rate_left);
  rate_right_ = std::move(rate_right);
  parallel_left_ = std::move(parallel_left);
  parallel_right_ = std::move(parallel_right);
  return *this;
}

FilippovSystem& FilippovSystem::with_sliding_jacobian(MatrixFieldY jacobian) {
  jacobian_ = std::move(jacobian);
  return *this;
}

void FilippovSystem::check_consistency(const VectorXd& y, double tol) const {
  check_y(y);
  const VectorXd l = left_(0.0, y);
  const VectorXd r = right_(0.0, y);
  const double err = std::max({std::abs(rate_left(y) - l(0)), std::abs(rate_right(y) + r(0)),
                               (parallel_left(y) - l.tail(dimension_ - 1)).cwiseAbs().maxCoeff(),
                               (parallel_right(y) - r.tail(dimension_ - 1)).cwiseAbs().maxCoeff()});
  if (err > tol) {
    std::ostringstream msg;
    msg << "FilippovSystem: boundary coefficients disagree with the drifts by " << err;
    throw Error(ErrorKind::InvalidConfig, msg.str());
  }
}

void NoiseSpec::validate(int dimension) const {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
    throw Error(ErrorKind::InvalidConfig, "NoiseSpec: epsilon must be positive");
  }
  if (matrix.rows() != dimension || matrix.cols() != dimension) {
    throw Error(ErrorKind::InvalidConfig, "NoiseSpec: D must be N x N");
  }
  if (!matrix.allFinite()) {
    throw Error(ErrorKind::InvalidConfig, "NoiseSpec: D must be finite");
  }
  if (!(alpha() > 0.0)) {
    throw Error(ErrorKind::InvalidConfig, "NoiseSpec: (D D^T)_11 must be positive");
  }
}

double NoiseSpec::alpha() const { return diffusion()(0, 0); }

VectorXd NoiseSpec::beta() const {
  const MatrixXd dd = diffusion();
  return dd.col(0).tail(dd.rows() - 1);
}

MatrixXd NoiseSpec::gamma() const {
  const MatrixXd dd = diffusion();
  return dd.bottomRightCorner(dd.rows() - 1, dd.cols() - 1);
}

MatrixXd NoiseSpec::parallel_block() const {
  return matrix.bottomRightCorner(matrix.rows() - 1, matrix.cols() - 1);
}

NoiseSpec NoiseSpec::builtin_example(double epsilon) {
  NoiseSpec noise;
  noise.epsilon = epsilon;
  noise.matrix = MatrixXd::Zero(2, 2);
  noise.matrix(0, 0) = 1.0;
  noise.matrix(1, 1) = 0.1;
  return noise;
}

}  // namespace occtime
