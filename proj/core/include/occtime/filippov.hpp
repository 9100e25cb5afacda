#pragma once

#include <Eigen/Core>
#include <functional>
#include <optional>

namespace occtime {

using Eigen::MatrixXd;
using Eigen::VectorXd;

/// Drift of one half-space as a function of the orthogonal coordinate x and
/// the parallel coordinates y (length N-1). Returns a vector of length N.
using HalfSpaceDrift = std::function<VectorXd(double, const VectorXd&)>;
using ScalarFieldY = std::function<double(const VectorXd&)>;
using VectorFieldY = std::function<VectorXd(const VectorXd&)>;
using MatrixFieldY = std::function<MatrixXd(const VectorXd&)>;

/// drift = A [x; y] + c on each side of x = 0.
struct AffineDrifts {
  MatrixXd a_left;
  VectorXd c_left;
  MatrixXd a_right;
  VectorXd c_right;
};

/// N-dimensional system with a drift discontinuity across x = 0.
///
/// The boundary coefficients default to the drifts evaluated on x = 0:
///   rate_left(y)  =  first component of drift_left(0, y),
///   rate_right(y) = -first component of drift_right(0, y),
///   parallel_left(y), parallel_right(y) = remaining components.
/// Analytic versions may be supplied; consistency with the drifts is checked
/// by check_consistency().
class FilippovSystem {
 public:
  FilippovSystem(int dimension, HalfSpaceDrift left, HalfSpaceDrift right);

  /// drift = A [x; y] + c on each side.
  static FilippovSystem piecewise_affine(const MatrixXd& a_left, const VectorXd& c_left,
                                         const MatrixXd& a_right, const VectorXd& c_right);

  /// The two-dimensional example
  ///   x < 0: (-x + y + 1, -x + 1),   x > 0: (-x + y - 3, -x - 2),
  /// whose stable sliding region is -1 < y < 3, with analytic coefficients
  /// and sliding Jacobian attached.
  static FilippovSystem builtin_example();

  int dimension() const noexcept { return dimension_; }
  int parallel_dimension() const noexcept { return dimension_ - 1; }

  VectorXd drift_left(double x, const VectorXd& y) const;
  VectorXd drift_right(double x, const VectorXd& y) const;
  /// Left branch for x < 0, right branch for x >= 0.
  VectorXd drift(double x, const VectorXd& y) const;

  double rate_left(const VectorXd& y) const;
  double rate_right(const VectorXd& y) const;
  VectorXd parallel_left(const VectorXd& y) const;
  VectorXd parallel_right(const VectorXd& y) const;

  /// Both rates strictly positive: the drifts point into x = 0 from both sides.
  bool stable_sliding(const VectorXd& y) const;

  FilippovSystem& with_boundary_coefficients(ScalarFieldY rate_left, ScalarFieldY rate_right,
                                             VectorFieldY parallel_left,
                                             VectorFieldY parallel_right);
  FilippovSystem& with_sliding_jacobian(MatrixFieldY jacobian);
  const MatrixFieldY& analytic_sliding_jacobian() const noexcept { return jacobian_; }
  /// Set for systems built by piecewise_affine() or builtin_example(); lets
  /// the simulator step without calling through std::function.
  const std::optional<AffineDrifts>& affine() const noexcept { return affine_; }

  /// Throws Error{InvalidConfig} if supplied coefficients disagree with the
  /// drifts at (0, y) by more than tol.
  void check_consistency(const VectorXd& y, double tol = 1e-10) const;

 private:
  void check_y(const VectorXd& y) const;

  int dimension_;
  HalfSpaceDrift left_;
  HalfSpaceDrift right_;
  ScalarFieldY rate_left_;
  ScalarFieldY rate_right_;
  VectorFieldY parallel_left_;
  VectorFieldY parallel_right_;
  MatrixFieldY jacobian_;
  std::optional<AffineDrifts> affine_;
};

/// Additive noise sqrt(epsilon) D dW. The blocks of D D^T are
///   [ alpha  beta^T ]
///   [ beta   gamma  ]
/// with alpha scalar, beta of length N-1 and gamma (N-1) x (N-1).
struct NoiseSpec {
  double epsilon = 0.1;
  MatrixXd matrix;

  void validate(int dimension) const;
  MatrixXd diffusion() const { return matrix * matrix.transpose(); }
  double alpha() const;
  VectorXd beta() const;
  MatrixXd gamma() const;
  /// Lower-right (N-1) x (N-1) block of D.
  MatrixXd parallel_block() const;

  /// D = diag(1, 1/10), the noise of builtin_example().
  static NoiseSpec builtin_example(double epsilon);
};

}  // namespace occtime
