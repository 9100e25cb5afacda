#pragma once

#include <Eigen/Core>
#include <vector>

#include "occtime/filippov.hpp"
#include "occtime/numerics/gaussian.hpp"
#include "occtime/numerics/ode.hpp"

namespace occtime {

/// Filippov sliding field (a_L b_R + a_R b_L)/(a_L + a_R).
/// Throws Error{NotStableSliding} unless a_L(y) > 0 and a_R(y) > 0.
VectorXd sliding_vector_field(const FilippovSystem& system, const VectorXd& y);

/// Jacobian of the sliding field. Uses the system's analytic Jacobian when one
/// is attached, else central differences with h_i = 1e-6 max(1, |y_i|). A
/// probe outside the sliding region shrinks the step tenfold once before
/// giving up with Error{NotStableSliding}.
MatrixXd sliding_jacobian(const FilippovSystem& system, const VectorXd& y);

/// M(y) = [ -(b_L - b_R)/(a_L + a_R) | I ] D, of shape (N-1) x N.
MatrixXd noise_matrix(const FilippovSystem& system, const NoiseSpec& noise, const VectorXd& y);

struct SlidingState {
  double t = 0.0;
  VectorXd y;
  MatrixXd theta;
};

/// RK4 solution of y' = Omega(y). A non-positive step selects t/2000.
/// Throws LeftSlidingRegionError with an interpolated exit time if a node
/// leaves the stable sliding region.
numerics::Trajectory sliding_solution(const FilippovSystem& system, const VectorXd& y0,
                                      double t, double step = 0.0);

/// y_S together with the covariance of the linearised fluctuation,
///   Theta' = A Theta + Theta A^T + M M^T,  A = DOmega(y_S),  Theta(0) = 0,
/// integrated jointly.
class SlidingTrajectory {
 public:
  SlidingTrajectory(numerics::Trajectory raw, Eigen::Index parallel_dimension);

  double end_time() const noexcept { return raw_.end_time(); }
  SlidingState at(double t) const;
  SlidingState final_state() const { return at(end_time()); }
  /// The RK4 nodes, unpacked.
  std::vector<SlidingState> nodes() const;

 private:
  SlidingState unpack(double t, const numerics::State& s) const;

  numerics::Trajectory raw_;
  Eigen::Index m_;
};

SlidingTrajectory covariance(const FilippovSystem& system, const NoiseSpec& noise,
                             const VectorXd& y0, double t, double step = 0.0);

/// Long-time density at one time, coefficients frozen at y_S(t):
///
///   q(x, y) = N(y; y_S, eps Theta) * K * exp(2 a_L x/(eps alpha))   x < 0
///                                  * K * exp(-2 a_R x/(eps alpha))  x >= 0
///
/// with K = 2 a_L a_R / (alpha eps (a_L + a_R)). x and y are independent.
class LongTimeDensity {
 public:
  LongTimeDensity(const FilippovSystem& system, const NoiseSpec& noise,
                  const SlidingState& state);

  double joint(double x, const VectorXd& y) const { return marginal_x(x) * marginal_y(y); }
  double marginal_x(double x) const;
  double marginal_y(const VectorXd& y) const { return kernel_(y); }

  double rate_left() const noexcept { return rate_left_; }
  double rate_right() const noexcept { return rate_right_; }
  /// Mass of the x-marginal on x > 0, a_L/(a_L + a_R).
  double mass_right() const noexcept { return rate_left_ / (rate_left_ + rate_right_); }
  const SlidingState& state() const noexcept { return state_; }

 private:
  SlidingState state_;
  double rate_left_;
  double rate_right_;
  double scale_;  // eps alpha
  numerics::GaussianKernel kernel_;
};

double longtime_pdf(double x, const VectorXd& y, double t, const FilippovSystem& system,
                    const NoiseSpec& noise, const VectorXd& y0, double step = 0.0);
double longtime_marginal_y(const VectorXd& y, double t, const FilippovSystem& system,
                           const NoiseSpec& noise, const VectorXd& y0, double step = 0.0);
double longtime_marginal_x(double x, double t, const FilippovSystem& system,
                           const NoiseSpec& noise, const VectorXd& y0, double step = 0.0);

}  // namespace occtime
