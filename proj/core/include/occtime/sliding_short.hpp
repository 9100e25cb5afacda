#pragma once

#include <Eigen/Core>

#include "occtime/filippov.hpp"
#include "occtime/numerics/quadrature.hpp"

namespace occtime {

using numerics::QuadratureSpec;

/// Drift coefficients frozen at the initial point (0, y0) together with the
/// noise blocks. Over short horizons the system is then piecewise constant:
/// x is Brownian motion with two-valued drift and y moves by the occupation
/// time on each side.
struct FrozenDriftParams {
  double rate_left = 0.0;
  double rate_right = 0.0;
  VectorXd parallel_left;
  VectorXd parallel_right;
  VectorXd y0;
  double epsilon = 0.1;
  double alpha = 1.0;
  MatrixXd gamma;
  VectorXd beta;

  void validate() const;
  /// epsilon * alpha: the diffusion scale of the orthogonal coordinate.
  double orthogonal_scale() const noexcept { return epsilon * alpha; }
};

/// Evaluates the boundary drifts at (0, y0) and splits D D^T into blocks.
/// Throws Error{NotStableSliding} unless both rates are positive at y0.
FrozenDriftParams frozen_params_from_system(const FilippovSystem& system,
                                            const NoiseSpec& noise, const VectorXd& y0);

/// Density of the occupation time of x on [0, t] under the frozen drift:
/// (1/(eps alpha)) p(tau/(eps alpha); t/(eps alpha); 0, a_L, a_R).
double scaled_occupation_pdf(double tau, double t, const FrozenDriftParams& params,
                             const QuadratureSpec& quad = {});

/// Transitional density of x(t) for the frozen system (x(0) = 0).
///
/// Iterated integral over the first-passage time s in (0, t) and the level b
/// in (0, inf). The first-passage densities use the drift pointing toward
/// x = 0 on each side; both branches coincide at x = 0.
double orthogonal_pdf(double x, double t, const FrozenDriftParams& params,
                      const QuadratureSpec& quad = {});

/// Density of y(t) for the frozen system with independent x and y noise.
///
///   q(y) = int_0^t p_scaled(tau) N(y; y0 + b_L t + (b_R - b_L) tau, eps t gamma) dtau
///
/// which is the line density along the occupation-time direction convolved
/// with the Gaussian of the parallel noise. When b_L == b_R the occupation
/// time drops out and the result is that Gaussian. Throws
/// Error{IndependenceViolated} when |beta| > 1e-12.
double parallel_pdf(const VectorXd& y, double t, const FrozenDriftParams& params,
                    const QuadratureSpec& quad = {});

}  // namespace occtime
