#pragma once

#include <functional>
#include <span>

namespace occtime::numerics {

struct QuadratureSpec {
  double abs_tol = 1e-10;
  double rel_tol = 1e-8;
  int max_subdivisions = 200;

  /// Throws Error{Domain} unless both tolerances are positive and at least
  /// one subdivision is allowed.
  void validate() const;
};

/// Which endpoints carry an integrable 1/sqrt singularity.
enum class Singularity { none, inv_sqrt_left, inv_sqrt_right, inv_sqrt_both };

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;
  int subdivisions = 0;
};

using Integrand = std::function<double(double)>;

/// Globally adaptive 15-point Gauss-Kronrod quadrature on [a, b].
///
/// The inv_sqrt modes substitute x = a + u^2 and/or x = b - u^2 before
/// adapting, which turns integrands behaving like (x-a)^{-1/2} into bounded
/// ones. For inv_sqrt_both the interval is split at the midpoint.
///
/// Throws NonConvergenceError (carrying the best estimate) when the error
/// estimate is still above max(abs_tol, rel_tol * |value|) after
/// max_subdivisions bisections.
QuadratureResult integrate_detailed(const Integrand& f, double a, double b,
                                    const QuadratureSpec& spec = {},
                                    Singularity singularity = Singularity::none);

double integrate(const Integrand& f, double a, double b, const QuadratureSpec& spec = {},
                 Singularity singularity = Singularity::none);

/// Same contract as integrate() but the adaptive loop starts from the
/// partition given by `points` (sorted, first and last are the limits).
/// Use it to hand the integrator features it would otherwise have to find,
/// such as a narrow peak in the middle of a long interval.
double integrate_with_breakpoints(const Integrand& f, std::span<const double> points,
                                  const QuadratureSpec& spec = {},
                                  Singularity singularity = Singularity::none);

/// Integral of f over (a, inf).
///
/// The integrand's mass scale L is located by a geometric pre-scan of |f|;
/// (a, a+L) is integrated directly (honouring `left`, which may only be none
/// or inv_sqrt_left) and (a+L, inf) through x = a + L + L u/(1-u).
double integrate_semi_infinite(const Integrand& f, double a, const QuadratureSpec& spec = {},
                               Singularity left = Singularity::none);

}  // namespace occtime::numerics
