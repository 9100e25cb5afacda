#pragma once

#include <vector>

#include "occtime/numerics/quadrature.hpp"

namespace occtime {

using numerics::QuadratureSpec;

/// Brownian motion with two-valued drift,
///
///   dx = +rate_left dt + sqrt(diffusion_scale) dW   for x < 0,
///   dx = -rate_right dt + sqrt(diffusion_scale) dW  for x > 0,
///
/// started at x0 and observed up to `horizon`. Positive rates point toward 0.
/// The occupation time is the time spent in [0, inf) during [0, horizon].
struct TwoValuedDriftSpec {
  double rate_left = 0.0;
  double rate_right = 0.0;
  double x0 = 0.0;
  double horizon = 1.0;
  double diffusion_scale = 1.0;

  void validate() const;
};

/// Occupation-time law evaluated at one tau: the continuous part plus the
/// point masses at tau = 0 (never reached [0, inf)) and tau = horizon
/// (never left it).
struct OccupationDensity {
  double density = 0.0;
  double atom_at_zero = 0.0;
  double atom_at_horizon = 0.0;
};

/// Exact density of the occupation time for x0 = 0.
///
/// Six closed-form terms, two of which carry an integral (see fcal()). Every
/// exponential-times-erfc product goes through erfcx so that large drifts or
/// horizons do not overflow. Cancellation residue down to -1e-10 times the
/// largest term is clamped to 0; anything more negative is reported as
/// NonConvergence. At tau == 0 or tau == horizon returns +inf (the density
/// has an integrable 1/sqrt singularity there); outside [0, horizon] throws
/// Error{Domain}. diffusion_scale != 1 is handled by the exact rescaling
/// x -> x/s, t -> t/s.
double occupation_pdf_zero(double tau, const TwoValuedDriftSpec& spec,
                           const QuadratureSpec& quad = {});

/// The integral term of the x0 = 0 density:
///   a_L (2a_L + a_R) / (2 sqrt(pi)) * int_0^{t-tau} [ ... ] dz,
/// evaluated after z = w^2 so the 1/sqrt(z) endpoint behaviour disappears.
double fcal(double tau, double horizon, double rate_left, double rate_right,
            const QuadratureSpec& quad = {});

/// First-passage density to 0 of dx = drift dt + dW from x0:
///   |x0| / sqrt(2 pi s^3) exp(-(x0 + drift s)^2 / (2s)).
/// Defective (mass e^{-x0 drift - |x0 drift|}) when drift points away.
double first_passage_pdf(double s, double x0, double drift);

/// P(first passage to 0 happens by time t), closed form.
double first_passage_cdf(double t, double x0, double drift);

/// Density and atoms for arbitrary x0 by conditioning on the first visit to 0.
/// For x0 < 0:
///   density(tau) = int_0^{t-tau} h(s; x0, a_L) p0(tau; t-s) ds,
///   atom_at_zero = 1 - P(hit by t);
/// for x0 > 0 the mirrored form with atom_at_horizon. For x0 = 0 delegates to
/// occupation_pdf_zero with both atoms 0.
OccupationDensity occupation_pdf_general(double tau, const TwoValuedDriftSpec& spec,
                                         const QuadratureSpec& quad = {});

/// Large-horizon form of the x0 = 0 density. Dispatches on the signs of the
/// rates: both positive gives a Gaussian with mean a_L t/(a_L+a_R) and
/// standard deviation sqrt(t)/(a_L+a_R); otherwise combinations of gcal().
/// Throws Error{Domain} when either rate is exactly 0.
double occupation_pdf_longtime(double tau, double horizon, double rate_left,
                               double rate_right);

/// Boundary-layer density used by the long-time form; requires tau > 0 and
/// rate_left < 0.
double gcal(double tau, double rate_left, double rate_right);

/// Levy's arc-sine density 1/(pi sqrt(tau (t - tau))).
double arcsine_pdf(double tau, double horizon);

/// Closed form for constant drift a (rate_left = -a, rate_right = a).
double constant_drift_pdf(double tau, double horizon, double drift);

/// Tabulated CDF of the x0 = 0 occupation time, accurate enough to drive
/// Kolmogorov-Smirnov comparisons. Nodes are placed uniformly in
/// theta with tau = t sin^2(theta), which makes the integrand bounded.
class OccupationCdf {
 public:
  OccupationCdf(const TwoValuedDriftSpec& spec, int nodes = 2000,
                const QuadratureSpec& quad = {});

  double operator()(double tau) const;
  /// Mass of the continuous part; 1 up to quadrature error for x0 = 0.
  double total() const noexcept { return cumulative_.back(); }

 private:
  double horizon_;
  std::vector<double> thetas_;
  std::vector<double> cumulative_;
};

}  // namespace occtime
