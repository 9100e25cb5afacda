#include "occtime/occupation.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <string>

#include "occtime/errors.hpp"
#include "occtime/numerics/special.hpp"

namespace occtime {

namespace {

using numerics::exp_erfc;
using numerics::integrate_detailed;
using numerics::QuadratureResult;
using numerics::Singularity;

constexpr double kPi = std::numbers::pi;
constexpr double kSqrt2 = std::numbers::sqrt2;
constexpr double kInf = std::numeric_limits<double>::infinity();

// Residue of cancelling terms below this (relative to the largest term) is
// treated as zero.
constexpr double kNegativeSlack = 1e-10;

void check_tau(double tau, double horizon, const char* who) {
  if (!(horizon > 0.0) || !std::isfinite(horizon)) {
    throw Error(ErrorKind::Domain, std::string(who) + ": horizon must be positive");
  }
  if (!(tau >= 0.0 && tau <= horizon)) {
    std::ostringstream msg;
    msg << who << ": tau = " << tau << " outside [0, " << horizon << "]";
    throw Error(ErrorKind::Domain, msg.str());
  }
}

bool at_endpoint(double tau, double horizon) { return tau == 0.0 || tau == horizon; }

// fcal with its quadrature error, so callers can size the clamp slack.
QuadratureResult fcal_detailed(double tau, double horizon, double a_l, double a_r,
                               const QuadratureSpec& quad) {
  const double prefactor = a_l * (2.0 * a_l + a_r) / (2.0 * std::sqrt(kPi));
  const double upper = std::sqrt(horizon - tau);
  if (prefactor == 0.0 || upper == 0.0) return {};

  const double sqrt_tau = std::sqrt(tau);
  const double decay = std::exp(-0.5 * a_r * a_r * tau);
  const double sum = a_l + a_r;
  auto integrand = [=](double w) {
    const double z = w * w;
    const double zt = z + tau;
    const double first =
        -2.0 * sqrt_tau * decay * std::exp(-0.5 * a_l * a_l * z) / (std::sqrt(kPi) * zt);
    const double drift = a_l * z - a_r * tau;
    const double second = 2.0 * w * drift / (kSqrt2 * zt * std::sqrt(zt)) *
                          exp_erfc(-drift * drift / (2.0 * zt),
                                   -sum * std::sqrt(z * tau / (2.0 * zt)));
    return first + second;
  };

  // The first piece has width sqrt(tau) in w; seed the partition with it and
  // with the exponential decay length so neither feature is stepped over.
  std::vector<double> points{0.0};
  for (double w = sqrt_tau; w < upper; w *= 8.0) points.push_back(w);
  if (a_l != 0.0) {
    const double w_decay = 2.0 / std::abs(a_l);
    if (w_decay < upper) points.push_back(w_decay);
  }
  points.push_back(upper);
  std::sort(points.begin(), points.end());
  points.erase(std::unique(points.begin(), points.end(),
                           [](double a, double b) { return b - a <= 1e-14 * std::max(1.0, b); }),
               points.end());

  QuadratureResult r{};
  for (std::size_t i = 0; i + 1 < points.size(); ++i) {
    const QuadratureResult piece =
        integrate_detailed(integrand, points[i], points[i + 1], quad);
    r.value += piece.value;
    r.error += piece.error;
    r.subdivisions += piece.subdivisions;
  }
  r.value *= prefactor;
  r.error *= std::abs(prefactor);
  return r;
}

// Unit-diffusion density at x0 = 0 for 0 < tau < horizon.
double density_unit(double tau, double horizon, double a_l, double a_r,
                    const QuadratureSpec& quad) {
  const double rest = horizon - tau;
  const double sum = a_l + a_r;

  std::array<double, 6> terms{};
  terms[0] = std::exp(-0.5 * a_l * a_l * rest - 0.5 * a_r * a_r * tau) /
             (kPi * std::sqrt(tau * rest));
  terms[1] = a_r == 0.0 ? 0.0
                        : -a_r * exp_erfc(-0.5 * a_l * a_l * rest, a_r * std::sqrt(0.5 * tau)) /
                              std::sqrt(2.0 * kPi * rest);
  terms[2] = a_l == 0.0 ? 0.0
                        : -a_l * exp_erfc(-0.5 * a_r * a_r * tau, a_l * std::sqrt(0.5 * rest)) /
                              std::sqrt(2.0 * kPi * tau);
  if (sum != 0.0) {
    const double centred = sum * tau - a_l * horizon;
    terms[3] = kSqrt2 * sum / std::sqrt(kPi * horizon) *
               exp_erfc(-centred * centred / (2.0 * horizon),
                        -sum * std::sqrt(tau * rest / (2.0 * horizon)));
  }
  const QuadratureResult f_left = fcal_detailed(tau, horizon, a_l, a_r, quad);
  const QuadratureResult f_right = fcal_detailed(rest, horizon, a_r, a_l, quad);
  terms[4] = f_left.value;
  terms[5] = f_right.value;

  double total = 0.0;
  double scale = 0.0;
  for (double term : terms) {
    total += term;
    scale = std::max(scale, std::abs(term));
  }
  if (!std::isfinite(total)) {
    throw Error(ErrorKind::NonFinite, "occupation_pdf_zero: non-finite density");
  }
  if (total < 0.0) {
    const double slack =
        kNegativeSlack * std::max(1.0, scale) + 10.0 * (f_left.error + f_right.error);
    if (total < -slack) {
      std::ostringstream msg;
      msg << "occupation_pdf_zero: density " << total << " at tau = " << tau
          << " is negative beyond cancellation slack " << slack;
      throw NonConvergenceError(msg.str(), total, slack);
    }
    total = 0.0;
  }
  return total;
}

// Breakpoints at the mode of h(s; x0, drift) and a decade either side, so the
// adaptive loop sees the peak even when it is narrow compared to the range.
std::vector<double> first_passage_breakpoints(double x0, double drift, double upper) {
  const double a2 = drift * drift;
  const double mode = a2 == 0.0 ? x0 * x0 / 3.0
                                : (-3.0 + std::sqrt(9.0 + 4.0 * a2 * x0 * x0)) / (2.0 * a2);
  std::vector<double> points{0.0};
  for (double f : {0.1, 0.3, 1.0, 3.0, 10.0}) {
    const double s = f * mode;
    if (s > 0.0 && s < upper * (1.0 - 1e-9)) points.push_back(s);
  }
  points.push_back(upper);
  return points;
}

TwoValuedDriftSpec unit_scaled(const TwoValuedDriftSpec& spec) {
  TwoValuedDriftSpec unit = spec;
  const double s = spec.diffusion_scale;
  unit.x0 = spec.x0 / s;
  unit.horizon = spec.horizon / s;
  unit.diffusion_scale = 1.0;
  return unit;
}

}  // namespace

void TwoValuedDriftSpec::validate() const {
  if (!std::isfinite(rate_left) || !std::isfinite(rate_right) || !std::isfinite(x0)) {
    throw Error(ErrorKind::Domain, "TwoValuedDriftSpec: rates and x0 must be finite");
  }
  if (!(horizon > 0.0) || !std::isfinite(horizon)) {
    throw Error(ErrorKind::Domain, "TwoValuedDriftSpec: horizon must be positive");
  }
  if (!(diffusion_scale > 0.0) || !std::isfinite(diffusion_scale)) {
    throw Error(ErrorKind::Domain, "TwoValuedDriftSpec: diffusion_scale must be positive");
  }
}

double fcal(double tau, double horizon, double rate_left, double rate_right,
            const QuadratureSpec& quad) {
  check_tau(tau, horizon, "fcal");
  return fcal_detailed(tau, horizon, rate_left, rate_right, quad).value;
}

double occupation_pdf_zero(double tau, const TwoValuedDriftSpec& spec,
                           const QuadratureSpec& quad) {
  spec.validate();
  check_tau(tau, spec.horizon, "occupation_pdf_zero");
  if (spec.x0 != 0.0) {
    throw Error(ErrorKind::Domain, "occupation_pdf_zero: requires x0 = 0");
  }
  if (at_endpoint(tau, spec.horizon)) return kInf;
  const double s = spec.diffusion_scale;
  return density_unit(tau / s, spec.horizon / s, spec.rate_left, spec.rate_right, quad) / s;
}

double first_passage_pdf(double s, double x0, double drift) {
  if (x0 == 0.0 || !std::isfinite(x0)) {
    throw Error(ErrorKind::Domain, "first_passage_pdf: x0 must be non-zero and finite");
  }
  if (s < 0.0 || std::isnan(s)) {
    throw Error(ErrorKind::Domain, "first_passage_pdf: s must be non-negative");
  }
  if (s == 0.0 || std::isinf(s)) return 0.0;
  const double d = x0 + drift * s;
  const double exponent = -d * d / (2.0 * s);
  if (exponent < -700.0) return 0.0;
  return std::abs(x0) / std::sqrt(2.0 * kPi * s * s * s) * std::exp(exponent);
}

double first_passage_cdf(double t, double x0, double drift) {
  if (x0 == 0.0 || !std::isfinite(x0)) {
    throw Error(ErrorKind::Domain, "first_passage_cdf: x0 must be non-zero and finite");
  }
  if (!(t > 0.0)) return 0.0;
  const double dist = std::abs(x0);
  const double toward = x0 < 0.0 ? drift : -drift;
  const double root = std::sqrt(2.0 * t);
  const double p = 0.5 * numerics::erfc((dist - toward * t) / root) +
                   0.5 * exp_erfc(2.0 * toward * dist, (dist + toward * t) / root);
  return std::clamp(p, 0.0, 1.0);
}

OccupationDensity occupation_pdf_general(double tau, const TwoValuedDriftSpec& spec,
                                         const QuadratureSpec& quad) {
  spec.validate();
  check_tau(tau, spec.horizon, "occupation_pdf_general");
  const TwoValuedDriftSpec unit = unit_scaled(spec);
  const double s = spec.diffusion_scale;
  const double t = unit.horizon;
  const double u = tau / s;
  const double a_l = unit.rate_left;
  const double a_r = unit.rate_right;

  OccupationDensity out;
  if (unit.x0 == 0.0) {
    out.density = at_endpoint(tau, spec.horizon) ? kInf : density_unit(u, t, a_l, a_r, quad) / s;
    return out;
  }

  if (unit.x0 < 0.0) {
    const double x0 = unit.x0;
    out.atom_at_zero = 1.0 - first_passage_cdf(t, x0, a_l);
    if (at_endpoint(tau, spec.horizon)) {
      out.density = kInf;
      return out;
    }
    // Hit 0 at time s, then run the x0 = 0 law on the remaining t - s; that
    // law vanishes unless u <= t - s.
    const double upper = t - u;
    auto integrand = [&](double hit) {
      const double remaining = t - hit;
      if (!(u < remaining)) return 0.0;
      return first_passage_pdf(hit, x0, a_l) * density_unit(u, remaining, a_l, a_r, quad);
    };
    const auto points = first_passage_breakpoints(x0, a_l, upper);
    out.density =
        numerics::integrate_with_breakpoints(integrand, points, quad, Singularity::inv_sqrt_right) /
        s;
    return out;
  }

  const double x0 = unit.x0;
  out.atom_at_horizon = 1.0 - first_passage_cdf(t, x0, -a_r);
  if (at_endpoint(tau, spec.horizon)) {
    out.density = kInf;
    return out;
  }
  // Time before the first visit counts as occupation: the remaining law is
  // evaluated at u - s on the remaining horizon t - s.
  const double upper = u;
  auto integrand = [&](double hit) {
    const double rem_tau = u - hit;
    if (!(rem_tau > 0.0)) return 0.0;
    return first_passage_pdf(hit, x0, -a_r) * density_unit(rem_tau, t - hit, a_l, a_r, quad);
  };
  const auto points = first_passage_breakpoints(x0, -a_r, upper);
  out.density =
      numerics::integrate_with_breakpoints(integrand, points, quad, Singularity::inv_sqrt_right) /
      s;
  return out;
}

double gcal(double tau, double rate_left, double rate_right) {
  if (!(tau > 0.0) || !std::isfinite(tau)) {
    throw Error(ErrorKind::Domain, "gcal: tau must be positive");
  }
  if (!(rate_left < 0.0)) {
    throw Error(ErrorKind::Domain, "gcal: requires rate_left < 0");
  }
  const double a_l = rate_left;
  const double a_r = rate_right;
  const double singular =
      -kSqrt2 * a_l / std::sqrt(kPi * tau) * std::exp(-0.5 * a_r * a_r * tau);
  const double k = 2.0 * a_l + a_r;
  const double tail =
      k == 0.0 ? 0.0
               : -a_l * k * exp_erfc(2.0 * a_l * (a_l + a_r) * tau, -k * std::sqrt(0.5 * tau));
  return singular + tail;
}

double occupation_pdf_longtime(double tau, double horizon, double rate_left,
                               double rate_right) {
  check_tau(tau, horizon, "occupation_pdf_longtime");
  if (rate_left == 0.0 || rate_right == 0.0) {
    throw Error(ErrorKind::Domain,
                "occupation_pdf_longtime: long-time form needs both rates non-zero");
  }
  if (rate_left > 0.0 && rate_right > 0.0) {
    const double sum = rate_left + rate_right;
    const double centred = sum * tau - rate_left * horizon;
    return sum / std::sqrt(2.0 * kPi * horizon) * std::exp(-centred * centred / (2.0 * horizon));
  }
  if (at_endpoint(tau, horizon)) return kInf;
  double value = 0.0;
  if (rate_left < 0.0) value += gcal(tau, rate_left, rate_right);
  if (rate_right < 0.0) value += gcal(horizon - tau, rate_right, rate_left);
  return value;
}

double arcsine_pdf(double tau, double horizon) {
  check_tau(tau, horizon, "arcsine_pdf");
  if (at_endpoint(tau, horizon)) return kInf;
  return 1.0 / (kPi * std::sqrt(tau * (horizon - tau)));
}

double constant_drift_pdf(double tau, double horizon, double drift) {
  check_tau(tau, horizon, "constant_drift_pdf");
  if (at_endpoint(tau, horizon)) return kInf;
  const double a = drift;
  const double rest = horizon - tau;
  const double left = std::exp(-0.5 * a * a * tau) / std::sqrt(kPi * tau) -
                      a / kSqrt2 * numerics::erfc(a * std::sqrt(0.5 * tau));
  const double right = std::exp(-0.5 * a * a * rest) / std::sqrt(kPi * rest) +
                       a / kSqrt2 * numerics::erfc(-a * std::sqrt(0.5 * rest));
  return left * right;
}

OccupationCdf::OccupationCdf(const TwoValuedDriftSpec& spec, int nodes,
                             const QuadratureSpec& quad)
    : horizon_(spec.horizon) {
  spec.validate();
  if (nodes < 2) throw Error(ErrorKind::Domain, "OccupationCdf: need at least two nodes");
  const double t = spec.horizon;
  const OccupationDensity atoms = occupation_pdf_general(0.5 * t, spec, quad);

  // tau = t sin^2(theta): dtau = t sin(2 theta) dtheta cancels both 1/sqrt ends.
  auto integrand = [&](double theta) {
    const double sn = std::sin(theta);
    const double tau = std::clamp(t * sn * sn, 0.0, t);
    if (tau <= 0.0 || tau >= t) return 0.0;
    const double p = spec.x0 == 0.0 ? occupation_pdf_zero(tau, spec, quad)
                                    : occupation_pdf_general(tau, spec, quad).density;
    return p * t * std::sin(2.0 * theta);
  };

  thetas_.resize(static_cast<std::size_t>(nodes) + 1);
  cumulative_.resize(thetas_.size());
  const double step = 0.5 * kPi / nodes;
  thetas_[0] = 0.0;
  cumulative_[0] = atoms.atom_at_zero;
  for (int k = 1; k <= nodes; ++k) {
    thetas_[k] = k == nodes ? 0.5 * kPi : k * step;
    cumulative_[k] = cumulative_[k - 1] + numerics::integrate(integrand, thetas_[k - 1], thetas_[k], quad);
  }
}

double OccupationCdf::operator()(double tau) const {
  if (tau < 0.0) return 0.0;
  if (tau >= horizon_) return 1.0;
  const double theta = std::asin(std::sqrt(tau / horizon_));
  auto it = std::upper_bound(thetas_.begin(), thetas_.end(), theta);
  const auto i = static_cast<std::size_t>(std::max<std::ptrdiff_t>(it - thetas_.begin() - 1, 0));
  if (i + 1 >= thetas_.size()) return cumulative_.back();
  const double w = (theta - thetas_[i]) / (thetas_[i + 1] - thetas_[i]);
  return std::clamp(cumulative_[i] + w * (cumulative_[i + 1] - cumulative_[i]), 0.0, 1.0);
}

}  // namespace occtime
