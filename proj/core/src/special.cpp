#include "occtime/numerics/special.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "occtime/errors.hpp"

namespace occtime {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::Domain: return "DomainError";
    case ErrorKind::NonConvergence: return "NonConvergence";
    case ErrorKind::Overflow: return "Overflow";
    case ErrorKind::NonFinite: return "NonFinite";
    case ErrorKind::SingularCovariance: return "SingularCovariance";
    case ErrorKind::NotStableSliding: return "NotStableSliding";
    case ErrorKind::LeftSlidingRegion: return "LeftSlidingRegion";
    case ErrorKind::IndependenceViolated: return "IndependenceViolated";
    case ErrorKind::EmptyRange: return "EmptyRange";
    case ErrorKind::MismatchedGrids: return "MismatchedGrids";
    case ErrorKind::InvalidConfig: return "InvalidConfig";
    case ErrorKind::Io: return "IoError";
  }
  return "Unknown";
}

namespace numerics {

namespace {

// Beyond this point erfc(x) is below 1e-64 and the continued fraction
// converges in a few dozen terms.
constexpr double kContinuedFractionStart = 12.0;

// e^{x^2} with the rounding error of x*x recovered through fma, so the
// relative error stays near one ulp even when x^2 is in the hundreds.
double exp_square(double x) {
  const double hi = x * x;
  const double lo = std::fma(x, x, -hi);
  return std::exp(hi) * (1.0 + lo);
}

// Lentz evaluation of
//   erfcx(x) = 1/sqrt(pi) * 1/(x + (1/2)/(x + 1/(x + (3/2)/(x + ...))))
double erfcx_continued_fraction(double x) {
  constexpr double tiny = 1e-300;
  double f = x;
  double c = x;
  double d = 0.0;
  for (int k = 1; k < 200; ++k) {
    const double a = 0.5 * k;
    d = x + a * d;
    if (d == 0.0) d = tiny;
    c = x + a / c;
    if (c == 0.0) c = tiny;
    d = 1.0 / d;
    const double delta = c * d;
    f *= delta;
    if (std::abs(delta - 1.0) < 1e-16) break;
  }
  return std::numbers::inv_sqrtpi / f;
}

}  // namespace

double erfc(double x) noexcept { return std::erfc(x); }

double erfcx(double x) {
  if (std::isnan(x)) return x;
  if (x >= kContinuedFractionStart) return erfcx_continued_fraction(x);
  if (x >= 0.0) return exp_square(x) * std::erfc(x);

  // erfcx(-|x|) = 2 e^{x^2} - erfcx(|x|)
  const double big = exp_square(x);
  if (!std::isfinite(big)) {
    throw Error(ErrorKind::Overflow, "erfcx: e^{x^2} erfc(x) overflows for x = " +
                                         std::to_string(x));
  }
  return 2.0 * big - erfcx(-x);
}

double exp_erfc(double exponent, double x) noexcept {
  if (x > 0.0) {
    const double hi = x * x;
    const double lo = std::fma(x, x, -hi);
    const double scale = x >= kContinuedFractionStart
                             ? erfcx_continued_fraction(x)
                             : std::erfc(x) * std::exp(hi) * (1.0 + lo);
    return std::exp(exponent - hi) * (1.0 - lo) * scale;
  }
  return std::exp(exponent) * std::erfc(x);
}

}  // namespace numerics
}  // namespace occtime
