#pragma once

namespace occtime::numerics {

/// Complementary error function. Total on finite input; saturates to 2 and 0.
double erfc(double x) noexcept;

/// Scaled complementary error function e^{x^2} erfc(x).
///
/// Finite for every x >= 0 (decays like 1/(x sqrt(pi))). For negative x the
/// value grows like 2 e^{x^2} and throws Error{Overflow} once that exceeds
/// the double range, i.e. below about -26.64.
double erfcx(double x);

/// e^{exponent} * erfc(x), with the product folded into erfcx when x > 0 so
/// that a large positive exponent paired with a large positive x neither
/// overflows nor collapses to 0 * inf.
double exp_erfc(double exponent, double x) noexcept;

}  // namespace occtime::numerics
