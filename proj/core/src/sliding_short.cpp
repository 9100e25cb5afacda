#include "occtime/sliding_short.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <vector>

#include "occtime/errors.hpp"
#include "occtime/numerics/gaussian.hpp"
#include "occtime/occupation.hpp"

namespace occtime {

namespace {

using numerics::Singularity;

// log of the first-passage density to 0 from level > 0 with the given drift.
double log_first_passage(double s, double level, double drift) {
  const double d = level + drift * s;
  return std::log(level) - 0.5 * std::log(2.0 * std::numbers::pi * s * s * s) - d * d / (2.0 * s);
}

double first_passage_mode(double level, double drift) {
  const double a2 = drift * drift;
  if (a2 == 0.0) return level * level / 3.0;
  return (-3.0 + std::sqrt(9.0 + 4.0 * a2 * level * level)) / (2.0 * a2);
}

void add_breakpoints(std::vector<double>& points, double anchor, double mode, double sign,
                     double horizon) {
  for (double f : {0.1, 0.3, 1.0, 3.0, 10.0}) {
    const double s = anchor + sign * f * mode;
    if (s > 0.0 && s < horizon) points.push_back(s);
  }
}

std::vector<double> sorted_unique(std::vector<double> points) {
  std::sort(points.begin(), points.end());
  const double span = points.back() - points.front();
  points.erase(std::unique(points.begin(), points.end(),
                           [span](double a, double b) { return b - a <= 1e-12 * span; }),
               points.end());
  return points;
}

// Transitional density at unit orthogonal diffusion. `level_hi` is the start
// level of the passage that ends at time T (drift toward 0 is -rate_right),
// `level_lo` the one starting at time 0 (toward-0 drift -rate_left).
double orthogonal_unit(double x, double horizon, double a_l, double a_r,
                       const QuadratureSpec& quad) {
  const double prefactor_log = x <= 0.0 ? 2.0 * a_l * x : -2.0 * a_r * x;

  auto inner = [&](double level) {
    const double first_level = x <= 0.0 ? level : level + x;   // passage ending at T
    const double second_level = x <= 0.0 ? level - x : level;  // passage starting at 0
    if (!(first_level > 0.0) || !(second_level > 0.0)) return 0.0;

    auto term = [&](double s, double rest) {
      if (!(s > 0.0) || !(rest > 0.0)) return 0.0;
      return std::exp(prefactor_log + log_first_passage(rest, first_level, -a_r) +
                      log_first_passage(s, second_level, -a_l));
    };

    // The passage ending at T peaks within ~level^2 of T, which can be far
    // below the spacing of doubles near T. The upper half is therefore
    // integrated in u = T - s so both peaks sit next to a zero.
    const double half = 0.5 * horizon;
    const double mode_first = first_passage_mode(first_level, -a_r);
    const double mode_second = first_passage_mode(second_level, -a_l);
    std::vector<double> lower{0.0, half};
    add_breakpoints(lower, 0.0, mode_second, 1.0, half);
    add_breakpoints(lower, horizon, mode_first, -1.0, half);
    std::vector<double> upper{0.0, half};
    add_breakpoints(upper, 0.0, mode_first, 1.0, half);
    add_breakpoints(upper, horizon, mode_second, -1.0, half);

    const double a = numerics::integrate_with_breakpoints(
        [&](double s) { return term(s, horizon - s); }, sorted_unique(std::move(lower)), quad);
    const double b = numerics::integrate_with_breakpoints(
        [&](double u) { return term(horizon - u, u); }, sorted_unique(std::move(upper)), quad);
    return 2.0 * (a + b);
  };

  try {
    return numerics::integrate_semi_infinite(inner, 0.0, quad);
  } catch (const NonConvergenceError& e) {
    throw NonConvergenceError(std::string("orthogonal_pdf: level integral: ") + e.what(),
                              e.estimate(), e.error_bound());
  }
}

}  // namespace

void FrozenDriftParams::validate() const {
  const Eigen::Index m = y0.size();
  if (m < 1 || parallel_left.size() != m || parallel_right.size() != m || beta.size() != m ||
      gamma.rows() != m || gamma.cols() != m) {
    throw Error(ErrorKind::Domain, "FrozenDriftParams: inconsistent parallel dimensions");
  }
  if (!(epsilon > 0.0) || !(alpha > 0.0)) {
    throw Error(ErrorKind::Domain, "FrozenDriftParams: epsilon and alpha must be positive");
  }
  if (!std::isfinite(rate_left) || !std::isfinite(rate_right)) {
    throw Error(ErrorKind::Domain, "FrozenDriftParams: rates must be finite");
  }
}

FrozenDriftParams frozen_params_from_system(const FilippovSystem& system,
                                            const NoiseSpec& noise, const VectorXd& y0) {
  noise.validate(system.dimension());
  FrozenDriftParams p;
  p.rate_left = system.rate_left(y0);
  p.rate_right = system.rate_right(y0);
  if (!(p.rate_left > 0.0) || !(p.rate_right > 0.0)) {
    std::ostringstream msg;
    msg << "frozen_params_from_system: y0 is not in a stable sliding region (a_L = "
        << p.rate_left << ", a_R = " << p.rate_right << ")";
    throw Error(ErrorKind::NotStableSliding, msg.str());
  }
  p.parallel_left = system.parallel_left(y0);
  p.parallel_right = system.parallel_right(y0);
  p.y0 = y0;
  p.epsilon = noise.epsilon;
  p.alpha = noise.alpha();
  p.gamma = noise.gamma();
  p.beta = noise.beta();
  return p;
}

double scaled_occupation_pdf(double tau, double t, const FrozenDriftParams& params,
                             const QuadratureSpec& quad) {
  TwoValuedDriftSpec spec;
  spec.rate_left = params.rate_left;
  spec.rate_right = params.rate_right;
  spec.horizon = t;
  spec.diffusion_scale = params.orthogonal_scale();
  return occupation_pdf_zero(tau, spec, quad);
}

double orthogonal_pdf(double x, double t, const FrozenDriftParams& params,
                      const QuadratureSpec& quad) {
  params.validate();
  if (!(t > 0.0) || !std::isfinite(t)) {
    throw Error(ErrorKind::Domain, "orthogonal_pdf: t must be positive");
  }
  if (!std::isfinite(x)) return 0.0;
  const double scale = params.orthogonal_scale();
  return orthogonal_unit(x / scale, t / scale, params.rate_left, params.rate_right, quad) / scale;
}

double parallel_pdf(const VectorXd& y, double t, const FrozenDriftParams& params,
                    const QuadratureSpec& quad) {
  params.validate();
  if (!(t > 0.0) || !std::isfinite(t)) {
    throw Error(ErrorKind::Domain, "parallel_pdf: t must be positive");
  }
  if (y.size() != params.y0.size()) {
    throw Error(ErrorKind::Domain, "parallel_pdf: y has the wrong dimension");
  }
  if (params.beta.cwiseAbs().maxCoeff() > 1e-12) {
    throw Error(ErrorKind::IndependenceViolated,
                "parallel_pdf: noise in x and y must be independent (beta = 0)");
  }

  const numerics::GaussianKernel kernel(
      {VectorXd::Zero(y.size()), params.epsilon * t * params.gamma});
  const VectorXd base = params.y0 + params.parallel_left * t;
  const VectorXd direction = params.parallel_right - params.parallel_left;
  const VectorXd offset = y - base;
  if (direction.squaredNorm() == 0.0) return kernel.at_offset(offset);

  // Closest point of the occupation-time line to y in the kernel's metric,
  // and the spread of the kernel along the line.
  const double precision = kernel.inner(direction, direction);
  const double centre = kernel.inner(direction, offset) / precision;
  const double spread = 1.0 / std::sqrt(precision);

  std::vector<double> points{0.0, t};
  for (double k : {-8.0, -4.0, -2.0, -1.0, 0.0, 1.0, 2.0, 4.0, 8.0}) {
    const double s = centre + k * spread;
    if (s > 0.0 && s < t) points.push_back(s);
  }
  const auto sorted = sorted_unique(std::move(points));

  auto integrand = [&](double tau) {
    if (!(tau > 0.0 && tau < t)) return 0.0;
    const double g = kernel.at_offset(offset - direction * tau);
    if (g == 0.0) return 0.0;
    return scaled_occupation_pdf(tau, t, params, quad) * g;
  };
  return numerics::integrate_with_breakpoints(integrand, sorted, quad, Singularity::inv_sqrt_both);
}

}  // namespace occtime
