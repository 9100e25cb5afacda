#include "occtime/numerics/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <queue>
#include <sstream>
#include <string>
#include <vector>

#include "occtime/errors.hpp"

namespace occtime::numerics {

namespace {

// 15-point Kronrod abscissae; odd indices are the embedded 7-point Gauss nodes.
constexpr std::array<double, 8> kNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};

constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};

constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

constexpr double kEps = std::numeric_limits<double>::epsilon();

struct Panel {
  double lo;
  double hi;
  double value;
  double error;
  int segment;
};

struct ByError {
  bool operator()(const Panel& a, const Panel& b) const { return a.error < b.error; }
};

// QUADPACK qk15 error heuristic: the raw |K - G| difference is rescaled by
// the integrand's variation and floored at the roundoff level.
Panel gauss_kronrod(const Integrand& f, double lo, double hi, int segment) {
  const double center = 0.5 * (lo + hi);
  const double half = 0.5 * (hi - lo);
  const double abs_half = std::abs(half);

  std::array<double, 7> left{};
  std::array<double, 7> right{};
  const double fc = f(center);
  double gauss = fc * kGaussWeights[3];
  double kronrod = fc * kKronrodWeights[7];
  double abs_sum = std::abs(kronrod);

  for (std::size_t j = 0; j < 7; ++j) {
    const double dx = half * kNodes[j];
    const double f1 = f(center - dx);
    const double f2 = f(center + dx);
    left[j] = f1;
    right[j] = f2;
    kronrod += kKronrodWeights[j] * (f1 + f2);
    abs_sum += kKronrodWeights[j] * (std::abs(f1) + std::abs(f2));
    if (j % 2 == 1) gauss += kGaussWeights[j / 2] * (f1 + f2);
  }

  const double mean = 0.5 * kronrod;
  double asc = kKronrodWeights[7] * std::abs(fc - mean);
  for (std::size_t j = 0; j < 7; ++j) {
    asc += kKronrodWeights[j] * (std::abs(left[j] - mean) + std::abs(right[j] - mean));
  }

  const double value = kronrod * half;
  abs_sum *= abs_half;
  asc *= abs_half;
  double error = std::abs((kronrod - gauss) * half);
  if (asc != 0.0 && error != 0.0) {
    error = asc * std::min(1.0, std::pow(200.0 * error / asc, 1.5));
  }
  if (abs_sum > std::numeric_limits<double>::min() / (50.0 * kEps)) {
    error = std::max(50.0 * kEps * abs_sum, error);
  }
  return Panel{lo, hi, value, error, segment};
}

struct Segment {
  Integrand mapped;
  double lo;
  double hi;
};

QuadratureResult adapt(const std::vector<Segment>& segments, const QuadratureSpec& spec) {
  spec.validate();
  std::priority_queue<Panel, std::vector<Panel>, ByError> heap;
  double total = 0.0;
  double total_error = 0.0;
  for (std::size_t i = 0; i < segments.size(); ++i) {
    const auto& s = segments[i];
    if (!(s.hi > s.lo)) continue;
    Panel p = gauss_kronrod(s.mapped, s.lo, s.hi, static_cast<int>(i));
    total += p.value;
    total_error += p.error;
    heap.push(p);
  }
  if (!std::isfinite(total)) {
    throw Error(ErrorKind::NonFinite, "integrate: integrand produced a non-finite value");
  }

  int subdivisions = 0;
  auto tolerance = [&] { return std::max(spec.abs_tol, spec.rel_tol * std::abs(total)); };
  while (!heap.empty() && total_error > tolerance()) {
    if (subdivisions >= spec.max_subdivisions) {
      std::ostringstream msg;
      msg.precision(3);
      msg << "integrate: no convergence after " << subdivisions
          << " subdivisions (estimate " << total << ", error " << total_error << ")";
      throw NonConvergenceError(msg.str(), total, total_error);
    }
    const Panel worst = heap.top();
    const double mid = 0.5 * (worst.lo + worst.hi);
    if (!(mid > worst.lo && mid < worst.hi)) {
      throw NonConvergenceError("integrate: panel cannot be bisected further", total,
                                total_error);
    }
    heap.pop();
    const auto& f = segments[static_cast<std::size_t>(worst.segment)].mapped;
    const Panel a = gauss_kronrod(f, worst.lo, mid, worst.segment);
    const Panel b = gauss_kronrod(f, mid, worst.hi, worst.segment);
    total += a.value + b.value - worst.value;
    total_error += a.error + b.error - worst.error;
    heap.push(a);
    heap.push(b);
    ++subdivisions;
    if (!std::isfinite(total)) {
      throw Error(ErrorKind::NonFinite, "integrate: integrand produced a non-finite value");
    }
  }

  // Re-sum to shed the drift accumulated by the incremental updates.
  double value = 0.0;
  double error = 0.0;
  while (!heap.empty()) {
    value += heap.top().value;
    error += heap.top().error;
    heap.pop();
  }
  return QuadratureResult{value, error, subdivisions};
}

Segment plain(const Integrand& f, double lo, double hi) { return Segment{f, lo, hi}; }

Segment sqrt_left(const Integrand& f, double lo, double hi) {
  return Segment{[&f, lo](double u) { return 2.0 * u * f(lo + u * u); }, 0.0,
                 std::sqrt(hi - lo)};
}

Segment sqrt_right(const Integrand& f, double lo, double hi) {
  return Segment{[&f, hi](double u) { return 2.0 * u * f(hi - u * u); }, 0.0,
                 std::sqrt(hi - lo)};
}

std::vector<Segment> build_segments(const Integrand& f, std::span<const double> points,
                                    Singularity singularity) {
  const bool left = singularity == Singularity::inv_sqrt_left ||
                    singularity == Singularity::inv_sqrt_both;
  const bool right = singularity == Singularity::inv_sqrt_right ||
                     singularity == Singularity::inv_sqrt_both;

  std::vector<double> pts(points.begin(), points.end());
  if (left && right && pts.size() == 2) {
    pts.insert(pts.begin() + 1, 0.5 * (pts[0] + pts[1]));
  }

  std::vector<Segment> segments;
  const std::size_t n = pts.size() - 1;
  for (std::size_t i = 0; i < n; ++i) {
    const double lo = pts[i];
    const double hi = pts[i + 1];
    if (i == 0 && left) {
      segments.push_back(sqrt_left(f, lo, hi));
    } else if (i + 1 == n && right) {
      segments.push_back(sqrt_right(f, lo, hi));
    } else {
      segments.push_back(plain(f, lo, hi));
    }
  }
  return segments;
}

void check_points(std::span<const double> points) {
  if (points.size() < 2) {
    throw Error(ErrorKind::Domain, "integrate: need at least two points");
  }
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (!std::isfinite(points[i])) {
      throw Error(ErrorKind::Domain, "integrate: limits must be finite");
    }
    if (i > 0 && !(points[i] > points[i - 1])) {
      throw Error(ErrorKind::Domain, "integrate: limits must be strictly increasing");
    }
  }
}

}  // namespace

void QuadratureSpec::validate() const {
  if (!(abs_tol > 0.0) || !(rel_tol > 0.0) || max_subdivisions < 1) {
    throw Error(ErrorKind::Domain,
                "QuadratureSpec: tolerances must be positive and max_subdivisions >= 1");
  }
}

QuadratureResult integrate_detailed(const Integrand& f, double a, double b,
                                    const QuadratureSpec& spec, Singularity singularity) {
  const std::array<double, 2> pts{a, b};
  check_points(pts);
  return adapt(build_segments(f, pts, singularity), spec);
}

double integrate(const Integrand& f, double a, double b, const QuadratureSpec& spec,
                 Singularity singularity) {
  return integrate_detailed(f, a, b, spec, singularity).value;
}

double integrate_with_breakpoints(const Integrand& f, std::span<const double> points,
                                  const QuadratureSpec& spec, Singularity singularity) {
  check_points(points);
  return adapt(build_segments(f, points, singularity), spec).value;
}

double integrate_semi_infinite(const Integrand& f, double a, const QuadratureSpec& spec,
                               Singularity left) {
  if (!std::isfinite(a)) {
    throw Error(ErrorKind::Domain, "integrate_semi_infinite: lower limit must be finite");
  }
  if (left != Singularity::none && left != Singularity::inv_sqrt_left) {
    throw Error(ErrorKind::Domain,
                "integrate_semi_infinite: only a left endpoint singularity is supported");
  }

  // Scale at which |f(a+d)| d peaks: where most of the mass sits on a log axis.
  double scale = 0.0;
  double best = 0.0;
  for (int k = -30; k <= 30; ++k) {
    const double d = std::ldexp(1.0, k);
    const double v = std::abs(f(a + d)) * d;
    if (std::isfinite(v) && v > best) {
      best = v;
      scale = d;
    }
  }
  if (best == 0.0) return 0.0;

  const double split = a + scale;
  std::vector<Segment> segments;
  segments.push_back(left == Singularity::inv_sqrt_left ? sqrt_left(f, a, split)
                                                        : plain(f, a, split));
  segments.push_back(Segment{[&f, split, scale](double u) {
                               const double w = 1.0 - u;
                               const double x = split + scale * u / w;
                               if (!std::isfinite(x)) return 0.0;
                               const double v = f(x) * scale / (w * w);
                               return std::isfinite(v) ? v : 0.0;
                             },
                             0.0, 1.0});
  return adapt(segments, spec).value;
}

}  // namespace occtime::numerics
