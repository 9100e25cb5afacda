#include <cmath>
#include <functional>
#include <vector>

#include "doctest.h"
#include "occtime/errors.hpp"
#include "occtime/numerics/gaussian.hpp"
#include "occtime/occupation.hpp"
#include "occtime/sliding_short.hpp"

using namespace occtime;

namespace {

FrozenDriftParams params(double al, double ar, double bl, double br, double eps,
                         double gamma = 0.01, double y0 = 2.0) {
  FrozenDriftParams p;
  p.rate_left = al;
  p.rate_right = ar;
  p.parallel_left = VectorXd::Constant(1, bl);
  p.parallel_right = VectorXd::Constant(1, br);
  p.y0 = VectorXd::Constant(1, y0);
  p.epsilon = eps;
  p.alpha = 1.0;
  p.gamma = MatrixXd::Constant(1, 1, gamma);
  p.beta = VectorXd::Zero(1);
  return p;
}

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an occtime::Error");
  return ErrorKind::Io;
}

const numerics::QuadratureSpec kOuter{1e-9, 1e-7, 300};

double orthogonal_mass(const FrozenDriftParams& p, double t, double lo, double hi) {
  return numerics::integrate([&](double x) { return orthogonal_pdf(x, t, p); }, lo, hi, kOuter);
}

double parallel_moment(const FrozenDriftParams& p, double t, int k, double lo, double hi) {
  std::vector<double> pts{lo};
  for (int i = 1; i < 40; ++i) pts.push_back(lo + (hi - lo) * i / 40.0);
  pts.push_back(hi);
  return numerics::integrate_with_breakpoints(
      [&](double y) { return std::pow(y, k) * parallel_pdf(VectorXd::Constant(1, y), t, p); }, pts,
      kOuter);
}

}  // namespace

TEST_CASE("frozen parameters of the built-in example") {
  const auto sys = FilippovSystem::builtin_example();
  const auto noise = NoiseSpec::builtin_example(0.1);
  const auto p = frozen_params_from_system(sys, noise, VectorXd::Constant(1, 2.0));
  CHECK(p.rate_left == 3.0);
  CHECK(p.rate_right == 1.0);
  CHECK(p.parallel_left(0) == 1.0);
  CHECK(p.parallel_right(0) == -2.0);
  CHECK(p.alpha == 1.0);
  CHECK(p.beta(0) == 0.0);
  CHECK(p.gamma(0, 0) == doctest::Approx(0.01).epsilon(1e-15));
  CHECK(p.epsilon == 0.1);
  CHECK(kind_of([&] { frozen_params_from_system(sys, noise, VectorXd::Constant(1, 3.5)); }) ==
        ErrorKind::NotStableSliding);
}

TEST_CASE("identity noise splits into unit blocks") {
  MatrixXd a = MatrixXd::Zero(3, 3);
  VectorXd cl(3), cr(3);
  cl << 1, 0.5, -0.5;
  cr << -2, 1, 1;
  const auto sys = FilippovSystem::piecewise_affine(a, cl, a, cr);
  NoiseSpec noise;
  noise.epsilon = 0.2;
  noise.matrix = MatrixXd::Identity(3, 3);
  const auto p = frozen_params_from_system(sys, noise, VectorXd::Zero(2));
  CHECK(p.alpha == 1.0);
  CHECK(p.beta.isZero());
  CHECK(p.gamma.isApprox(MatrixXd::Identity(2, 2)));
  CHECK(p.rate_left == 1.0);
  CHECK(p.rate_right == 2.0);
}

TEST_CASE("scaled occupation density") {
  auto unit = params(2.0, 1.0, 1.0, -2.0, 1.0);
  TwoValuedDriftSpec spec;
  spec.rate_left = 2.0;
  spec.rate_right = 1.0;
  spec.horizon = 0.7;
  for (double tau : {0.1, 0.35, 0.6}) {
    CHECK(scaled_occupation_pdf(tau, 0.7, unit) == occupation_pdf_zero(tau, spec));
  }
  const auto p = params(2.0, 1.0, 1.0, -2.0, 0.1);
  const double mass = numerics::integrate(
      [&](double tau) { return scaled_occupation_pdf(tau, 0.1, p); }, 0.0, 0.1,
      {1e-12, 1e-10, 300}, numerics::Singularity::inv_sqrt_both);
  CHECK(std::abs(mass - 1.0) <= 1e-4);
}

TEST_CASE("scaled occupation mean approaches the steady fraction") {
  const auto p = params(2.0, 1.0, 1.0, -2.0, 0.01);
  const double t = 1.0;
  const double mean = numerics::integrate(
      [&](double tau) { return tau * scaled_occupation_pdf(tau, t, p); }, 0.0, t,
      {1e-12, 1e-10, 300}, numerics::Singularity::inv_sqrt_both);
  CHECK(mean / t == doctest::Approx(2.0 / 3.0).epsilon(0.02));
}

TEST_CASE("orthogonal density reproduces Brownian motion with constant drift") {
  // rate_left = -rate_right = -a: drift -a on both sides, so x(t) ~ N(-a t, eps alpha t).
  for (auto [a, eps, t] : std::vector<std::tuple<double, double, double>>{
           {0.5, 1.0, 1.0}, {0.5, 0.1, 1.0}, {-1.0, 0.3, 0.4}}) {
    const auto p = params(-a, a, 0.0, 0.0, eps);
    for (double x : {-1.5, -0.4, -0.01, 0.0, 0.02, 0.3, 1.0}) {
      CAPTURE(x);
      CHECK(orthogonal_pdf(x, t, p) ==
            doctest::Approx(numerics::normal_pdf(x, -a * t, eps * t)).epsilon(1e-6).scale(1e-12));
    }
  }
}

TEST_CASE("orthogonal density without drift is Gaussian") {
  const auto p = params(0.0, 0.0, 0.0, 0.0, 0.1);
  for (double x : {-0.5, 0.0, 0.25}) {
    CHECK(orthogonal_pdf(x, 1.0, p) ==
          doctest::Approx(numerics::normal_pdf(x, 0.0, 0.1)).epsilon(1e-6));
  }
}

TEST_CASE("orthogonal density: mass, continuity, steady fraction") {
  const auto p = params(2.0, 1.0, 1.0, -2.0, 0.1);
  CHECK(orthogonal_mass(p, 1.0, -3.0, 3.0) == doctest::Approx(1.0).epsilon(0.01));
  const double left = orthogonal_pdf(-1e-12, 1.0, p);
  const double right = orthogonal_pdf(1e-12, 1.0, p);
  CHECK(std::abs(left - right) <= 1e-6 * right);
  CHECK(orthogonal_mass(p, 5.0, 0.0, 3.0) == doctest::Approx(2.0 / 3.0).epsilon(0.02));
  CHECK(kind_of([&] { (void)orthogonal_pdf(0.0, 0.0, p); }) == ErrorKind::Domain);
}

TEST_CASE("parallel density with equal parallel drifts is Gaussian") {
  const auto p = params(2.0, 1.0, 0.5, 0.5, 0.1, 0.04, 1.0);
  const double t = 0.3;
  for (double y : {0.9, 1.15, 1.3}) {
    CHECK(parallel_pdf(VectorXd::Constant(1, y), t, p) ==
          doctest::Approx(numerics::normal_pdf(y, 1.0 + 0.5 * t, 0.1 * t * 0.04)).epsilon(1e-12));
  }
}

TEST_CASE("parallel density: mass and mean") {
  const auto p = params(3.0, 1.0, 1.0, -2.0, 0.1);
  const double t = 0.1;
  const double lo = 2.0 - 2.0 * t - 0.1;
  const double hi = 2.0 + 1.0 * t + 0.1;
  CHECK(std::abs(parallel_moment(p, t, 0, lo, hi) - 1.0) <= 1e-3);

  const double mean_tau = numerics::integrate(
      [&](double tau) { return tau * scaled_occupation_pdf(tau, t, p); }, 0.0, t,
      {1e-12, 1e-10, 300}, numerics::Singularity::inv_sqrt_both);
  CHECK(parallel_moment(p, t, 1, lo, hi) ==
        doctest::Approx(2.0 + 1.0 * t - 3.0 * mean_tau).epsilon(1e-6));
}

TEST_CASE("parallel spread shrinks linearly with the noise level") {
  const double t = 1.0;
  auto variance = [&](double eps) {
    const auto p = params(2.0, 1.0, 1.0, -2.0, eps, 0.01, 0.0);
    const double lo = -2.0 * t - 0.5;
    const double hi = 1.0 * t + 0.5;
    const double m = parallel_moment(p, t, 1, lo, hi);
    return parallel_moment(p, t, 2, lo, hi) - m * m;
  };
  const double ratio = variance(0.02) / variance(0.01);
  CHECK(ratio == doctest::Approx(2.0).epsilon(0.1));
}

TEST_CASE("parallel density rejects correlated noise") {
  auto p = params(2.0, 1.0, 1.0, -2.0, 0.1);
  p.beta(0) = 0.3;
  CHECK(kind_of([&] { (void)parallel_pdf(VectorXd::Constant(1, 2.0), 0.1, p); }) ==
        ErrorKind::IndependenceViolated);
  p.beta(0) = 0.0;
  CHECK(kind_of([&] { (void)parallel_pdf(VectorXd::Zero(2), 0.1, p); }) == ErrorKind::Domain);
}

TEST_CASE("two parallel coordinates") {
  FrozenDriftParams p = params(2.0, 1.0, 0.0, 0.0, 0.1);
  p.parallel_left = (VectorXd(2) << 1.0, 0.0).finished();
  p.parallel_right = (VectorXd(2) << -1.0, 0.5).finished();
  p.y0 = VectorXd::Zero(2);
  p.gamma = MatrixXd::Identity(2, 2) * 0.05;
  p.beta = VectorXd::Zero(2);
  const double t = 0.5;
  // Marginal of the second coordinate, integrated over the first, must equal
  // the one-dimensional problem for that coordinate alone.
  const VectorXd probe = (VectorXd(2) << 0.0, 0.1).finished();
  const double marginal = numerics::integrate(
      [&](double y1) {
        VectorXd y = probe;
        y(0) = y1;
        return parallel_pdf(y, t, p);
      },
      -1.5, 1.5, kOuter);
  FrozenDriftParams one = params(2.0, 1.0, 0.0, 0.5, 0.1, 0.05, 0.0);
  CHECK(marginal == doctest::Approx(parallel_pdf(VectorXd::Constant(1, 0.1), t, one)).epsilon(1e-5));
}
