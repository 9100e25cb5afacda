#include <cmath>
#include <functional>
#include <numbers>
#include <unsupported/Eigen/MatrixFunctions>
#include <vector>

#include "doctest.h"
#include "occtime/errors.hpp"
#include "occtime/numerics/quadrature.hpp"
#include "occtime/sliding_long.hpp"

using namespace occtime;

namespace {

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an occtime::Error");
  return ErrorKind::Io;
}

VectorXd v1(double y) { return VectorXd::Constant(1, y); }

// Closed forms for the built-in example: Omega(y) = (1 - 3y)/4, M M^T = 0.5725.
double y_exact(double t, double y0) { return (y0 - 1.0 / 3.0) * std::exp(-0.75 * t) + 1.0 / 3.0; }
double theta_exact(double t) { return 0.5725 * (1.0 - std::exp(-1.5 * t)) / 1.5; }

// Same drifts as the built-in example, with no analytic coefficients.
FilippovSystem builtin_from_lambdas() {
  return FilippovSystem(
      2, [](double x, const VectorXd& y) { return VectorXd((VectorXd(2) << -x + y(0) + 1, -x + 1).finished()); },
      [](double x, const VectorXd& y) { return VectorXd((VectorXd(2) << -x + y(0) - 3, -x - 2).finished()); });
}

// Constant rates a_L = 1, a_R = 2 and equal linear parts on both sides, so
// the sliding Jacobian and M are constant.
FilippovSystem constant_coefficient_3d() {
  MatrixXd a = MatrixXd::Zero(3, 3);
  a.block(1, 1, 2, 2) << -1.0, 0.5, -0.3, -2.0;
  VectorXd cl(3), cr(3);
  cl << 1.0, 1.0, 0.0;
  cr << -2.0, -1.0, 2.0;
  return FilippovSystem::piecewise_affine(a, cl, a, cr);
}

}  // namespace

TEST_CASE("sliding vector field of the built-in example") {
  const auto sys = FilippovSystem::builtin_example();
  CHECK(sliding_vector_field(sys, v1(2.0))(0) == doctest::Approx(-1.25).epsilon(1e-15));
  CHECK(std::abs(sliding_vector_field(sys, v1(1.0 / 3.0))(0)) < 1e-15);
  CHECK(kind_of([&] { (void)sliding_vector_field(sys, v1(3.5)); }) == ErrorKind::NotStableSliding);
  CHECK(kind_of([&] { (void)sliding_vector_field(sys, v1(-1.0)); }) == ErrorKind::NotStableSliding);
}

TEST_CASE("equal rates average the parallel drifts") {
  MatrixXd a = MatrixXd::Zero(2, 2);
  VectorXd cl(2), cr(2);
  cl << 1.5, 4.0;
  cr << -1.5, -1.0;
  const auto sys = FilippovSystem::piecewise_affine(a, cl, a, cr);
  CHECK(sliding_vector_field(sys, v1(0.3))(0) == doctest::Approx(1.5));
}

TEST_CASE("sliding solution matches the closed form") {
  const auto sys = FilippovSystem::builtin_example();
  for (double t : {0.1, 1.0, 4.0}) {
    const auto traj = sliding_solution(sys, v1(2.0), t);
    CHECK(std::abs(traj.final_state()(0) - y_exact(t, 2.0)) < 1e-8);
  }
  const auto mid = sliding_solution(sys, v1(2.0), 2.0);
  CHECK(std::abs(mid.at(0.777)(0) - y_exact(0.777, 2.0)) < 1e-8);
  // Starting at the equilibrium stays there.
  const auto rest = sliding_solution(sys, v1(1.0 / 3.0), 3.0);
  CHECK(std::abs(rest.final_state()(0) - 1.0 / 3.0) < 1e-14);
  CHECK(kind_of([&] { (void)sliding_solution(sys, v1(3.5), 1.0); }) == ErrorKind::NotStableSliding);
}

TEST_CASE("sliding Jacobian: analytic and finite differences agree") {
  CHECK(sliding_jacobian(FilippovSystem::builtin_example(), v1(2.0))(0, 0) == -0.75);
  CHECK(sliding_jacobian(builtin_from_lambdas(), v1(2.0))(0, 0) ==
        doctest::Approx(-0.75).epsilon(1e-8));

  // Non-constant rates in 3D: compare differences against the derivative of
  // Omega worked out by hand.
  MatrixXd al = MatrixXd::Zero(3, 3), ar = MatrixXd::Zero(3, 3);
  al.row(0) << 0.0, 1.0, 0.5;
  al.row(1) << 0.0, -1.0, 0.0;
  al.row(2) << 0.0, 0.0, 2.0;
  ar.row(0) << 0.0, 0.0, -1.0;
  ar.row(1) << 0.0, 0.3, 1.0;
  ar.row(2) << 0.0, -2.0, 0.0;
  VectorXd cl(3), cr(3);
  cl << 2.0, 1.0, -1.0;
  cr << -3.0, 0.0, 1.0;
  const auto sys = FilippovSystem::piecewise_affine(al, cl, ar, cr);
  const VectorXd y = (VectorXd(2) << 0.2, -0.4).finished();
  const double a_l = sys.rate_left(y), a_r = sys.rate_right(y);
  const VectorXd bl = sys.parallel_left(y), br = sys.parallel_right(y);
  const Eigen::RowVector2d dal(1.0, 0.5), dar(0.0, 1.0);
  const MatrixXd dbl = al.block(1, 1, 2, 2), dbr = ar.block(1, 1, 2, 2);
  const double s = a_l + a_r;
  const MatrixXd num = br * dal + a_l * dbr + bl * dar + a_r * dbl;
  const VectorXd omega = (a_l * br + a_r * bl) / s;
  const MatrixXd expected = (num - omega * (dal + dar)) / s;
  CHECK(sliding_jacobian(sys, y).isApprox(expected, 1e-7));
}

TEST_CASE("noise matrix") {
  const auto sys = FilippovSystem::builtin_example();
  const auto m = noise_matrix(sys, NoiseSpec::builtin_example(0.1), v1(2.0));
  REQUIRE(m.rows() == 1);
  REQUIRE(m.cols() == 2);
  CHECK(m(0, 0) == doctest::Approx(-0.75));
  CHECK(m(0, 1) == doctest::Approx(0.1));
  CHECK((m * m.transpose())(0, 0) == doctest::Approx(0.5725).epsilon(1e-14));

  const auto sys3 = constant_coefficient_3d();
  NoiseSpec identity;
  identity.epsilon = 0.1;
  identity.matrix = MatrixXd::Identity(3, 3);
  const auto m3 = noise_matrix(sys3, identity, VectorXd::Zero(2));
  CHECK(m3.rightCols(2).isIdentity());
  CHECK(m3(0, 0) == doctest::Approx(-2.0 / 3.0));
  CHECK(m3(1, 0) == doctest::Approx(2.0 / 3.0));
}

TEST_CASE("covariance matches the closed form") {
  const auto sys = FilippovSystem::builtin_example();
  const auto noise = NoiseSpec::builtin_example(0.1);
  const auto traj = covariance(sys, noise, v1(2.0), 2.0);
  for (double t : {0.5, 1.0, 2.0}) {
    const auto s = traj.at(t);
    CHECK(std::abs(s.theta(0, 0) - theta_exact(t)) < 1e-6);
    CHECK(std::abs(s.y(0) - y_exact(t, 2.0)) < 1e-8);
  }
  const auto nodes = traj.nodes();
  CHECK(nodes.front().theta(0, 0) == 0.0);
  for (std::size_t i = 1; i < nodes.size(); ++i) {
    CHECK(nodes[i].theta(0, 0) > nodes[i - 1].theta(0, 0));
  }
}

TEST_CASE("covariance of a constant-coefficient system") {
  const auto sys = constant_coefficient_3d();
  NoiseSpec noise;
  noise.epsilon = 0.1;
  noise.matrix = (MatrixXd(3, 3) << 1.0, 0.0, 0.0, 0.2, 0.5, 0.0, 0.0, 0.1, 0.3).finished();
  const VectorXd y0 = (VectorXd(2) << 0.5, -0.5).finished();
  const double t = 1.5;
  const auto state = covariance(sys, noise, y0, t).final_state();

  const MatrixXd a = sliding_jacobian(sys, y0);
  const MatrixXd m = noise_matrix(sys, noise, y0);
  const MatrixXd q = m * m.transpose();
  MatrixXd expected(2, 2);
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      expected(i, j) = numerics::integrate(
          [&](double s) {
            const MatrixXd e = (a * s).exp();
            return (e * q * e.transpose())(i, j);
          },
          0.0, t, {1e-13, 1e-12, 200});
    }
  }
  CHECK(state.theta.isApprox(expected, 1e-7));
  CHECK((state.theta - state.theta.transpose()).norm() == 0.0);
  Eigen::SelfAdjointEigenSolver<MatrixXd> eig(state.theta);
  CHECK(eig.eigenvalues().minCoeff() > 0.0);
}

TEST_CASE("leaving the sliding region reports the exit time") {
  // a_L = y, a_R = 1, b = -1 on both sides: y(t) = 1 - t reaches a_L = 0 at t = 1.
  MatrixXd al = MatrixXd::Zero(2, 2);
  al(0, 1) = 1.0;
  VectorXd cl(2), cr(2);
  cl << 0.0, -1.0;
  cr << -1.0, -1.0;
  const auto sys = FilippovSystem::piecewise_affine(al, cl, MatrixXd::Zero(2, 2), cr);
  NoiseSpec noise;
  noise.epsilon = 0.1;
  noise.matrix = MatrixXd::Identity(2, 2);
  try {
    (void)covariance(sys, noise, v1(1.0), 2.0);
    FAIL("expected LeftSlidingRegionError");
  } catch (const LeftSlidingRegionError& e) {
    CHECK(e.kind() == ErrorKind::LeftSlidingRegion);
    CHECK(e.exit_time() == doctest::Approx(1.0).epsilon(1e-6));
  }
  CHECK_NOTHROW((void)covariance(sys, noise, v1(1.0), 0.9));
}

TEST_CASE("long-time density") {
  const auto sys = FilippovSystem::builtin_example();
  const auto noise = NoiseSpec::builtin_example(0.1);
  const double t = 1.0;
  const LongTimeDensity q(sys, noise, covariance(sys, noise, v1(2.0), t).final_state());
  const double y_s = y_exact(t, 2.0);
  const double a_l = 1.0 + y_s, a_r = 3.0 - y_s;
  CHECK(q.rate_left() == doctest::Approx(a_l).epsilon(1e-8));
  CHECK(q.rate_right() == doctest::Approx(a_r).epsilon(1e-8));
  CHECK(q.mass_right() == doctest::Approx(a_l / 4.0).epsilon(1e-8));

  const double peak = 2.0 * a_l * a_r / (0.1 * 4.0);
  CHECK(q.marginal_x(0.0) == doctest::Approx(peak).epsilon(1e-8));
  const double right = numerics::integrate_semi_infinite([&](double x) { return q.marginal_x(x); }, 0.0);
  const double left = numerics::integrate_semi_infinite([&](double x) { return q.marginal_x(-x); }, 0.0);
  CHECK(right == doctest::Approx(q.mass_right()).epsilon(1e-9));
  CHECK(left + right == doctest::Approx(1.0).epsilon(1e-9));

  const double var = 0.1 * theta_exact(t);
  CHECK(q.marginal_y(v1(y_s)) == doctest::Approx(1.0 / std::sqrt(2 * std::numbers::pi * var)).epsilon(1e-5));
  const VectorXd y = v1(y_s + 0.05);
  CHECK(q.joint(-0.01, y) == doctest::Approx(q.marginal_x(-0.01) * q.marginal_y(y)).epsilon(1e-15));
  CHECK(longtime_pdf(-0.01, y, t, sys, noise, v1(2.0)) == doctest::Approx(q.joint(-0.01, y)).epsilon(1e-12));
  CHECK(longtime_marginal_y(y, t, sys, noise, v1(2.0)) == doctest::Approx(q.marginal_y(y)).epsilon(1e-12));
  CHECK(longtime_marginal_x(0.02, t, sys, noise, v1(2.0)) == doctest::Approx(q.marginal_x(0.02)).epsilon(1e-12));
}
