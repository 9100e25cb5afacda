#include "occtime/sliding_long.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <utility>

#include "occtime/errors.hpp"

namespace occtime {

namespace {

constexpr double kDefaultSteps = 2000.0;

double default_step(double t, double step) {
  if (step > 0.0) return step;
  return t > 0.0 ? t / kDefaultSteps : 1.0;
}

void require_stable(const FilippovSystem& system, const VectorXd& y, const char* where) {
  const double al = system.rate_left(y);
  const double ar = system.rate_right(y);
  if (!(al > 0.0) || !(ar > 0.0)) {
    std::ostringstream msg;
    msg << where << ": y = " << y.transpose() << " is not in a stable sliding region (a_L = " << al
        << ", a_R = " << ar << ")";
    throw Error(ErrorKind::NotStableSliding, msg.str());
  }
}

VectorXd omega_unchecked(const FilippovSystem& system, const VectorXd& y) {
  const double al = system.rate_left(y);
  const double ar = system.rate_right(y);
  return (al * system.parallel_right(y) + ar * system.parallel_left(y)) / (al + ar);
}

MatrixXd finite_difference_jacobian(const FilippovSystem& system, const VectorXd& y,
                                    bool check) {
  const Eigen::Index m = y.size();
  MatrixXd jac(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    double h = 1e-6 * std::max(1.0, std::abs(y(i)));
    VectorXd plus = y;
    VectorXd minus = y;
    for (int attempt = 0;; ++attempt) {
      plus(i) = y(i) + h;
      minus(i) = y(i) - h;
      if (!check || (system.stable_sliding(plus) && system.stable_sliding(minus))) break;
      if (attempt == 1) {
        std::ostringstream msg;
        msg << "sliding_jacobian: finite-difference probe around y = " << y.transpose()
            << " leaves the stable sliding region";
        throw Error(ErrorKind::NotStableSliding, msg.str());
      }
      h /= 10.0;
    }
    jac.col(i) = (omega_unchecked(system, plus) - omega_unchecked(system, minus)) / (2.0 * h);
  }
  return jac;
}

MatrixXd jacobian_unchecked(const FilippovSystem& system, const VectorXd& y) {
  if (system.analytic_sliding_jacobian()) return system.analytic_sliding_jacobian()(y);
  return finite_difference_jacobian(system, y, false);
}

MatrixXd noise_matrix_unchecked(const FilippovSystem& system, const NoiseSpec& noise,
                                const VectorXd& y) {
  const Eigen::Index m = y.size();
  MatrixXd selector(m, m + 1);
  selector.col(0) = -(system.parallel_left(y) - system.parallel_right(y)) /
                    (system.rate_left(y) + system.rate_right(y));
  selector.rightCols(m) = MatrixXd::Identity(m, m);
  return selector * noise.matrix;
}

double sliding_margin(const FilippovSystem& system, const VectorXd& y) {
  return std::min(system.rate_left(y), system.rate_right(y));
}

// Stops the integration at the first node outside the sliding region and
// estimates the crossing time by linear interpolation of min(a_L, a_R).
class ExitWatch {
 public:
  ExitWatch(const FilippovSystem& system, Eigen::Index m, double t0, const VectorXd& y0)
      : system_(system), m_(m), t_prev_(t0), margin_prev_(sliding_margin(system, y0)) {}

  void operator()(double t, const numerics::State& s) {
    const double margin = sliding_margin(system_, s.head(m_));
    if (!(margin > 0.0)) {
      const double exit = t_prev_ + (t - t_prev_) * margin_prev_ / (margin_prev_ - margin);
      std::ostringstream msg;
      msg << "sliding solution leaves the stable sliding region near t = " << exit;
      throw LeftSlidingRegionError(msg.str(), exit);
    }
    t_prev_ = t;
    margin_prev_ = margin;
  }

 private:
  const FilippovSystem& system_;
  Eigen::Index m_;
  double t_prev_;
  double margin_prev_;
};

void check_inputs(const FilippovSystem& system, const VectorXd& y0, double t, const char* where) {
  if (!(t >= 0.0) || !std::isfinite(t)) {
    throw Error(ErrorKind::Domain, std::string(where) + ": t must be non-negative");
  }
  require_stable(system, y0, where);
}

}  // namespace

VectorXd sliding_vector_field(const FilippovSystem& system, const VectorXd& y) {
  require_stable(system, y, "sliding_vector_field");
  return omega_unchecked(system, y);
}

MatrixXd sliding_jacobian(const FilippovSystem& system, const VectorXd& y) {
  require_stable(system, y, "sliding_jacobian");
  if (system.analytic_sliding_jacobian()) return system.analytic_sliding_jacobian()(y);
  return finite_difference_jacobian(system, y, true);
}

MatrixXd noise_matrix(const FilippovSystem& system, const NoiseSpec& noise, const VectorXd& y) {
  require_stable(system, y, "noise_matrix");
  noise.validate(system.dimension());
  return noise_matrix_unchecked(system, noise, y);
}

numerics::Trajectory sliding_solution(const FilippovSystem& system, const VectorXd& y0,
                                      double t, double step) {
  check_inputs(system, y0, t, "sliding_solution");
  auto field = [&system](double, const numerics::State& y) { return omega_unchecked(system, y); };
  ExitWatch watch(system, y0.size(), 0.0, y0);
  return numerics::rk4_solve(field, y0, 0.0, t, default_step(t, step), std::ref(watch));
}

SlidingTrajectory::SlidingTrajectory(numerics::Trajectory raw, Eigen::Index parallel_dimension)
    : raw_(std::move(raw)), m_(parallel_dimension) {}

SlidingState SlidingTrajectory::unpack(double t, const numerics::State& s) const {
  SlidingState out;
  out.t = t;
  out.y = s.head(m_);
  out.theta = Eigen::Map<const MatrixXd>(s.data() + m_, m_, m_);
  out.theta = 0.5 * (out.theta + out.theta.transpose()).eval();
  return out;
}

SlidingState SlidingTrajectory::at(double t) const { return unpack(t, raw_.at(t)); }

std::vector<SlidingState> SlidingTrajectory::nodes() const {
  std::vector<SlidingState> out;
  out.reserve(raw_.times().size());
  for (std::size_t i = 0; i < raw_.times().size(); ++i) {
    out.push_back(unpack(raw_.times()[i], raw_.states()[i]));
  }
  return out;
}

SlidingTrajectory covariance(const FilippovSystem& system, const NoiseSpec& noise,
                             const VectorXd& y0, double t, double step) {
  check_inputs(system, y0, t, "covariance");
  noise.validate(system.dimension());
  const Eigen::Index m = y0.size();

  auto field = [&system, &noise, m](double, const numerics::State& s) {
    const VectorXd y = s.head(m);
    const Eigen::Map<const MatrixXd> theta(s.data() + m, m, m);
    const MatrixXd a = jacobian_unchecked(system, y);
    const MatrixXd mm = noise_matrix_unchecked(system, noise, y);
    MatrixXd dtheta = a * theta + theta * a.transpose() + mm * mm.transpose();
    dtheta = 0.5 * (dtheta + dtheta.transpose()).eval();

    numerics::State out(m + m * m);
    out.head(m) = omega_unchecked(system, y);
    out.tail(m * m) = Eigen::Map<const VectorXd>(dtheta.data(), m * m);
    return out;
  };

  numerics::State s0 = numerics::State::Zero(m + m * m);
  s0.head(m) = y0;
  ExitWatch watch(system, m, 0.0, y0);
  return SlidingTrajectory(
      numerics::rk4_solve(field, s0, 0.0, t, default_step(t, step), std::ref(watch)), m);
}

LongTimeDensity::LongTimeDensity(const FilippovSystem& system, const NoiseSpec& noise,
                                 const SlidingState& state)
    : state_(state),
      rate_left_((require_stable(system, state.y, "LongTimeDensity"), system.rate_left(state.y))),
      rate_right_(system.rate_right(state.y)),
      scale_((noise.validate(system.dimension()), noise.epsilon * noise.alpha())),
      kernel_({state.y, noise.epsilon * state.theta}) {}

double LongTimeDensity::marginal_x(double x) const {
  const double k = 2.0 * rate_left_ * rate_right_ / (scale_ * (rate_left_ + rate_right_));
  return x < 0.0 ? k * std::exp(2.0 * rate_left_ * x / scale_)
                 : k * std::exp(-2.0 * rate_right_ * x / scale_);
}

double longtime_pdf(double x, const VectorXd& y, double t, const FilippovSystem& system,
                    const NoiseSpec& noise, const VectorXd& y0, double step) {
  const auto traj = covariance(system, noise, y0, t, step);
  return LongTimeDensity(system, noise, traj.final_state()).joint(x, y);
}

double longtime_marginal_y(const VectorXd& y, double t, const FilippovSystem& system,
                           const NoiseSpec& noise, const VectorXd& y0, double step) {
  const auto traj = covariance(system, noise, y0, t, step);
  return LongTimeDensity(system, noise, traj.final_state()).marginal_y(y);
}

double longtime_marginal_x(double x, double t, const FilippovSystem& system,
                           const NoiseSpec& noise, const VectorXd& y0, double step) {
  const auto traj = covariance(system, noise, y0, t, step);
  return LongTimeDensity(system, noise, traj.final_state()).marginal_x(x);
}

}  // namespace occtime
