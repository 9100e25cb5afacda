#pragma once

#include <Eigen/Core>
#include <functional>
#include <vector>

namespace occtime::numerics {

using State = Eigen::VectorXd;
using VectorField = std::function<State(double, const State&)>;

/// Stored RK4 nodes with their derivatives; evaluation between nodes uses
/// cubic Hermite interpolation, which matches the integrator's accuracy for
/// smooth fields.
class Trajectory {
 public:
  Trajectory(std::vector<double> times, std::vector<State> states,
             std::vector<State> derivatives);

  const std::vector<double>& times() const noexcept { return times_; }
  const std::vector<State>& states() const noexcept { return states_; }
  const std::vector<State>& derivatives() const noexcept { return derivatives_; }

  double start_time() const noexcept { return times_.front(); }
  double end_time() const noexcept { return times_.back(); }
  const State& final_state() const noexcept { return states_.back(); }

  /// Dense output at t in [start_time, end_time]; throws Error{Domain} outside.
  State at(double t) const;

 private:
  std::vector<double> times_;
  std::vector<State> states_;
  std::vector<State> derivatives_;
};

/// Called after every accepted step with the new (t, state); may throw to
/// abort the integration (used to stop when a constraint is violated).
using StepObserver = std::function<void(double, const State&)>;

/// Classical fixed-step fourth-order Runge-Kutta from t0 to t1 (t1 >= t0).
/// The final step is shortened to land exactly on t1. Throws Error{NonFinite}
/// if the state leaves the floating range.
Trajectory rk4_solve(const VectorField& f, const State& state0, double t0, double t1,
                     double step, const StepObserver& observer = {});

}  // namespace occtime::numerics
