#include "occtime/numerics/ode.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "occtime/errors.hpp"

namespace occtime::numerics {

Trajectory::Trajectory(std::vector<double> times, std::vector<State> states,
                       std::vector<State> derivatives)
    : times_(std::move(times)),
      states_(std::move(states)),
      derivatives_(std::move(derivatives)) {
  if (times_.empty() || times_.size() != states_.size() ||
      times_.size() != derivatives_.size()) {
    throw Error(ErrorKind::Domain, "Trajectory: inconsistent node arrays");
  }
}

State Trajectory::at(double t) const {
  const double tol = 1e-12 * std::max(1.0, std::abs(end_time()));
  if (t < start_time() - tol || t > end_time() + tol) {
    throw Error(ErrorKind::Domain, "Trajectory::at: t = " + std::to_string(t) +
                                       " outside the integrated range");
  }
  if (times_.size() == 1) return states_.front();
  t = std::clamp(t, start_time(), end_time());

  auto it = std::upper_bound(times_.begin(), times_.end(), t);
  std::size_t i = it == times_.begin() ? 0 : static_cast<std::size_t>(it - times_.begin()) - 1;
  if (i >= times_.size() - 1) i = times_.size() - 2;

  const double h = times_[i + 1] - times_[i];
  const double s = (t - times_[i]) / h;
  const double s2 = s * s;
  const double s3 = s2 * s;
  const double h00 = 2 * s3 - 3 * s2 + 1;
  const double h10 = s3 - 2 * s2 + s;
  const double h01 = -2 * s3 + 3 * s2;
  const double h11 = s3 - s2;
  return h00 * states_[i] + h10 * h * derivatives_[i] + h01 * states_[i + 1] +
         h11 * h * derivatives_[i + 1];
}

Trajectory rk4_solve(const VectorField& f, const State& state0, double t0, double t1,
                     double step, const StepObserver& observer) {
  if (!(step > 0.0) || !std::isfinite(step)) {
    throw Error(ErrorKind::Domain, "rk4_solve: step must be positive");
  }
  if (!(t1 >= t0)) {
    throw Error(ErrorKind::Domain, "rk4_solve: t1 must not precede t0");
  }

  const double span = t1 - t0;
  const auto n_steps = static_cast<long>(std::ceil(span / step - 1e-9));

  std::vector<double> times{t0};
  std::vector<State> states{state0};
  std::vector<State> derivs{f(t0, state0)};
  times.reserve(static_cast<std::size_t>(n_steps) + 1);

  State y = state0;
  double t = t0;
  for (long k = 0; k < n_steps; ++k) {
    const double t_next = k + 1 == n_steps ? t1 : t0 + static_cast<double>(k + 1) * step;
    const double h = t_next - t;
    const State& k1 = derivs.back();
    const State k2 = f(t + 0.5 * h, y + 0.5 * h * k1);
    const State k3 = f(t + 0.5 * h, y + 0.5 * h * k2);
    const State k4 = f(t + h, y + h * k3);
    y += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    t = t_next;
    if (!y.allFinite()) {
      throw Error(ErrorKind::NonFinite,
                  "rk4_solve: state left the floating range at t = " + std::to_string(t));
    }
    if (observer) observer(t, y);
    times.push_back(t);
    states.push_back(y);
    derivs.push_back(f(t, y));
  }
  return Trajectory(std::move(times), std::move(states), std::move(derivs));
}

}  // namespace occtime::numerics
