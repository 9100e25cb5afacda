#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace occtime {

enum class ErrorKind {
  Domain,
  NonConvergence,
  Overflow,
  NonFinite,
  SingularCovariance,
  NotStableSliding,
  LeftSlidingRegion,
  IndependenceViolated,
  EmptyRange,
  MismatchedGrids,
  InvalidConfig,
  Io,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// Base exception for every failure raised by the library. The kind lets
/// front ends map failures onto exit codes without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Adaptive quadrature ran out of subdivisions. Carries the best estimate so
/// callers can decide whether it is usable anyway.
class NonConvergenceError : public Error {
 public:
  NonConvergenceError(const std::string& what, double estimate, double error_bound)
      : Error(ErrorKind::NonConvergence, what),
        estimate_(estimate),
        error_bound_(error_bound) {}

  double estimate() const noexcept { return estimate_; }
  double error_bound() const noexcept { return error_bound_; }

 private:
  double estimate_;
  double error_bound_;
};

/// The deterministic sliding solution left the stable sliding region.
class LeftSlidingRegionError : public Error {
 public:
  LeftSlidingRegionError(const std::string& what, double exit_time)
      : Error(ErrorKind::LeftSlidingRegion, what), exit_time_(exit_time) {}

  double exit_time() const noexcept { return exit_time_; }

 private:
  double exit_time_;
};

}  // namespace occtime
