#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include <Eigen/Core>

#include "occtime/filippov.hpp"
#include "occtime/grid.hpp"
#include "occtime/occupation.hpp"

namespace occtime {

enum class Record { final_state, final_state_and_occupation, full_path };

/// Euler-Maruyama settings. The last step is shortened so every path ends
/// exactly at t_final. threads == 0 means: OCCTIME_THREADS if set, else the
/// hardware concurrency. Results never depend on the thread count.
struct SimConfig {
  std::int64_t n_paths = 10000;
  double dt = 1e-4;
  double t_final = 1.0;
  std::uint64_t seed = 0;
  Record record = Record::final_state;
  /// Extra sampling times for Record::full_path (snapped to the step grid;
  /// t_final is always included).
  std::vector<double> observation_times;
  int threads = 0;

  void validate() const;
  int resolved_threads() const;
};

struct TwoValuedSamples {
  std::vector<double> x;
  /// Time spent in [0, inf); empty unless occupation was requested.
  std::vector<double> occupation;
};

/// Path i uses its own generator seeded from (seed, i).
TwoValuedSamples simulate_two_valued(const TwoValuedDriftSpec& spec, const SimConfig& cfg);

struct FilippovSamples {
  std::vector<double> times;
  /// One n_paths x N matrix per entry of times.
  std::vector<Eigen::MatrixXd> states;
};

/// Starts at (0, y0). x == 0 steps with the right-hand drift. Throws
/// Error{NonFinite} naming the lowest diverging path index.
FilippovSamples simulate_filippov(const FilippovSystem& system, const NoiseSpec& noise,
                                  const VectorXd& y0, const SimConfig& cfg);

struct Histogram {
  std::vector<double> edges;
  std::vector<std::uint64_t> counts;
  /// counts / (in_range * width): unit area over the in-range samples.
  std::vector<double> density;
  std::uint64_t total = 0;
  std::uint64_t in_range = 0;

  std::vector<double> centers() const;
  /// Bin centres and densities as a grid.
  DensityGrid as_grid(const std::string& axis = "x") const;
  std::string to_csv() const;
};

/// Uniform bins on [lo, hi]; the last bin is closed on the right. Throws
/// Error{EmptyRange} if the range is degenerate or no sample lands in it.
Histogram build_histogram(const std::vector<double>& samples, int n_bins, double lo, double hi);

/// Trapezoid of |A - B| over the union of both abscissae, each grid linearly
/// interpolated and taken as 0 outside its own support. Throws
/// Error{MismatchedGrids} when the supports do not overlap.
double l1_distance(const DensityGrid& a, const DensityGrid& b);

/// sup |ECDF - cdf| over the sample.
double ks_distance(std::vector<double> samples, const std::function<double(double)>& cdf);

}  // namespace occtime
