#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

namespace occtime {

/// A density sampled on sorted abscissae.
struct DensityGrid {
  std::string axis = "x";
  std::vector<double> abscissae;
  std::vector<double> values;
  /// Free-form key/value echo of how the grid was produced.
  std::vector<std::pair<std::string, std::string>> metadata;

  /// Throws Error{Domain} on size mismatch, unsorted abscissae or
  /// non-finite/negative values.
  void validate() const;
  std::size_t size() const noexcept { return abscissae.size(); }
  double lower() const { return abscissae.front(); }
  double upper() const { return abscissae.back(); }
};

/// Worker count for parallel loops: `requested` if positive, else
/// OCCTIME_THREADS if set to a positive integer, else the hardware
/// concurrency.
int resolve_thread_count(int requested = 0);

/// n evenly spaced points on [lo, hi] (n >= 2).
std::vector<double> linspace(double lo, double hi, int n);

/// Evaluates f at every abscissa. With threads > 1 the points are split into
/// contiguous blocks; each point is written by exactly one thread, so the
/// result does not depend on the thread count.
DensityGrid sample_grid(std::string axis, std::vector<double> abscissae,
                        const std::function<double(double)>& f, int threads = 1);

double trapezoid(const std::vector<double>& x, const std::vector<double>& y);
double grid_mass(const DensityGrid& grid);

struct Moments {
  double mass = 0.0;
  double mean = 0.0;
  double stddev = 0.0;
};
/// Trapezoid moments, mean and stddev normalised by the mass.
Moments grid_moments(const DensityGrid& grid);

/// Linear interpolation, 0 outside [lower, upper].
double interpolate(const DensityGrid& grid, double x);

/// Decimal text that parses back to the same double ("%.17g").
std::string format_double(double v);

/// CSV with header "<axis>,density", one row per abscissa, LF endings.
std::string grid_to_csv(const DensityGrid& grid);
DensityGrid grid_from_csv(const std::string& text);

/// Writes to a temporary file in the same directory, then renames it over
/// `path`. Throws Error{Io}.
void write_file_atomic(const std::string& path, const std::string& content);
std::string read_file(const std::string& path);

void write_grid_csv(const std::string& path, const DensityGrid& grid);
DensityGrid read_grid_csv(const std::string& path);

}  // namespace occtime
