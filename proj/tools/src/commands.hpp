#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"
#include "occtime/errors.hpp"

namespace occtime::cli {

/// Process exit status for a library error.
///   2 invalid input, 3 NonConvergence, 4 sliding region violated,
///   5 IndependenceViolated, 6 NonFinite, 7 MismatchedGrids, 1 anything else.
int exit_code(ErrorKind kind) noexcept;

/// Entry point shared by the executable and the tests.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

struct FigureBudget {
  std::string name;
  std::int64_t paths = 10000;
  double dt = 1e-4;
};
/// "desk" or "paper"; throws Error{Domain} otherwise.
FigureBudget figure_budget(const std::string& name);

/// Five scaled occupation-time curves (a_L = 2, a_R = 1) and the Gaussian
/// overlay at t = 10. Returns the summary that reproduce writes.
nlohmann::ordered_json reproduce_figure1(const std::string& outdir,
                                         std::vector<std::string>& outputs);

/// Simulates the built-in sliding example at eps = 0.1 from y0 = 2 and, per
/// panel time, writes the y histogram and the short- and long-time curves.
nlohmann::ordered_json reproduce_figure2(const std::string& outdir, const FigureBudget& budget,
                                         std::uint64_t seed, std::vector<std::string>& outputs);

/// Panel times and L1 thresholds used by reproduce_figure2.
inline const std::vector<double> kFigure2Times{0.1, 0.5, 1.0, 2.0};
inline constexpr double kFigure2ShortTime = 0.1;
inline constexpr double kFigure2LongTime = 2.0;
inline constexpr double kFigure2Threshold = 0.1;

}  // namespace occtime::cli
