#include "occtime/grid.hpp"

#include <unistd.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include "occtime/errors.hpp"

namespace occtime {

void DensityGrid::validate() const {
  if (abscissae.size() != values.size()) {
    throw Error(ErrorKind::Domain, "DensityGrid: abscissae and values differ in length");
  }
  if (abscissae.size() < 2) {
    throw Error(ErrorKind::Domain, "DensityGrid: need at least two points");
  }
  for (std::size_t i = 0; i < abscissae.size(); ++i) {
    if (!std::isfinite(abscissae[i]) || (i > 0 && !(abscissae[i] > abscissae[i - 1]))) {
      throw Error(ErrorKind::Domain, "DensityGrid: abscissae must be finite and increasing");
    }
    if (!std::isfinite(values[i]) || values[i] < 0.0) {
      throw Error(ErrorKind::Domain, "DensityGrid: values must be finite and non-negative");
    }
  }
}

int resolve_thread_count(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("OCCTIME_THREADS")) {
    char* end = nullptr;
    const long n = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && n > 0) return static_cast<int>(n);
  }
  return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

std::vector<double> linspace(double lo, double hi, int n) {
  if (n < 2 || !(hi > lo)) {
    throw Error(ErrorKind::Domain, "linspace: need n >= 2 and hi > lo");
  }
  std::vector<double> out(static_cast<std::size_t>(n));
  const double h = (hi - lo) / (n - 1);
  for (int i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = lo + h * i;
  out.back() = hi;
  return out;
}

DensityGrid sample_grid(std::string axis, std::vector<double> abscissae,
                        const std::function<double(double)>& f, int threads) {
  DensityGrid grid;
  grid.axis = std::move(axis);
  grid.abscissae = std::move(abscissae);
  grid.values.assign(grid.abscissae.size(), 0.0);

  const std::size_t n = grid.abscissae.size();
  const std::size_t workers =
      std::min(static_cast<std::size_t>(std::max(threads, 1)), std::max<std::size_t>(n, 1));
  auto fill = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) grid.values[i] = f(grid.abscissae[i]);
  };
  if (workers == 1) {
    fill(0, n);
    return grid;
  }

  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        fill(n * w / workers, n * (w + 1) / workers);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return grid;
}

double trapezoid(const std::vector<double>& x, const std::vector<double>& y) {
  double sum = 0.0;
  for (std::size_t i = 1; i < x.size(); ++i) sum += 0.5 * (x[i] - x[i - 1]) * (y[i] + y[i - 1]);
  return sum;
}

double grid_mass(const DensityGrid& grid) { return trapezoid(grid.abscissae, grid.values); }

Moments grid_moments(const DensityGrid& grid) {
  const auto& x = grid.abscissae;
  std::vector<double> first(x.size());
  std::vector<double> second(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    first[i] = x[i] * grid.values[i];
    second[i] = x[i] * x[i] * grid.values[i];
  }
  Moments m;
  m.mass = grid_mass(grid);
  if (!(m.mass > 0.0)) throw Error(ErrorKind::Domain, "grid_moments: zero mass");
  m.mean = trapezoid(x, first) / m.mass;
  m.stddev = std::sqrt(std::max(0.0, trapezoid(x, second) / m.mass - m.mean * m.mean));
  return m;
}

double interpolate(const DensityGrid& grid, double x) {
  const auto& a = grid.abscissae;
  if (a.empty() || x < a.front() || x > a.back()) return 0.0;
  auto it = std::upper_bound(a.begin(), a.end(), x);
  if (it == a.end()) return grid.values.back();
  const auto i = static_cast<std::size_t>(it - a.begin());
  if (i == 0) return grid.values.front();
  const double w = (x - a[i - 1]) / (a[i] - a[i - 1]);
  return (1.0 - w) * grid.values[i - 1] + w * grid.values[i];
}

std::string format_double(double v) {
  char buf[64];
  const int n = std::snprintf(buf, sizeof buf, "%.17g", v);
  return std::string(buf, static_cast<std::size_t>(n));
}

std::string grid_to_csv(const DensityGrid& grid) {
  std::string out = grid.axis + ",density\n";
  for (std::size_t i = 0; i < grid.abscissae.size(); ++i) {
    out += format_double(grid.abscissae[i]);
    out += ',';
    out += format_double(grid.values[i]);
    out += '\n';
  }
  return out;
}

namespace {

std::vector<std::string> split_row(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) cells.push_back(cell);
  return cells;
}

double parse_number(const std::string& cell, std::size_t line) {
  double v = 0.0;
  const char* end = cell.data() + cell.size();
  auto [ptr, ec] = std::from_chars(cell.data(), end, v);
  if (ec != std::errc() || ptr != end) {
    throw Error(ErrorKind::Io, "CSV line " + std::to_string(line) + ": bad number '" + cell + "'");
  }
  return v;
}

}  // namespace

// Accepts plain grids ("<axis>,density") and histogram tables, where the
// "center" column is used as the abscissa.
DensityGrid grid_from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorKind::Io, "CSV: empty input");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto header = split_row(line);
  auto column = [&](const std::string& name) -> long {
    auto it = std::find(header.begin(), header.end(), name);
    return it == header.end() ? -1 : static_cast<long>(it - header.begin());
  };
  const long value_col = column("density");
  if (value_col < 0 || header.size() < 2) {
    throw Error(ErrorKind::Io, "CSV: header must contain a 'density' column");
  }
  long axis_col = column("center");
  if (axis_col < 0) axis_col = value_col == 0 ? 1 : 0;

  DensityGrid grid;
  grid.axis = header[static_cast<std::size_t>(axis_col)];
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto cells = split_row(line);
    if (cells.size() != header.size()) {
      throw Error(ErrorKind::Io, "CSV line " + std::to_string(lineno) + ": wrong column count");
    }
    grid.abscissae.push_back(parse_number(cells[static_cast<std::size_t>(axis_col)], lineno));
    grid.values.push_back(parse_number(cells[static_cast<std::size_t>(value_col)], lineno));
  }
  return grid;
}

void write_file_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  const fs::path tmp = target.string() + ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::Io, "cannot open " + tmp.string() + " for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw Error(ErrorKind::Io, "write to " + tmp.string() + " failed");
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw Error(ErrorKind::Io, "cannot rename onto " + path);
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_grid_csv(const std::string& path, const DensityGrid& grid) {
  write_file_atomic(path, grid_to_csv(grid));
}

DensityGrid read_grid_csv(const std::string& path) { return grid_from_csv(read_file(path)); }

}  // namespace occtime
