#include "occtime/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <random>
#include <thread>

#include "occtime/errors.hpp"

namespace occtime {

namespace {

std::mt19937_64 path_generator(std::uint64_t seed, std::uint64_t path) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(path), static_cast<std::uint32_t>(path >> 32)};
  return std::mt19937_64(seq);
}

struct StepGrid {
  long steps = 0;
  double dt = 0.0;
  double last = 0.0;  // length of the final step

  StepGrid(double dt_, double t_final) : dt(dt_) {
    steps = std::max(1L, static_cast<long>(std::ceil(t_final / dt_ - 1e-9)));
    last = t_final - static_cast<double>(steps - 1) * dt_;
  }
  double step(long k) const { return k + 1 == steps ? last : dt; }
};

// Runs body(path) for every path on `threads` workers over contiguous blocks.
// A NonFinite failure is reported for the lowest failing path; any other
// exception is rethrown as is.
void for_each_path(std::int64_t n_paths, int threads,
                   const std::function<void(std::int64_t)>& body) {
  const std::int64_t workers = std::clamp<std::int64_t>(threads, 1, std::max<std::int64_t>(n_paths, 1));
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(workers));
  std::vector<std::int64_t> first_bad(static_cast<std::size_t>(workers), -1);

  auto run = [&](std::int64_t w) {
    const std::int64_t begin = n_paths * w / workers;
    const std::int64_t end = n_paths * (w + 1) / workers;
    try {
      for (std::int64_t i = begin; i < end; ++i) {
        try {
          body(i);
        } catch (const Error& e) {
          if (e.kind() != ErrorKind::NonFinite) throw;
          first_bad[static_cast<std::size_t>(w)] = i;
          return;
        }
      }
    } catch (...) {
      errors[static_cast<std::size_t>(w)] = std::current_exception();
    }
  };

  if (workers == 1) {
    run(0);
  } else {
    std::vector<std::thread> pool;
    for (std::int64_t w = 0; w < workers; ++w) pool.emplace_back(run, w);
    for (auto& th : pool) th.join();
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  for (auto bad : first_bad) {
    if (bad >= 0) {
      throw Error(ErrorKind::NonFinite,
                  "simulation diverged on path " + std::to_string(bad));
    }
  }
}

}  // namespace

void SimConfig::validate() const {
  if (n_paths < 1) throw Error(ErrorKind::Domain, "SimConfig: n_paths must be at least 1");
  if (!(dt > 0.0) || !std::isfinite(dt)) {
    throw Error(ErrorKind::Domain, "SimConfig: dt must be positive");
  }
  if (!(t_final >= dt) || !std::isfinite(t_final)) {
    throw Error(ErrorKind::Domain, "SimConfig: t_final must be finite and at least dt");
  }
  if (threads < 0) throw Error(ErrorKind::Domain, "SimConfig: threads must be non-negative");
  for (double t : observation_times) {
    if (!(t >= 0.0 && t <= t_final)) {
      throw Error(ErrorKind::Domain, "SimConfig: observation times must lie in [0, t_final]");
    }
  }
}

int SimConfig::resolved_threads() const { return resolve_thread_count(threads); }

TwoValuedSamples simulate_two_valued(const TwoValuedDriftSpec& spec, const SimConfig& cfg) {
  spec.validate();
  cfg.validate();
  const StepGrid grid(cfg.dt, cfg.t_final);
  const bool track = cfg.record != Record::final_state;
  const auto n = static_cast<std::size_t>(cfg.n_paths);

  TwoValuedSamples out;
  out.x.assign(n, 0.0);
  if (track) out.occupation.assign(n, 0.0);

  const double sd = std::sqrt(spec.diffusion_scale * grid.dt);
  const double sd_last = std::sqrt(spec.diffusion_scale * grid.last);
  const double al = spec.rate_left;
  const double ar = spec.rate_right;

  for_each_path(cfg.n_paths, cfg.resolved_threads(), [&](std::int64_t i) {
    auto gen = path_generator(cfg.seed, static_cast<std::uint64_t>(i));
    std::normal_distribution<double> normal;
    double x = spec.x0;
    long inside = 0;
    const long full = grid.steps - 1;
    for (long k = 0; k < full; ++k) {
      const bool right = x >= 0.0;
      inside += right;
      x += (right ? -ar : al) * grid.dt + sd * normal(gen);
    }
    const bool right = x >= 0.0;
    x += (right ? -ar : al) * grid.last + sd_last * normal(gen);
    if (!std::isfinite(x)) throw Error(ErrorKind::NonFinite, "non-finite state");

    const auto idx = static_cast<std::size_t>(i);
    out.x[idx] = x;
    if (track) {
      const double tau = static_cast<double>(inside) * grid.dt + (right ? grid.last : 0.0);
      out.occupation[idx] = std::min(tau, cfg.t_final);
    }
  });
  return out;
}

FilippovSamples simulate_filippov(const FilippovSystem& system, const NoiseSpec& noise,
                                  const VectorXd& y0, const SimConfig& cfg) {
  cfg.validate();
  noise.validate(system.dimension());
  const int dim = system.dimension();
  if (y0.size() != dim - 1) {
    throw Error(ErrorKind::Domain, "simulate_filippov: y0 has the wrong length");
  }
  const StepGrid grid(cfg.dt, cfg.t_final);

  // Observation indices on the step grid, ascending, always ending at t_final.
  std::vector<long> marks;
  if (cfg.record == Record::full_path) {
    for (double t : cfg.observation_times) {
      marks.push_back(std::clamp(std::lround(t / grid.dt), 0L, grid.steps));
    }
  }
  marks.push_back(grid.steps);
  std::sort(marks.begin(), marks.end());
  marks.erase(std::unique(marks.begin(), marks.end()), marks.end());

  FilippovSamples out;
  for (long k : marks) {
    out.times.push_back(k == grid.steps ? cfg.t_final : static_cast<double>(k) * grid.dt);
    out.states.emplace_back(cfg.n_paths, dim);
  }

  const MatrixXd d = noise.matrix;
  const double sd = std::sqrt(noise.epsilon * grid.dt);
  const double sd_last = std::sqrt(noise.epsilon * grid.last);
  const auto& affine = system.affine();

  for_each_path(cfg.n_paths, cfg.resolved_threads(), [&](std::int64_t i) {
    auto gen = path_generator(cfg.seed, static_cast<std::uint64_t>(i));
    std::normal_distribution<double> normal;
    VectorXd z = VectorXd::Zero(dim);
    z.tail(dim - 1) = y0;
    VectorXd drift(dim);
    VectorXd xi(dim);
    std::size_t next = 0;

    auto record = [&](long k) {
      while (next < marks.size() && marks[next] == k) {
        if (!z.allFinite()) throw Error(ErrorKind::NonFinite, "non-finite state");
        out.states[next].row(i) = z.transpose();
        ++next;
      }
    };

    record(0);
    for (long k = 0; k < grid.steps; ++k) {
      const double h = grid.step(k);
      const bool right = z(0) >= 0.0;
      if (affine) {
        if (right) {
          drift.noalias() = affine->a_right * z;
          drift += affine->c_right;
        } else {
          drift.noalias() = affine->a_left * z;
          drift += affine->c_left;
        }
      } else {
        drift = right ? system.drift_right(z(0), z.tail(dim - 1))
                      : system.drift_left(z(0), z.tail(dim - 1));
      }
      for (int j = 0; j < dim; ++j) xi(j) = normal(gen);
      z += h * drift;
      z.noalias() += (k + 1 == grid.steps ? sd_last : sd) * (d * xi);
      record(k + 1);
    }
  });
  return out;
}

std::vector<double> Histogram::centers() const {
  std::vector<double> c(counts.size());
  for (std::size_t i = 0; i < c.size(); ++i) c[i] = 0.5 * (edges[i] + edges[i + 1]);
  return c;
}

DensityGrid Histogram::as_grid(const std::string& axis) const {
  DensityGrid g;
  g.axis = axis;
  g.abscissae = centers();
  g.values = density;
  return g;
}

std::string Histogram::to_csv() const {
  std::string out = "left,right,center,count,density\n";
  for (std::size_t i = 0; i < counts.size(); ++i) {
    out += format_double(edges[i]) + ',' + format_double(edges[i + 1]) + ',' +
           format_double(0.5 * (edges[i] + edges[i + 1])) + ',' + std::to_string(counts[i]) +
           ',' + format_double(density[i]) + '\n';
  }
  return out;
}

Histogram build_histogram(const std::vector<double>& samples, int n_bins, double lo, double hi) {
  if (n_bins < 1) throw Error(ErrorKind::Domain, "build_histogram: n_bins must be at least 1");
  if (!(hi > lo) || !std::isfinite(lo) || !std::isfinite(hi)) {
    throw Error(ErrorKind::EmptyRange, "build_histogram: degenerate range");
  }
  Histogram h;
  h.edges.resize(static_cast<std::size_t>(n_bins) + 1);
  const double width = (hi - lo) / n_bins;
  for (int i = 0; i <= n_bins; ++i) h.edges[static_cast<std::size_t>(i)] = lo + width * i;
  h.edges.back() = hi;
  h.counts.assign(static_cast<std::size_t>(n_bins), 0);
  h.total = samples.size();
  for (double s : samples) {
    if (!(s >= lo && s <= hi)) continue;
    auto bin = static_cast<long>((s - lo) / width);
    bin = std::clamp(bin, 0L, static_cast<long>(n_bins) - 1);
    ++h.counts[static_cast<std::size_t>(bin)];
    ++h.in_range;
  }
  if (h.in_range == 0) {
    throw Error(ErrorKind::EmptyRange, "build_histogram: no sample falls in the range");
  }
  h.density.resize(h.counts.size());
  for (std::size_t i = 0; i < h.counts.size(); ++i) {
    h.density[i] = static_cast<double>(h.counts[i]) / (static_cast<double>(h.in_range) * width);
  }
  return h;
}

double l1_distance(const DensityGrid& a, const DensityGrid& b) {
  a.validate();
  b.validate();
  if (a.upper() < b.lower() || b.upper() < a.lower()) {
    throw Error(ErrorKind::MismatchedGrids, "l1_distance: grid supports do not overlap");
  }
  std::vector<double> xs(a.abscissae);
  xs.insert(xs.end(), b.abscissae.begin(), b.abscissae.end());
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());

  // A grid drops to 0 just outside its support; the jump sits at the edge
  // point, so integrate each panel from its own interpolants.
  double sum = 0.0;
  for (std::size_t i = 1; i < xs.size(); ++i) {
    const double lo = xs[i - 1];
    const double hi = xs[i];
    const double mid = 0.5 * (lo + hi);
    auto side = [&](const DensityGrid& g, double x) {
      return mid >= g.lower() && mid <= g.upper() ? interpolate(g, x) : 0.0;
    };
    const double d0 = side(a, lo) - side(b, lo);
    const double d1 = side(a, hi) - side(b, hi);
    // Exact integral of |linear| over the panel.
    if (d0 * d1 >= 0.0) {
      sum += 0.5 * (hi - lo) * (std::abs(d0) + std::abs(d1));
    } else {
      sum += 0.5 * (hi - lo) * (d0 * d0 + d1 * d1) / (std::abs(d0) + std::abs(d1));
    }
  }
  return sum;
}

double ks_distance(std::vector<double> samples, const std::function<double(double)>& cdf) {
  if (samples.empty()) throw Error(ErrorKind::EmptyRange, "ks_distance: no samples");
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double worst = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double f = cdf(samples[i]);
    worst = std::max({worst, std::abs(f - static_cast<double>(i) / n),
                      std::abs(static_cast<double>(i + 1) / n - f)});
  }
  return worst;
}

}  // namespace occtime
