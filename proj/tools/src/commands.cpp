#include "commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <functional>
#include <numbers>
#include <optional>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "config.hpp"
#include "manifest.hpp"
#include "occtime/grid.hpp"
#include "occtime/montecarlo.hpp"
#include "occtime/numerics/gaussian.hpp"
#include "occtime/occupation.hpp"
#include "occtime/sliding_long.hpp"
#include "occtime/sliding_short.hpp"

namespace occtime::cli {

using json = nlohmann::ordered_json;

namespace {

[[noreturn]] void bad_flag(const std::string& msg) { throw Error(ErrorKind::Domain, msg); }

void require_positive(double v, const char* flag) {
  if (!(v > 0.0) || !std::isfinite(v)) bad_flag(std::string(flag) + " must be positive");
}

void require_finite(double v, const char* flag) {
  if (!std::isfinite(v)) bad_flag(std::string(flag) + " must be finite");
}

void require_grid(int n, const char* flag) {
  if (n < 2) bad_flag(std::string(flag) + " must be at least 2");
}

// Midpoints of n equal cells on (lo, hi); never hits an endpoint where
// occupation densities are infinite.
std::vector<double> cell_midpoints(double lo, double hi, int n) {
  std::vector<double> out(static_cast<std::size_t>(n));
  const double h = (hi - lo) / n;
  for (int i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = lo + h * (i + 0.5);
  return out;
}

struct Session {
  std::string command_line;
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
  std::string config_text;
  std::optional<std::uint64_t> seed;
  std::vector<std::string> outputs;

  void finish(const std::string& primary) {
    RunManifest m;
    m.command = command_line;
    m.config_hash = hex64(fnv1a64(config_text.empty() ? command_line : config_text));
    m.seed = seed;
    m.version = software_version();
    m.wall_time_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    m.outputs = outputs;
    write_manifest(primary, m);
  }
};

std::string bytes_of(const std::vector<const std::vector<double>*>& columns) {
  std::string out;
  for (const auto* col : columns) {
    out.append(reinterpret_cast<const char*>(col->data()), col->size() * sizeof(double));
  }
  return out;
}

// ---------------------------------------------------------------- occupation

struct OccupationArgs {
  double al = 0.0, ar = 0.0, x0 = 0.0, t = 1.0;
  int grid = 256;
  std::string out;
  bool asymptotic = false;
  std::string special;
};

void occupation_pdf_cmd(const OccupationArgs& a, Session& s, std::ostream& os) {
  require_finite(a.al, "--aL");
  require_finite(a.ar, "--aR");
  require_finite(a.x0, "--x0");
  require_positive(a.t, "--t");
  require_grid(a.grid, "--grid");
  if (a.asymptotic && !a.special.empty()) bad_flag("--asymptotic and --special are exclusive");

  TwoValuedDriftSpec spec;
  spec.rate_left = a.al;
  spec.rate_right = a.ar;
  spec.x0 = a.x0;
  spec.horizon = a.t;

  std::function<double(double)> f;
  double atom0 = 0.0, atom_t = 0.0;
  if (a.special == "arcsine") {
    if (a.al != 0.0 || a.ar != 0.0 || a.x0 != 0.0) {
      bad_flag("--special arcsine needs --aL 0 --aR 0 --x0 0");
    }
    f = [t = a.t](double tau) { return arcsine_pdf(tau, t); };
  } else if (a.special == "constant-drift") {
    if (a.al != -a.ar || a.x0 != 0.0) bad_flag("--special constant-drift needs --aL = -aR and --x0 0");
    f = [t = a.t, d = a.ar](double tau) { return constant_drift_pdf(tau, t, d); };
  } else if (!a.special.empty()) {
    bad_flag("--special must be arcsine or constant-drift");
  } else if (a.asymptotic) {
    if (a.x0 != 0.0) bad_flag("--asymptotic needs --x0 0");
    if (a.al == 0.0 || a.ar == 0.0) bad_flag("--asymptotic needs non-zero --aL and --aR");
    f = [&a](double tau) { return occupation_pdf_longtime(tau, a.t, a.al, a.ar); };
  } else {
    const auto atoms = occupation_pdf_general(0.5 * a.t, spec);
    atom0 = atoms.atom_at_zero;
    atom_t = atoms.atom_at_horizon;
    f = [spec](double tau) { return occupation_pdf_general(tau, spec).density; };
  }

  const DensityGrid grid =
      sample_grid("tau", cell_midpoints(0.0, a.t, a.grid), f, resolve_thread_count());

  json atoms;
  atoms["atom_at_zero"] = atom0;
  atoms["atom_at_horizon"] = atom_t;
  atoms["grid_mass"] = grid_mass(grid);
  atoms["a_L"] = a.al;
  atoms["a_R"] = a.ar;
  atoms["x0"] = a.x0;
  atoms["t"] = a.t;
  atoms["form"] = a.asymptotic ? "asymptotic" : a.special.empty() ? "exact" : a.special;

  write_grid_csv(a.out, grid);
  write_file_atomic(a.out + ".atoms.json", atoms.dump(2) + "\n");
  s.outputs = {a.out, a.out + ".atoms.json"};
  s.finish(a.out);
  os << "wrote " << a.out << " (" << grid.size() << " points, mass "
     << grid_mass(grid) + atom0 + atom_t << ")\n";
}

// ---------------------------------------------------------------- sliding

struct SlidingArgs {
  std::string config;
  double t = 1.0;
  std::string mode;
  int grid = 256;
  std::string out;
  std::optional<double> lo, hi;
  int component = 0;
};

// One coordinate of a frozen parameter set, as a one-dimensional problem.
FrozenDriftParams restrict_component(const FrozenDriftParams& p, int k) {
  FrozenDriftParams q = p;
  q.parallel_left = VectorXd::Constant(1, p.parallel_left(k));
  q.parallel_right = VectorXd::Constant(1, p.parallel_right(k));
  q.y0 = VectorXd::Constant(1, p.y0(k));
  q.gamma = MatrixXd::Constant(1, 1, p.gamma(k, k));
  q.beta = VectorXd::Constant(1, p.beta(k));
  return q;
}

std::string trajectory_csv(const SlidingTrajectory& traj) {
  const auto nodes = traj.nodes();
  const Eigen::Index m = nodes.front().y.size();
  std::string out = "t";
  for (Eigen::Index i = 0; i < m; ++i) out += ",y_S_" + std::to_string(i);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < m; ++j) {
      out += ",theta_" + std::to_string(i) + "_" + std::to_string(j);
    }
  }
  out += '\n';
  for (const auto& n : nodes) {
    out += format_double(n.t);
    for (Eigen::Index i = 0; i < m; ++i) out += ',' + format_double(n.y(i));
    for (Eigen::Index i = 0; i < m; ++i) {
      for (Eigen::Index j = 0; j < m; ++j) out += ',' + format_double(n.theta(i, j));
    }
    out += '\n';
  }
  return out;
}

std::pair<double, double> pick_range(const SlidingArgs& a, double lo, double hi) {
  const double l = a.lo.value_or(lo);
  const double h = a.hi.value_or(hi);
  if (!(h > l)) bad_flag("--max must exceed --min");
  return {l, h};
}

void sliding_pdf_cmd(const SlidingArgs& a, Session& s, std::ostream& os) {
  require_positive(a.t, "--t");
  require_grid(a.grid, "--grid");
  const SystemConfig cfg = load_config(a.config);
  s.config_text = cfg.text;
  if (!cfg.is_filippov()) bad_flag("--config must describe a sliding system, not two_valued");
  const FilippovSystem& system = *cfg.system;
  const int m = system.parallel_dimension();
  if (a.component < 0 || a.component >= m) {
    bad_flag("--component must lie in [0, " + std::to_string(m - 1) + "]");
  }
  const int threads = resolve_thread_count();
  const int k = a.component;
  s.outputs = {a.out};

  if (a.mode == "short-parallel" || a.mode == "short-orthogonal") {
    const FrozenDriftParams full = frozen_params_from_system(system, cfg.noise, cfg.y0);
    DensityGrid grid;
    if (a.mode == "short-parallel") {
      if (full.beta.cwiseAbs().maxCoeff() > 1e-12) {
        throw Error(ErrorKind::IndependenceViolated,
                    "short-parallel needs independent x and y noise (beta = 0)");
      }
      const FrozenDriftParams p = restrict_component(full, k);
      const double e1 = p.y0(0) + p.parallel_left(0) * a.t;
      const double e2 = p.y0(0) + p.parallel_right(0) * a.t;
      const double sd = std::sqrt(p.epsilon * a.t * p.gamma(0, 0));
      const auto [lo, hi] = pick_range(a, std::min(e1, e2) - 6 * sd, std::max(e1, e2) + 6 * sd);
      grid = sample_grid("y" + std::to_string(k), linspace(lo, hi, a.grid), [&](double y) {
        return parallel_pdf(VectorXd::Constant(1, y), a.t, p);
      }, threads);
    } else {
      const double e = full.orthogonal_scale();
      const double spread = 6.0 * std::sqrt(e * a.t);
      const double left = std::min(spread, 8.0 * e / full.rate_left);
      const double right = std::min(spread, 8.0 * e / full.rate_right);
      const auto [lo, hi] = pick_range(a, -left, right);
      grid = sample_grid("x", linspace(lo, hi, a.grid),
                         [&](double x) { return orthogonal_pdf(x, a.t, full); }, threads);
    }
    write_grid_csv(a.out, grid);
    s.finish(a.out);
    os << "wrote " << a.out << " (" << grid.size() << " points, mass " << grid_mass(grid) << ")\n";
    return;
  }

  if (a.mode != "long-joint" && a.mode != "long-marginal-y") {
    bad_flag("--mode must be short-parallel, short-orthogonal, long-joint or long-marginal-y");
  }
  const SlidingTrajectory traj = covariance(system, cfg.noise, cfg.y0, a.t);
  const SlidingState state = traj.final_state();
  const LongTimeDensity density(system, cfg.noise, state);
  const double mean = state.y(k);
  const double var = cfg.noise.epsilon * state.theta(k, k);
  const double sd = std::sqrt(var);

  std::string body;
  if (a.mode == "long-marginal-y") {
    const auto [lo, hi] = pick_range(a, mean - 6 * sd, mean + 6 * sd);
    const DensityGrid grid =
        sample_grid("y" + std::to_string(k), linspace(lo, hi, a.grid),
                    [&](double y) { return numerics::normal_pdf(y, mean, var); }, threads);
    body = grid_to_csv(grid);
  } else {
    const double e = cfg.noise.epsilon * cfg.noise.alpha();
    const auto xs = linspace(-8.0 * e / density.rate_left(), 8.0 * e / density.rate_right(), a.grid);
    const auto [lo, hi] = pick_range(a, mean - 6 * sd, mean + 6 * sd);
    const auto ys = linspace(lo, hi, a.grid);
    body = "x,y" + std::to_string(k) + ",density\n";
    for (double x : xs) {
      const double px = density.marginal_x(x);
      for (double y : ys) {
        body += format_double(x) + ',' + format_double(y) + ',' +
                format_double(px * numerics::normal_pdf(y, mean, var)) + '\n';
      }
    }
  }
  write_file_atomic(a.out, body);
  const std::string side = a.out + ".trajectory.csv";
  write_file_atomic(side, trajectory_csv(traj));
  s.outputs.push_back(side);
  s.finish(a.out);
  os << "wrote " << a.out << " and " << side << " (y_S = " << mean << ", Theta = "
     << state.theta(k, k) << ")\n";
}

// ---------------------------------------------------------------- simulate

struct SimulateArgs {
  std::string config;
  std::int64_t paths = 10000;
  double dt = 1e-4;
  double t = 1.0;
  std::uint64_t seed = 0;
  std::string record = "state";
  int bins = 50;
  std::string out;
  std::string raw;
  std::optional<double> lo, hi;
  int component = -1;
};

void simulate_cmd(const SimulateArgs& a, Session& s, std::ostream& os) {
  if (a.paths < 1) bad_flag("--paths must be at least 1");
  require_positive(a.dt, "--dt");
  require_positive(a.t, "--t");
  if (a.dt > a.t) bad_flag("--dt must not exceed --t");
  if (a.bins < 1) bad_flag("--bins must be at least 1");
  if (a.record != "state" && a.record != "occupation") bad_flag("--record must be occupation or state");

  const SystemConfig cfg = load_config(a.config);
  s.config_text = cfg.text;
  s.seed = a.seed;

  SimConfig sim;
  sim.n_paths = a.paths;
  sim.dt = a.dt;
  sim.t_final = a.t;
  sim.seed = a.seed;

  std::vector<double> samples;
  std::vector<std::vector<double>> columns;
  double lo = 0.0, hi = 0.0;

  if (!cfg.is_filippov()) {
    TwoValuedDriftSpec spec = cfg.two_valued;
    spec.horizon = a.t;
    sim.record = Record::final_state_and_occupation;
    auto r = simulate_two_valued(spec, sim);
    if (a.record == "occupation") {
      samples = r.occupation;
      lo = 0.0;
      hi = a.t;
    } else {
      samples = r.x;
    }
    columns = {std::move(r.x), std::move(r.occupation)};
  } else {
    if (a.record == "occupation") bad_flag("--record occupation needs a two_valued config");
    const int dim = cfg.system->dimension();
    const int comp = a.component < 0 ? 1 : a.component;
    if (comp >= dim) bad_flag("--component must be below " + std::to_string(dim));
    sim.record = Record::final_state;
    const auto r = simulate_filippov(*cfg.system, cfg.noise, cfg.y0, sim);
    const MatrixXd& final = r.states.back();
    for (int j = 0; j < dim; ++j) {
      columns.emplace_back(final.col(j).data(), final.col(j).data() + final.rows());
    }
    samples = columns[static_cast<std::size_t>(comp)];
  }
  if (a.record == "state" || cfg.is_filippov()) {
    const auto [mn, mx] = std::minmax_element(samples.begin(), samples.end());
    lo = *mn;
    hi = *mx;
  }
  lo = a.lo.value_or(lo);
  hi = a.hi.value_or(hi);

  const Histogram h = build_histogram(samples, a.bins, lo, hi);
  write_file_atomic(a.out, h.to_csv());
  s.outputs = {a.out};
  if (!a.raw.empty()) {
    std::vector<const std::vector<double>*> cols;
    for (const auto& c : columns) {
      if (!c.empty()) cols.push_back(&c);
    }
    write_file_atomic(a.raw, bytes_of(cols));
    s.outputs.push_back(a.raw);
  }
  s.finish(a.out);
  os << "wrote " << a.out << " (" << h.in_range << " of " << h.total << " samples in range)\n";
}

// ---------------------------------------------------------------- compare

struct CompareArgs {
  std::string analytic;
  std::string empirical;
  std::string metric = "l1";
  std::string out;
  std::optional<double> threshold;
};

// Kolmogorov distance between the CDFs implied by two tabulated densities,
// each normalised to unit mass and accumulated by the trapezoid rule.
double grid_ks(const DensityGrid& a, const DensityGrid& b) {
  if (a.upper() < b.lower() || b.upper() < a.lower()) {
    throw Error(ErrorKind::MismatchedGrids, "compare: grid supports do not overlap");
  }
  std::vector<double> xs(a.abscissae);
  xs.insert(xs.end(), b.abscissae.begin(), b.abscissae.end());
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  auto cdf = [&xs](const DensityGrid& g) {
    std::vector<double> v(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) v[i] = interpolate(g, xs[i]);
    std::vector<double> c(xs.size(), 0.0);
    for (std::size_t i = 1; i < xs.size(); ++i) {
      c[i] = c[i - 1] + 0.5 * (xs[i] - xs[i - 1]) * (v[i] + v[i - 1]);
    }
    const double total = c.back();
    if (!(total > 0.0)) throw Error(ErrorKind::Domain, "compare: grid has zero mass");
    for (double& x : c) x /= total;
    return c;
  };
  const auto ca = cdf(a);
  const auto cb = cdf(b);
  double worst = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) worst = std::max(worst, std::abs(ca[i] - cb[i]));
  return worst;
}

void compare_cmd(const CompareArgs& a, Session& s, std::ostream& os) {
  if (a.metric != "l1" && a.metric != "ks") bad_flag("--metric must be l1 or ks");
  const DensityGrid ga = read_grid_csv(a.analytic);
  const DensityGrid gb = read_grid_csv(a.empirical);
  s.config_text = read_file(a.analytic) + read_file(a.empirical);
  const double value = a.metric == "l1" ? l1_distance(ga, gb) : grid_ks(ga, gb);

  json report;
  report["metric"] = a.metric;
  report["value"] = value;
  report["grids"] = {{"analytic", a.analytic}, {"empirical", a.empirical}};
  if (a.threshold) {
    report["threshold"] = *a.threshold;
    report["pass"] = value <= *a.threshold;
  }
  write_file_atomic(a.out, report.dump(2) + "\n");
  s.outputs = {a.out};
  s.finish(a.out);
  os << a.metric << " = " << format_double(value) << "\n";
}

// ---------------------------------------------------------------- reproduce

std::string join_path(const std::string& dir, const std::string& name) {
  return (std::filesystem::path(dir) / name).string();
}

void make_outdir(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorKind::Io, "cannot create " + dir + ": " + ec.message());
}

std::string time_tag(double t) {
  std::ostringstream ss;
  ss << t;
  return ss.str();
}

}  // namespace

int exit_code(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::Domain:
    case ErrorKind::InvalidConfig:
    case ErrorKind::EmptyRange:
      return 2;
    case ErrorKind::NonConvergence:
      return 3;
    case ErrorKind::NotStableSliding:
    case ErrorKind::LeftSlidingRegion:
      return 4;
    case ErrorKind::IndependenceViolated:
      return 5;
    case ErrorKind::NonFinite:
      return 6;
    case ErrorKind::MismatchedGrids:
      return 7;
    default:
      return 1;
  }
}

FigureBudget figure_budget(const std::string& name) {
  if (name == "desk") return {"desk", 10000, 1e-4};
  if (name == "paper") return {"paper", 100000, 1e-5};
  bad_flag("--budget must be desk or paper");
}

json reproduce_figure1(const std::string& outdir, std::vector<std::string>& outputs) {
  constexpr double al = 2.0, ar = 1.0;
  constexpr int n = 400;
  const int threads = resolve_thread_count();
  make_outdir(outdir);
  json curves = json::array();

  for (double t : {0.1, 0.3, 1.0, 3.0, 10.0}) {
    TwoValuedDriftSpec spec;
    spec.rate_left = al;
    spec.rate_right = ar;
    spec.horizon = t;
    DensityGrid g = sample_grid("tau_over_t", cell_midpoints(0.0, 1.0, n), [&](double u) {
      return t * occupation_pdf_zero(u * t, spec);
    }, threads);
    const std::string path = join_path(outdir, "fig1_t" + time_tag(t) + ".csv");
    write_grid_csv(path, g);
    outputs.push_back(path);
    curves.push_back({{"t", t}, {"file", path}});
  }

  // Criterion: mean, std and L1 distance to the Gaussian at t = 10.
  constexpr double t = 10.0;
  TwoValuedDriftSpec spec;
  spec.rate_left = al;
  spec.rate_right = ar;
  spec.horizon = t;
  const double mean_ref = al * t / (al + ar);
  const double sd_ref = std::sqrt(t) / (al + ar);
  std::vector<double> pts{0.0};
  for (double k : {-4.0, -2.0, 0.0, 2.0, 4.0}) {
    const double p = mean_ref + k * sd_ref;
    if (p > 0.0 && p < t) pts.push_back(p);
  }
  pts.push_back(t);
  const numerics::QuadratureSpec quad{1e-12, 1e-10, 400};
  // Moments about mean_ref, so the variance does not cancel.
  auto moment = [&](int k) {
    return numerics::integrate_with_breakpoints(
        [&](double tau) { return std::pow(tau - mean_ref, k) * occupation_pdf_zero(tau, spec); },
        pts, quad, numerics::Singularity::inv_sqrt_both);
  };
  const double m0 = moment(0);
  const double shift = moment(1) / m0;
  const double mean = mean_ref + shift;
  const double sd = std::sqrt(moment(2) / m0 - shift * shift);

  const DensityGrid exact = sample_grid("tau_over_t", cell_midpoints(0.0, 1.0, 4000), [&](double u) {
    return t * occupation_pdf_zero(u * t, spec);
  }, threads);
  const DensityGrid gauss = sample_grid("tau_over_t", cell_midpoints(0.0, 1.0, 4000), [&](double u) {
    return t * occupation_pdf_longtime(u * t, t, al, ar);
  }, threads);
  const std::string gpath = join_path(outdir, "fig1_gaussian_t10.csv");
  write_grid_csv(gpath, gauss);
  outputs.push_back(gpath);
  const double l1 = l1_distance(exact, gauss);

  const bool mean_ok = std::abs(mean - mean_ref) <= 0.02 * mean_ref;
  const bool sd_ok = std::abs(sd - sd_ref) <= 0.02 * sd_ref;
  const bool l1_ok = l1 <= 0.05;
  json summary;
  summary["figure"] = 1;
  summary["a_L"] = al;
  summary["a_R"] = ar;
  summary["curves"] = curves;
  summary["gaussian_overlay"] = gpath;
  summary["criteria"] = json::array({json{{"id", 4},
                                          {"mean", mean},
                                          {"mean_expected", mean_ref},
                                          {"mean_pass", mean_ok},
                                          {"std", sd},
                                          {"std_expected", sd_ref},
                                          {"std_pass", sd_ok},
                                          {"l1_to_gaussian", l1},
                                          {"l1_threshold", 0.05},
                                          {"l1_pass", l1_ok},
                                          {"pass", mean_ok && sd_ok && l1_ok}}});
  return summary;
}

json reproduce_figure2(const std::string& outdir, const FigureBudget& budget, std::uint64_t seed,
                       std::vector<std::string>& outputs) {
  make_outdir(outdir);
  constexpr double epsilon = 0.1;
  constexpr int bins = 50;
  constexpr int points = 400;
  const FilippovSystem system = FilippovSystem::builtin_example();
  const NoiseSpec noise = NoiseSpec::builtin_example(epsilon);
  const VectorXd y0 = VectorXd::Constant(1, 2.0);
  const double t_end = kFigure2Times.back();
  const int threads = resolve_thread_count();

  SimConfig sim;
  sim.n_paths = budget.paths;
  sim.dt = budget.dt;
  sim.t_final = t_end;
  sim.seed = seed;
  sim.record = Record::full_path;
  sim.observation_times = kFigure2Times;
  const FilippovSamples samples = simulate_filippov(system, noise, y0, sim);

  const FrozenDriftParams frozen = frozen_params_from_system(system, noise, y0);
  const SlidingTrajectory traj = covariance(system, noise, y0, t_end);

  json panels = json::array();
  double short_l1 = NAN, long_l1 = NAN;
  for (std::size_t i = 0; i < samples.times.size(); ++i) {
    const double t = samples.times[i];
    const MatrixXd& st = samples.states[i];
    const std::vector<double> ys(st.col(1).data(), st.col(1).data() + st.rows());
    const auto [mn, mx] = std::minmax_element(ys.begin(), ys.end());
    const Histogram hist = build_histogram(ys, bins, *mn, *mx);

    const double pad = 0.1 * (*mx - *mn);
    const auto axis = linspace(*mn - pad, *mx + pad, points);
    const DensityGrid short_curve = sample_grid("y", axis, [&](double y) {
      return parallel_pdf(VectorXd::Constant(1, y), t, frozen);
    }, threads);
    const SlidingState state = traj.at(t);
    const double var = epsilon * state.theta(0, 0);
    const DensityGrid long_curve = sample_grid("y", axis, [&](double y) {
      return numerics::normal_pdf(y, state.y(0), var);
    }, threads);

    const std::string tag = "fig2_t" + time_tag(t);
    const std::string hpath = join_path(outdir, tag + "_hist.csv");
    const std::string spath = join_path(outdir, tag + "_short.csv");
    const std::string lpath = join_path(outdir, tag + "_long.csv");
    write_file_atomic(hpath, hist.to_csv());
    write_grid_csv(spath, short_curve);
    write_grid_csv(lpath, long_curve);
    outputs.insert(outputs.end(), {hpath, spath, lpath});

    const DensityGrid hgrid = hist.as_grid("y");
    const double l1_short = l1_distance(short_curve, hgrid);
    const double l1_long = l1_distance(long_curve, hgrid);
    if (t == kFigure2ShortTime) short_l1 = l1_short;
    if (t == kFigure2LongTime) long_l1 = l1_long;
    panels.push_back({{"t", t},
                      {"histogram", hpath},
                      {"short_time", spath},
                      {"long_time", lpath},
                      {"l1_short", l1_short},
                      {"l1_long", l1_long},
                      {"y_S", state.y(0)},
                      {"theta", state.theta(0, 0)}});
  }

  json summary;
  summary["figure"] = 2;
  summary["epsilon"] = epsilon;
  summary["y0"] = 2.0;
  summary["budget"] = {{"name", budget.name}, {"paths", budget.paths}, {"dt", budget.dt}};
  summary["seed"] = seed;
  summary["bins"] = bins;
  summary["panels"] = panels;
  summary["criteria"] = json::array({json{{"id", 7},
                                          {"short_time_t", kFigure2ShortTime},
                                          {"l1_short", short_l1},
                                          {"long_time_t", kFigure2LongTime},
                                          {"l1_long", long_l1},
                                          {"threshold", kFigure2Threshold},
                                          {"pass", short_l1 <= kFigure2Threshold &&
                                                       long_l1 <= kFigure2Threshold}}});
  return summary;
}

namespace {

struct ReproduceArgs {
  int figure = 0;
  std::string outdir;
  std::string budget = "desk";
  std::uint64_t seed = 0;
};

void reproduce_cmd(const ReproduceArgs& a, Session& s, std::ostream& os) {
  if (a.figure != 1 && a.figure != 2) bad_flag("--figure must be 1 or 2");
  const FigureBudget budget = figure_budget(a.budget);
  std::vector<std::string> outputs;
  json summary = a.figure == 1 ? reproduce_figure1(a.outdir, outputs)
                               : reproduce_figure2(a.outdir, budget, a.seed, outputs);
  if (a.figure == 2) s.seed = a.seed;
  const std::string path = join_path(a.outdir, "fig" + std::to_string(a.figure) + "_summary.json");
  write_file_atomic(path, summary.dump(2) + "\n");
  outputs.push_back(path);
  s.outputs = outputs;
  s.finish(path);
  for (const auto& c : summary["criteria"]) {
    os << "criterion " << c["id"].get<int>() << ": " << (c["pass"].get<bool>() ? "PASS" : "FAIL")
       << "\n";
  }
  os << "wrote " << outputs.size() << " files to " << a.outdir << "\n";
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Occupation-time densities and sliding-motion transition densities", "occtime"};
  app.require_subcommand(1);
  app.set_version_flag("--version", software_version());

  Session session;
  for (int i = 0; i < argc; ++i) {
    if (i) session.command_line += ' ';
    session.command_line += argv[i];
  }

  OccupationArgs occ;
  auto* c_occ = app.add_subcommand("occupation-pdf", "Occupation-time density on a grid");
  c_occ->add_option("--aL", occ.al, "Drift rate below 0")->required();
  c_occ->add_option("--aR", occ.ar, "Drift rate above 0")->required();
  c_occ->add_option("--x0", occ.x0, "Initial position");
  c_occ->add_option("--t", occ.t, "Horizon")->required();
  c_occ->add_option("--grid", occ.grid, "Number of grid cells");
  c_occ->add_option("--out", occ.out, "Output CSV")->required();
  c_occ->add_flag("--asymptotic", occ.asymptotic, "Use the large-t form");
  c_occ->add_option("--special", occ.special, "arcsine or constant-drift closed form");

  SlidingArgs sl;
  auto* c_sl = app.add_subcommand("sliding-pdf", "Short- or long-time sliding densities");
  c_sl->add_option("--config", sl.config, "System JSON")->required();
  c_sl->add_option("--t", sl.t, "Time")->required();
  c_sl->add_option("--mode", sl.mode, "short-parallel|short-orthogonal|long-joint|long-marginal-y")
      ->required();
  c_sl->add_option("--grid", sl.grid, "Points per axis");
  c_sl->add_option("--out", sl.out, "Output CSV")->required();
  c_sl->add_option("--min", sl.lo, "Lower end of the axis");
  c_sl->add_option("--max", sl.hi, "Upper end of the axis");
  c_sl->add_option("--component", sl.component, "Parallel coordinate to tabulate");

  SimulateArgs sim;
  auto* c_sim = app.add_subcommand("simulate", "Euler-Maruyama histogram");
  c_sim->add_option("--config", sim.config, "System JSON")->required();
  c_sim->add_option("--paths", sim.paths, "Number of paths");
  c_sim->add_option("--dt", sim.dt, "Step size");
  c_sim->add_option("--t", sim.t, "Final time")->required();
  c_sim->add_option("--seed", sim.seed, "Seed");
  c_sim->add_option("--record", sim.record, "occupation or state");
  c_sim->add_option("--bins", sim.bins, "Histogram bins");
  c_sim->add_option("--out", sim.out, "Histogram CSV")->required();
  c_sim->add_option("--raw", sim.raw, "Raw float64 columns");
  c_sim->add_option("--min", sim.lo, "Histogram lower edge");
  c_sim->add_option("--max", sim.hi, "Histogram upper edge");
  c_sim->add_option("--component", sim.component, "State component to histogram (sliding systems)");

  CompareArgs cmp;
  auto* c_cmp = app.add_subcommand("compare", "Distance between two tabulated densities");
  c_cmp->add_option("--analytic", cmp.analytic, "Grid CSV")->required();
  c_cmp->add_option("--empirical", cmp.empirical, "Grid or histogram CSV")->required();
  c_cmp->add_option("--metric", cmp.metric, "l1 or ks");
  c_cmp->add_option("--out", cmp.out, "Report JSON")->required();
  c_cmp->add_option("--threshold", cmp.threshold, "Pass threshold");

  ReproduceArgs rep;
  auto* c_rep = app.add_subcommand("reproduce", "Regenerate the data behind a figure");
  c_rep->add_option("--figure", rep.figure, "1 or 2")->required();
  c_rep->add_option("--outdir", rep.outdir, "Output directory")->required();
  c_rep->add_option("--budget", rep.budget, "desk or paper");
  c_rep->add_option("--seed", rep.seed, "Seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    if (c_occ->parsed()) occupation_pdf_cmd(occ, session, out);
    if (c_sl->parsed()) sliding_pdf_cmd(sl, session, out);
    if (c_sim->parsed()) simulate_cmd(sim, session, out);
    if (c_cmp->parsed()) compare_cmd(cmp, session, out);
    if (c_rep->parsed()) reproduce_cmd(rep, session, out);
  } catch (const Error& e) {
    err << "error (" << to_string(e.kind()) << "): " << e.what() << "\n";
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace occtime::cli
