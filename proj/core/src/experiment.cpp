#include "levylab/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <memory>
#include <sstream>

#include "levylab/errors.hpp"
#include "levylab/parallel.hpp"
#include "levylab/solver.hpp"

namespace levylab {

namespace fs = std::filesystem;

const std::vector<std::string>& known_diagnostics() {
  static const std::vector<std::string> names = {
      "assumptions", "energy",  "entropy",       "cauchy",  "viscosity",
      "contraction", "moments", "max_principle", "isometry"};
  return names;
}

namespace {

// Shortest text that parses back to the same double.
std::string num(double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string csv17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

template <class T>
T make_family(const Config& config, const std::string& key, const std::string& fallback) {
  const FamilySpec spec = config.get_family(key, fallback);
  try {
    return T::make(spec);
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(config.line_of(key), key, e.what());
  }
}

std::vector<std::string> split_names(const std::string& text) {
  std::string t = text;
  std::replace(t.begin(), t.end(), ',', ' ');
  std::istringstream in(t);
  std::vector<std::string> out;
  std::string w;
  while (in >> w) out.push_back(w);
  return out;
}

std::vector<int> to_ints(const Config& config, const std::string& key,
                         const std::vector<double>& values) {
  std::vector<int> out;
  for (double v : values) {
    if (v != static_cast<int>(v) || v < 1) {
      throw ConfigError(config.line_of(key), key, "expected positive integers");
    }
    out.push_back(static_cast<int>(v));
  }
  return out;
}

LevyIntensity read_levy(const Config& config) {
  const FamilySpec size = config.get_family("levy.size", "none");
  auto param = [&](const std::string& name, double fallback) {
    auto it = size.params.find(name);
    return it == size.params.end() ? fallback : it->second;
  };
  auto reject_extra = [&](std::initializer_list<const char*> allowed) {
    for (const auto& [k, v] : size.params) {
      if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return k == a; })) {
        throw ConfigError(config.line_of("levy.size." + k), "levy.size." + k,
                          "unknown parameter for size measure '" + size.family + "'");
      }
    }
  };
  LevyIntensity levy;
  try {
    if (size.family == "none") {
      reject_extra({});
      levy = LevyIntensity::none();
    } else if (size.family == "atoms") {
      reject_extra({});
      levy = LevyIntensity::atoms(config.get_list("levy.atom_sizes"),
                                  config.get_list("levy.atom_masses"));
    } else if (size.family == "uniform") {
      reject_extra({"lo", "hi", "density"});
      levy = LevyIntensity::uniform_sizes(param("lo", -1.0), param("hi", 1.0),
                                          param("density", 1.0));
    } else if (size.family == "stable") {
      reject_extra({"alpha", "scale", "z_min", "z_max"});
      levy = LevyIntensity::stable(param("alpha", 1.0), param("scale", 1.0),
                                   param("z_min", 0.1), param("z_max", 1.0));
    } else {
      throw ConfigError(config.line_of("levy.size"), "levy.size",
                        "unknown size measure '" + size.family + "'");
    }
    const FamilySpec pos = config.get_family("levy.position", "atom");
    auto p = [&](const std::string& name, double fallback) {
      auto it = pos.params.find(name);
      return it == pos.params.end() ? fallback : it->second;
    };
    if (pos.family == "atom") {
      levy = levy.with_atom_position(p("y0", 0.0), p("mass", 1.0));
    } else if (pos.family == "uniform") {
      levy = levy.with_uniform_position(p("lo", 0.0), p("hi", 1.0), p("density", 1.0));
    } else {
      throw ConfigError(config.line_of("levy.position"), "levy.position",
                        "unknown position measure '" + pos.family + "'");
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(config.line_of("levy.size"), "levy.size", e.what());
  }
  return levy;
}

void write_family(std::ostream& out, const std::string& key, const FamilySpec& f) {
  out << key << " = " << f.family << '\n';
  for (const auto& [name, value] : f.params) out << key << '.' << name << " = " << num(value) << '\n';
}

template <class T>
std::string join(const std::vector<T>& values) {
  std::string s;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) s += ", ";
    if constexpr (std::is_same_v<T, std::string>) {
      s += values[i];
    } else {
      s += num(static_cast<double>(values[i]));
    }
  }
  return s;
}

void write_levy(std::ostream& out, const LevyIntensity& levy) {
  switch (levy.size_kind()) {
    case LevyIntensity::SizeKind::none:
      out << "size = none\n";
      break;
    case LevyIntensity::SizeKind::atoms:
      out << "size = atoms\n"
          << "atom_sizes = " << join(levy.atom_sizes()) << '\n'
          << "atom_masses = " << join(levy.atom_masses()) << '\n';
      break;
    case LevyIntensity::SizeKind::uniform:
      out << "size = uniform\nsize.lo = " << num(levy.size_param(0))
          << "\nsize.hi = " << num(levy.size_param(1))
          << "\nsize.density = " << num(levy.size_param(2)) << '\n';
      break;
    case LevyIntensity::SizeKind::stable:
      out << "size = stable\nsize.alpha = " << num(levy.size_param(0))
          << "\nsize.scale = " << num(levy.size_param(1))
          << "\nsize.z_min = " << num(levy.size_param(2))
          << "\nsize.z_max = " << num(levy.size_param(3)) << '\n';
      break;
  }
  if (levy.position_kind() == LevyIntensity::PositionKind::atom) {
    out << "position = atom\nposition.y0 = " << num(levy.position_param(0))
        << "\nposition.mass = " << num(levy.position_param(1)) << '\n';
  } else {
    out << "position = uniform\nposition.lo = " << num(levy.position_param(0))
        << "\nposition.hi = " << num(levy.position_param(1))
        << "\nposition.density = " << num(levy.position_param(2)) << '\n';
  }
}

bool selected(const ExperimentConfig& cfg, const std::string& name) {
  return std::find(cfg.diagnostics.begin(), cfg.diagnostics.end(), name) !=
         cfg.diagnostics.end();
}

std::string path_file(std::size_t k) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "path_%05zu.txt", k);
  return buf;
}

void write_text(const fs::path& file, const std::string& text) {
  std::ofstream out(file, std::ios::binary);
  if (!out) throw Error("cannot write " + file.string());
  out << text;
}

Check make_check(std::string name, double value, double bound, double margin, Status status,
                 std::string anchor, std::string detail = {}) {
  return {std::move(name), value, bound, margin, status, std::move(anchor), std::move(detail)};
}

Status pass_if(bool ok) { return ok ? Status::pass : Status::fail; }

void write_rates(const fs::path& file, const std::vector<RateReport>& reports) {
  std::ostringstream out;
  out << "lane,parameter,error,band,ratio,slope,status\n";
  for (const auto& r : reports) {
    for (std::size_t i = 0; i < r.points.size(); ++i) {
      const auto& p = r.points[i];
      out << r.lane << ',' << csv17(p.parameter) << ',' << csv17(p.error) << ','
          << csv17(p.band) << ',' << (i == 0 ? std::string() : csv17(r.ratios[i - 1])) << ','
          << csv17(r.slope) << ',' << to_string(r.status) << '\n';
    }
    if (r.points.empty()) out << r.lane << ",,,,," << csv17(r.slope) << ',' << to_string(r.status) << '\n';
  }
  write_text(file, out.str());
}

Check rate_check(const RateReport& r, const std::string& name) {
  Check c;
  c.name = name;
  c.status = r.status;
  c.detail = r.detail;
  if (r.lane == "viscosity") {
    c.value = r.ratios.empty() ? 0.0 : *std::max_element(r.ratios.begin(), r.ratios.end());
    c.bound = 0.9;
    c.margin = c.bound - c.value;
    c.anchor = "strong convergence of the viscous approximation as eps -> 0";
  } else {
    const bool det = r.lane == "deterministic";
    const double lo = det ? 1.7 : 0.8, hi = det ? 2.3 : 1.3;
    c.value = r.slope;
    c.bound = det ? 2.0 : 1.0;
    c.margin = std::min(r.slope - lo, hi - r.slope);
    c.anchor = "L2 Cauchy property of the time discretization";
    c.detail = r.lane + " lane: " + r.detail;
  }
  return c;
}

void add_metadata(DiagnosticsReport& report, const ExperimentConfig& cfg) {
  const Grid g = cfg.grid();
  report.metadata["mode"] = cfg.mode;
  report.metadata["seed"] = std::to_string(cfg.seed);
  report.metadata["paths"] = std::to_string(cfg.paths);
  report.metadata["grid"] = "d=" + std::to_string(g.dim()) + " cells=" +
                            std::to_string(g.cells_per_axis()) + " h=" + num(g.spacing()) +
                            " L=" + num(g.half_width()) + " " + to_string(g.boundary());
  report.metadata["steps"] = std::to_string(cfg.steps);
  report.metadata["dt"] = num(cfg.spec.horizon / cfg.steps);
  report.metadata["epsilon"] = num(cfg.spec.epsilon);
  report.metadata["levy"] = cfg.spec.levy.describe();
}

void write_report(const fs::path& dir, const DiagnosticsReport& report) {
  std::ostringstream csv, summary;
  report.write_csv(csv);
  report.write_summary(summary);
  write_text(dir / "report.csv", csv.str());
  write_text(dir / "summary.txt", summary.str());
}

void prepare_output(const ExperimentConfig& cfg, const RunOptions& opts, const MonteCarlo& mc) {
  fs::create_directories(opts.out / "paths");
  fs::create_directories(opts.out / "fields");
  write_text(opts.out / "manifest.txt", cfg.manifest());
  for (std::size_t k = 0; k < mc.paths; ++k) {
    std::ostringstream text;
    write_path(text, mc.path(k));
    write_text(opts.out / "paths" / path_file(k), text.str());
  }
}

void check_assumptions(const ExperimentConfig& cfg) {
  const ValidationReport v = validate_assumptions(cfg.spec, 256, cfg.seed);
  for (const auto& c : v.checks) {
    if (!c.pass) throw InvalidSpec(c.name, c.worst_ratio, c.name + ": " + c.reason);
  }
}

// Per-path trajectories at the base resolution: fields, solver log, energy.
// Returns the number of paths whose discrete energy inequality has no finite
// Gronwall constant, and the path count.
std::pair<std::size_t, std::size_t> base_run(const ExperimentConfig& cfg, const MonteCarlo& mc,
                                             const RunOptions& opts, DiagnosticsReport& report) {
  const Grid grid = cfg.grid();
  struct PathOut {
    EnergyReport energy;
    double boundary_mass = 0.0;
    std::string field, stats;
  };
  auto results = parallel_map(mc.paths, mc.workers, [&](std::size_t k) {
    const Trajectory traj = solve_path(cfg.spec, grid, cfg.steps, mc.path(k));
    PathOut r;
    r.energy = discrete_energy_report(traj, cfg.spec);
    for (const auto& u : traj.states) {
      r.boundary_mass = std::max(r.boundary_mass, boundary_mass(grid, u, cfg.spec.margin));
    }
    if (k < cfg.field_paths) {
      std::ostringstream f, s;
      f << "t,x_index,u\n";
      for (int n = 0; n <= traj.steps; ++n) {
        const std::string t = csv17(traj.time(n));
        for (std::size_t i = 0; i < grid.size(); ++i) {
          f << t << ',' << i << ',' << csv17(traj.states[n][i]) << '\n';
        }
      }
      s << "step,newton_iterations,picard_iterations,residual,tolerance\n";
      for (std::size_t n = 0; n < traj.stats.size(); ++n) {
        const auto& st = traj.stats[n];
        s << n + 1 << ',' << st.newton_iterations << ',' << st.picard_iterations << ','
          << csv17(st.residual) << ',' << csv17(st.tolerance) << '\n';
      }
      r.field = f.str();
      r.stats = s.str();
    }
    return r;
  });
  char name[40];
  double boundary = 0.0;
  std::size_t unbounded = 0;
  for (std::size_t k = 0; k < results.size(); ++k) {
    boundary = std::max(boundary, results[k].boundary_mass);
    if (!results[k].energy.bounded) ++unbounded;
    if (k < cfg.field_paths) {
      std::snprintf(name, sizeof name, "path_%05zu.csv", k);
      write_text(opts.out / "fields" / name, results[k].field);
      std::snprintf(name, sizeof name, "stats_%05zu.csv", k);
      write_text(opts.out / "fields" / name, results[k].stats);
    }
  }
  std::ostringstream energy;
  energy << "step,t,norm2,increments,phi_dissipation,viscous,kirchhoff,noise\n";
  const double n = static_cast<double>(results.size());
  for (int s = 0; s <= cfg.steps; ++s) {
    double acc[6] = {0, 0, 0, 0, 0, 0};
    for (const auto& r : results) {
      const auto& e = r.energy;
      acc[0] += e.norm2[s];
      acc[1] += e.increments[s];
      acc[2] += e.phi_dissipation[s];
      acc[3] += e.viscous[s];
      acc[4] += e.kirchhoff[s];
      acc[5] += e.noise[s];
    }
    energy << s << ',' << csv17(s * cfg.spec.horizon / cfg.steps);
    for (double a : acc) energy << ',' << csv17(a / n);
    energy << '\n';
  }
  write_text(opts.out / "energy.csv", energy.str());
  report.metadata["max_boundary_mass"] = num(boundary);
  return {unbounded, results.size()};
}

void run_diagnostics(const ExperimentConfig& cfg, const MonteCarlo& mc,
                     std::pair<std::size_t, std::size_t> base, DiagnosticsReport& report,
                     std::vector<RateReport>& rates) {
  const Grid grid = cfg.grid();
  const ProblemSpec& spec = cfg.spec;
  if (selected(cfg, "assumptions")) {
    const ValidationReport v = validate_assumptions(spec, 256, cfg.seed);
    for (const auto& c : v.checks) {
      report.add(make_check("assumption." + c.name, c.worst_ratio, c.bound, c.margin,
                            pass_if(c.pass), "structural assumptions on the coefficients",
                            c.reason));
    }
  }
  if (selected(cfg, "energy")) {
    const auto [unbounded, total] = base;
    report.add(make_check("energy.discrete_inequality", static_cast<double>(unbounded), 0.0,
                          -static_cast<double>(unbounded), pass_if(unbounded == 0),
                          "discrete energy inequality along each path",
                          std::to_string(unbounded) + " of " + std::to_string(total) +
                              " paths without a finite Gronwall constant"));
    const auto e = energy_bound_test(spec, grid, cfg.steps, mc);
    report.add(make_check("energy.functional_change", e.relative_change, 0.1,
                          0.1 - e.relative_change, e.status,
                          "uniform energy bound of the time discretization",
                          "Q(N)=" + num(e.coarse) + " Q(2N)=" + num(e.fine)));
  }
  if (selected(cfg, "entropy")) {
    const double c = cfg.tol_constant.value();
    const auto e = entropy_residual_test(spec, grid, cfg.steps, mc, cfg.thetas, c);
    report.add(make_check("entropy.residual_min", e.worst, -e.tolerance, e.worst + e.tolerance,
                          e.status, "entropy inequality for the viscous solution",
                          std::to_string(e.violations) + " of " +
                              std::to_string(e.evaluations) + " residuals below -tol, C=" +
                              num(c)));
  }
  if (selected(cfg, "cauchy")) {
    rates.push_back(cauchy_rate_test(spec, grid, mc, cfg.steps_list));
    report.add(rate_check(rates.back(), "cauchy.slope"));
  }
  if (selected(cfg, "viscosity")) {
    rates.push_back(viscosity_convergence_test(spec, grid, cfg.steps, mc, cfg.eps_list));
    report.add(rate_check(rates.back(), "viscosity.max_ratio"));
  }
  if (selected(cfg, "contraction")) {
    const Field u0 = discretize_initial(spec, grid, spec.margin);
    ProblemSpec shifted = spec;
    shifted.u0 = cfg.perturbation;
    Field v0 = discretize_initial(shifted, grid, spec.margin);
    for (std::size_t i = 0; i < v0.size(); ++i) v0[i] += u0[i];
    const WeightPhiN weight(cfg.weight_n, spec.dim);
    const auto r = contraction_test(spec, grid, u0, v0, weight, mc, cfg.steps);
    const double zero_bound = 1e-8 * l1_norm(grid, u0);
    report.add(make_check("contraction.same_data", r.same_data_distance, zero_bound,
                          zero_bound - r.same_data_distance,
                          pass_if(r.same_data_distance <= zero_bound),
                          "pathwise uniqueness under one noise"));
    const double gap = std::abs(r.fitted_rate - r.refined_rate);
    const double allowed = 0.2 * std::max(r.fitted_rate, r.refined_rate) + 0.05;
    report.add(make_check("contraction.rate_stability", gap, allowed, allowed - gap,
                          pass_if(gap <= allowed && std::isfinite(r.fitted_rate)),
                          "weighted L1 contraction with exponential rate",
                          "C(N)=" + num(r.fitted_rate) + " C(2N)=" + num(r.refined_rate) +
                              " D(0)=" + num(r.distance.front()) +
                              " D(T)=" + num(r.distance.back())));
  }
  if (selected(cfg, "moments")) {
    for (int p : cfg.powers) {
      const auto m = moment_bound_test(spec, grid, p, mc, cfg.steps);
      const std::string name = "moments.p" + std::to_string(p);
      if (!std::isnan(m.oracle_rate)) {
        const double dev = std::abs(m.final_rate - m.oracle_rate);
        report.add(make_check(name + ".closed_form", m.final_rate, m.oracle_rate,
                              3.0 * m.final_rate_sigma - dev, m.status,
                              "exponential moment bound, linear closed form",
                              "sigma=" + num(m.final_rate_sigma) + " K(N)=" +
                                  num(m.fitted_rate) + " K(2N)=" + num(m.refined_rate) +
                                  (m.detail.empty() ? "" : "; " + m.detail)));
      } else {
        report.add(make_check(name + ".rate", m.fitted_rate, m.refined_rate,
                              0.2 * std::max(m.fitted_rate, m.refined_rate) + 0.05 -
                                  std::abs(m.fitted_rate - m.refined_rate),
                              m.status, "exponential moment bound",
                              "K(2N)=" + num(m.refined_rate) +
                                  (m.detail.empty() ? "" : "; " + m.detail)));
      }
    }
  }
  if (selected(cfg, "max_principle")) {
    const auto b = max_principle_test(spec, grid, cfg.max_principle_M, mc, cfg.steps);
    report.add(make_check("max_principle.sup", b.max_abs, b.bound + b.tolerance,
                          b.bound + b.tolerance - b.max_abs, b.status,
                          "L-infinity bound for compactly supported noise",
                          std::to_string(b.violations) + " cell values above the bound"));
  }
  if (selected(cfg, "isometry")) {
    const auto r = noise_isometry_test(spec, grid, mc);
    report.add(make_check("isometry.variance_z", r.worst_z, 3.0, 3.0 - r.worst_z, r.status,
                          "isometry of the compensated jump integral",
                          "predicted " + num(r.predicted) + " sample " + num(r.sample) +
                              " over " + std::to_string(r.cells) + " cells"));
  }
}

}  // namespace

ExperimentConfig ExperimentConfig::from_config(const Config& config) {
  ExperimentConfig c;
  c.mode = config.get_string("run.mode", "run");
  if (c.mode != "run" && c.mode != "study") {
    throw ConfigError(config.line_of("run.mode"), "run.mode", "expected run or study");
  }
  ProblemSpec& s = c.spec;
  s.dim = static_cast<int>(config.get_int("model.dim", 1));
  if (s.dim != 1 && s.dim != 2) {
    throw ConfigError(config.line_of("model.dim"), "model.dim", "dimension must be 1 or 2");
  }
  s.phi = make_family<Phi>(config, "model.phi", "linear");
  s.flux = make_family<Flux>(config, "model.flux", "zero");
  s.epsilon = config.get_double("model.epsilon", 0.05);
  if (!(s.epsilon > 0.0)) {
    throw ConfigError(config.line_of("model.epsilon"), "model.epsilon", "must be positive");
  }
  s.horizon = config.get_double("model.horizon", 1.0);
  if (!(s.horizon > 0.0)) {
    throw ConfigError(config.line_of("model.horizon"), "model.horizon", "must be positive");
  }
  s.monotone_flux = config.get_bool("model.monotone_flux", false);
  s.eta = NoiseAmplitude(make_family<SpatialProfile>(config, "eta.g", "constant"),
                         make_family<StateFactor>(config, "eta.sigma", "zero"));
  s.u0 = make_family<InitialData>(config, "initial.u0", "zero");
  s.levy = read_levy(config);

  s.half_width = config.get_double("grid.half_width", 4.0);
  c.cells = static_cast<int>(config.get_int("grid.cells", 128));
  try {
    s.boundary = boundary_from_string(config.get_string("grid.boundary", "periodic"));
  } catch (const Error& e) {
    throw ConfigError(config.line_of("grid.boundary"), "grid.boundary", e.what());
  }
  s.margin = config.get_double("grid.margin", 0.0);
  if (c.cells < 3) {
    throw ConfigError(config.line_of("grid.cells"), "grid.cells", "need at least 3 cells");
  }

  c.steps = static_cast<int>(config.get_int("run.steps", 64));
  if (c.steps < 1) throw ConfigError(config.line_of("run.steps"), "run.steps", "must be >= 1");
  const long paths = config.get_int("run.paths", 20);
  if (paths < 1) throw ConfigError(config.line_of("run.paths"), "run.paths", "must be >= 1");
  c.paths = static_cast<std::size_t>(paths);
  const std::string seed = config.get_string("run.seed", "1");
  auto [ptr, ec] = std::from_chars(seed.data(), seed.data() + seed.size(), c.seed);
  if (ec != std::errc() || ptr != seed.data() + seed.size()) {
    throw ConfigError(config.line_of("run.seed"), "run.seed",
                      "seed must be a non-negative integer");
  }
  const long fields = config.get_int("run.field_paths", 1);
  if (fields < 0) {
    throw ConfigError(config.line_of("run.field_paths"), "run.field_paths", "must be >= 0");
  }
  c.field_paths = static_cast<std::size_t>(fields);

  c.diagnostics = split_names(config.get_string("diagnostics.checks", ""));
  for (const auto& d : c.diagnostics) {
    const auto& known = known_diagnostics();
    if (std::find(known.begin(), known.end(), d) == known.end()) {
      throw ConfigError(config.line_of("diagnostics.checks"), "diagnostics.checks",
                        "unknown diagnostic '" + d + "'");
    }
  }
  c.thetas = config.get_list("entropy.thetas", c.thetas);
  if (config.has("entropy.tol_constant")) c.tol_constant = config.get_double("entropy.tol_constant");
  c.steps_list = to_ints(config, "cauchy.steps_list",
                         config.get_list("cauchy.steps_list", {16, 32, 64}));
  c.eps_list = config.get_list("viscosity.eps_list", {0.2, 0.1, 0.05});
  c.weight_n = static_cast<int>(config.get_int("contraction.weight_n", 1));
  if (c.weight_n < 1) {
    throw ConfigError(config.line_of("contraction.weight_n"), "contraction.weight_n",
                      "must be >= 1");
  }
  c.perturbation = make_family<InitialData>(config, "contraction.perturbation", "zero");
  c.powers = to_ints(config, "moments.powers", config.get_list("moments.powers", {2, 4}));
  c.max_principle_M = config.get_double("max_principle.M", 1.0);
  config.require_all_consumed();
  return c;
}

ExperimentConfig ExperimentConfig::load(const fs::path& path) {
  return from_config(Config::load(path));
}

Grid ExperimentConfig::grid() const {
  return Grid(spec.dim, spec.half_width, cells, spec.boundary);
}

std::string ExperimentConfig::manifest() const {
  std::ostringstream out;
  out << "# resolved experiment configuration\n\n[run]\n"
      << "mode = " << mode << '\n'
      << "steps = " << steps << '\n'
      << "paths = " << paths << '\n'
      << "seed = " << seed << '\n'
      << "field_paths = " << field_paths << "\n\n[model]\n"
      << "dim = " << spec.dim << '\n';
  write_family(out, "phi", spec.phi.describe());
  write_family(out, "flux", spec.flux.describe());
  out << "monotone_flux = " << (spec.monotone_flux ? "true" : "false") << '\n'
      << "epsilon = " << num(spec.epsilon) << '\n'
      << "horizon = " << num(spec.horizon) << "\n\n[eta]\n";
  write_family(out, "g", spec.eta.profile().describe());
  write_family(out, "sigma", spec.eta.factor().describe());
  out << "\n[levy]\n";
  write_levy(out, spec.levy);
  out << "\n[initial]\n";
  write_family(out, "u0", spec.u0.describe());
  out << "\n[grid]\n"
      << "half_width = " << num(spec.half_width) << '\n'
      << "cells = " << cells << '\n'
      << "boundary = " << to_string(spec.boundary) << '\n'
      << "margin = " << num(spec.margin) << "\n\n[diagnostics]\n"
      << "checks = " << join(diagnostics) << "\n\n[entropy]\n"
      << "thetas = " << join(thetas) << '\n';
  if (tol_constant) out << "tol_constant = " << num(*tol_constant) << '\n';
  out << "\n[cauchy]\nsteps_list = " << join(steps_list) << "\n\n[viscosity]\n"
      << "eps_list = " << join(eps_list) << "\n\n[contraction]\n"
      << "weight_n = " << weight_n << '\n';
  write_family(out, "perturbation", perturbation.describe());
  out << "\n[moments]\npowers = " << join(powers) << "\n\n[max_principle]\n"
      << "M = " << num(max_principle_M) << '\n';
  return out.str();
}

MonteCarlo make_monte_carlo(const ExperimentConfig& cfg, const RunOptions& opts) {
  if (!opts.replay_paths) {
    return MonteCarlo::sampled(cfg.spec.levy, cfg.spec.horizon, cfg.seed, cfg.paths,
                               opts.workers);
  }
  auto stored = std::make_shared<std::vector<JumpPath>>();
  for (std::size_t k = 0; k < cfg.paths; ++k) {
    const fs::path file = *opts.replay_paths / path_file(k);
    std::ifstream in(file);
    if (!in) throw Error("missing jump path " + file.string());
    stored->push_back(read_path(in, path_seed(cfg.seed, k), cfg.spec.horizon));
  }
  MonteCarlo mc;
  mc.paths = cfg.paths;
  mc.workers = opts.workers;
  mc.source = [stored](std::size_t k) { return (*stored)[k]; };
  return mc;
}

DiagnosticsReport run_experiment(const ExperimentConfig& config, const RunOptions& opts) {
  check_assumptions(config);
  ExperimentConfig cfg = config;
  if (selected(cfg, "entropy") && !cfg.tol_constant) {
    cfg.tol_constant = calibrate_entropy_constant(cfg.spec, cfg.grid(), cfg.steps, cfg.thetas).constant;
  }
  const MonteCarlo mc = make_monte_carlo(cfg, opts);
  prepare_output(cfg, opts, mc);
  DiagnosticsReport report;
  add_metadata(report, cfg);
  std::vector<RateReport> rates;
  try {
    const auto base = base_run(cfg, mc, opts, report);
    run_diagnostics(cfg, mc, base, report, rates);
  } catch (const StepFailure& e) {
    report.incomplete = true;
    report.add(make_check("solver.step", static_cast<double>(e.step()), 0.0, 0.0, Status::fail,
                          "implicit step solvability", e.what()));
  }
  if (!rates.empty()) write_rates(opts.out / "rates.csv", rates);
  write_report(opts.out, report);
  return report;
}

DiagnosticsReport convergence_study(const ExperimentConfig& config, const RunOptions& opts) {
  check_assumptions(config);
  ExperimentConfig cfg = config;
  cfg.mode = "study";
  const bool want_cauchy = selected(cfg, "cauchy") || !selected(cfg, "viscosity");
  const bool want_viscosity = selected(cfg, "viscosity") || !selected(cfg, "cauchy");
  const MonteCarlo mc = make_monte_carlo(cfg, opts);
  prepare_output(cfg, opts, mc);
  DiagnosticsReport report;
  add_metadata(report, cfg);
  std::vector<RateReport> rates;
  try {
    if (want_cauchy) {
      rates.push_back(cauchy_rate_test(cfg.spec, cfg.grid(), mc, cfg.steps_list));
      report.add(rate_check(rates.back(), "cauchy.slope"));
    }
    if (want_viscosity) {
      rates.push_back(
          viscosity_convergence_test(cfg.spec, cfg.grid(), cfg.steps, mc, cfg.eps_list));
      report.add(rate_check(rates.back(), "viscosity.max_ratio"));
    }
  } catch (const StepFailure& e) {
    report.incomplete = true;
    report.add(make_check("solver.step", static_cast<double>(e.step()), 0.0, 0.0, Status::fail,
                          "implicit step solvability", e.what()));
  }
  write_rates(opts.out / "rates.csv", rates);
  write_report(opts.out, report);
  return report;
}

DiagnosticsReport replay(const fs::path& manifest, const RunOptions& opts) {
  const ExperimentConfig cfg = ExperimentConfig::load(manifest);
  RunOptions o = opts;
  if (!o.replay_paths) o.replay_paths = manifest.parent_path() / "paths";
  if (fs::exists(o.out) && fs::equivalent(o.out, manifest.parent_path())) {
    throw Error("replay output directory must differ from the recorded run");
  }
  return cfg.mode == "study" ? convergence_study(cfg, o) : run_experiment(cfg, o);
}

}  // namespace levylab
