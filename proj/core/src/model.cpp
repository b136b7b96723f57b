#include "levylab/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "levylab/errors.hpp"

namespace levylab {

LipschitzBounds ProblemSpec::lipschitz_bounds() const {
  LipschitzBounds b;
  b.c_phi = phi.lipschitz();
  b.c_f = flux.lipschitz();
  const double v_max = levy.max_jump_size();
  if (!eta.is_zero()) {
    b.lambda_star = eta.profile().sup() * eta.factor().lipschitz() * v_max;
    b.K = eta.profile().lipschitz() * eta.factor().sup_on(kStateRange) * v_max;
  }
  return b;
}

GrowthData ProblemSpec::growth_data() const {
  GrowthData g;
  g.g_sup = eta.profile().sup();
  g.v_max = levy.max_jump_size();
  g.sigma_growth = eta.factor().growth();
  return g;
}

bool ValidationReport::all_pass() const {
  return std::all_of(checks.begin(), checks.end(),
                     [](const AssumptionCheck& c) { return c.pass; });
}

const AssumptionCheck* ValidationReport::find(const std::string& name) const {
  for (const auto& c : checks) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

namespace {

double checked(double value, const char* coefficient, double input) {
  if (!std::isfinite(value)) {
    throw InvalidSpec(coefficient, input,
                      std::string("non-finite value of ") + coefficient +
                          " at input " + std::to_string(input));
  }
  return value;
}

// Ratio numerator/denominator where a zero bound only admits a zero numerator.
double ratio(double numerator, double denominator) {
  if (denominator > 0.0) return numerator / denominator;
  return numerator <= kValidateTol ? 0.0 : std::numeric_limits<double>::infinity();
}

struct Sampler {
  Rng rng;
  const ProblemSpec& spec;
  double state() { return kStateRange * (2.0 * rng.uniform() - 1.0); }
  Point position() {
    Point x{0.0, 0.0};
    for (int k = 0; k < spec.dim; ++k) {
      x[k] = spec.half_width * (2.0 * rng.uniform() - 1.0);
    }
    return x;
  }
};

std::vector<std::pair<double, double>> state_pairs(Sampler& s, int samples,
                                                   std::span<const double> breakpoints) {
  std::vector<std::pair<double, double>> pairs;
  pairs.reserve(samples + 6 * breakpoints.size());
  for (int i = 0; i < samples; ++i) pairs.emplace_back(s.state(), s.state());
  for (double p : breakpoints) {
    for (double r : {1e-3, 1e-1, 1.0}) {
      pairs.emplace_back(p - r, p + r);
      pairs.emplace_back(p, p + r);
      pairs.emplace_back(p - r, p);
    }
  }
  return pairs;
}

// `bound` is an upper bound on `worst` unless `lower` is set.
void add(ValidationReport& report, std::string name, double worst, double bound,
         bool pass, std::string reason, bool lower = false) {
  const double margin = lower ? worst - bound : bound - worst;
  report.checks.push_back({std::move(name), worst, bound, margin, pass, std::move(reason)});
}

}  // namespace

ValidationReport validate_assumptions(const ProblemSpec& spec, int samples,
                                      std::uint64_t seed) {
  if (samples < 1) throw Error("validate_assumptions needs samples >= 1");
  ValidationReport report;
  report.bounds = spec.lipschitz_bounds();
  const auto& b = report.bounds;
  Sampler s{Rng(seed), spec};

  // phi(0) = 0, monotone, c_phi-Lipschitz.
  {
    const double phi0 = checked(spec.phi.value(0.0), "phi", 0.0);
    add(report, "phi.zero_at_origin", std::abs(phi0), kValidateTol, std::abs(phi0) <= kValidateTol,
        std::abs(phi0) <= kValidateTol ? "" : "φ(0)≠0");
    double worst_lip = 0.0, worst_slope = std::numeric_limits<double>::infinity();
    for (auto [a, c] : state_pairs(s, samples, spec.phi.breakpoints())) {
      if (a == c) continue;
      const double pa = checked(spec.phi.value(a), "phi", a);
      const double pc = checked(spec.phi.value(c), "phi", c);
      worst_slope = std::min(worst_slope, (pa - pc) / (a - c));
      worst_lip = std::max(worst_lip, ratio(std::abs(pa - pc), b.c_phi * std::abs(a - c)));
    }
    const bool monotone = worst_slope >= -kValidateTol;
    add(report, "phi.monotone", worst_slope, -kValidateTol, monotone,
        monotone ? "" : "φ decreasing on a sampled pair", true);
    const bool lip = worst_lip <= 1.0 + kValidateTol;
    add(report, "phi.lipschitz", worst_lip, 1.0, lip,
        lip ? "" : "φ exceeds its Lipschitz constant");
  }

  // f_k(0) = 0 and c_f-Lipschitz.
  {
    double f0 = 0.0, worst = 0.0;
    for (int k = 0; k < spec.dim; ++k) {
      f0 = std::max(f0, std::abs(checked(spec.flux.value(0.0, k), "flux", 0.0)));
    }
    add(report, "flux.zero_at_origin", f0, kValidateTol, f0 <= kValidateTol, f0 <= kValidateTol ? "" : "f(0)≠0");
    for (auto [a, c] : state_pairs(s, samples, spec.flux.breakpoints())) {
      if (a == c) continue;
      for (int k = 0; k < spec.dim; ++k) {
        const double fa = checked(spec.flux.value(a, k), "flux", a);
        const double fc = checked(spec.flux.value(c, k), "flux", c);
        worst = std::max(worst, ratio(std::abs(fa - fc), b.c_f * std::abs(a - c)));
      }
    }
    const bool lip = worst <= 1.0 + kValidateTol;
    add(report, "flux.lipschitz", worst, 1.0, lip, lip ? "" : "f exceeds its Lipschitz constant");
  }

  // Lipschitz and growth bounds of eta on sampled (x, y, u, v, z).
  {
    const GrowthData g = spec.growth_data();
    double worst_lip = 0.0, worst_growth = 0.0;
    const bool has_marks = !spec.eta.is_zero() && spec.levy.total_mass() > 0.0;
    if (has_marks) {
      for (int i = 0; i < samples; ++i) {
        const Mark z = spec.levy.sample_mark(s.rng);
        const Point x = s.position(), y = s.position();
        const double u = s.state(), v = s.state();
        const double ex = checked(spec.eta_at(x, u, z), "eta", u);
        const double ey = checked(spec.eta_at(y, v, z), "eta", v);
        double dx = 0.0;
        for (int k = 0; k < spec.dim; ++k) dx += (x[k] - y[k]) * (x[k] - y[k]);
        dx = std::sqrt(dx);
        worst_lip = std::max(
            worst_lip,
            ratio(std::abs(ex - ey),
                  (b.lambda_star * std::abs(u - v) + b.K * dx) * g.h1(z)));
        worst_growth = std::max(
            worst_growth,
            ratio(std::abs(ex),
                  std::abs(spec.eta.spatial(x, spec.dim)) * (1.0 + std::abs(u)) * g.h2(z)));
      }
    }
    const bool lip = worst_lip <= 1.0 + kValidateTol;
    add(report, "eta.lipschitz", worst_lip, 1.0, lip, lip ? "" : "η exceeds its Lipschitz bound");
    const bool contractive = b.lambda_star < 1.0;
    add(report, "eta.lambda_star", b.lambda_star, 1.0, contractive,
        contractive ? "" : "λ* ≥ 1");
    const bool growth = worst_growth <= 1.0 + kValidateTol;
    add(report, "eta.growth", worst_growth, 1.0, growth, growth ? "" : "η exceeds its growth bound");
  }

  // Finite truncated intensity with square-integrable sizes.
  {
    double mass = 0.0, second = 0.0;
    bool ok = true;
    std::string reason;
    try {
      mass = spec.levy.total_mass();
      second = spec.levy.size_moment(2) + spec.levy.truncation_error();
      ok = std::isfinite(mass) && std::isfinite(second);
      if (!ok) reason = "intensity not square integrable";
    } catch (const TruncationRequired& e) {
      ok = false;
      reason = e.what();
    }
    add(report, "levy.intensity", mass, std::numeric_limits<double>::infinity(), ok, reason);
  }

  // Modulus of continuity of sqrt(phi') on r = 2^-k.
  {
    const auto bps = spec.phi.breakpoints();
    std::vector<double> anchors;
    for (int i = 0; i < samples; ++i) anchors.push_back(s.state());
    for (int k = 1; k <= 16; ++k) {
      const double r = std::ldexp(1.0, -k);
      double modulus = 0.0;
      auto probe = [&](double a, double c) {
        const double sa = std::sqrt(std::max(checked(spec.phi.derivative(a), "phi'", a), 0.0));
        const double sc = std::sqrt(std::max(checked(spec.phi.derivative(c), "phi'", c), 0.0));
        modulus = std::max(modulus, std::abs(sa - sc));
      };
      for (double a : anchors) probe(a, a + r);
      for (double p : bps) {
        probe(p - 0.5 * r, p + 0.5 * r);
        probe(p, p + r);
        probe(p - r, p);
        // Just off the breakpoint from both sides.
        probe(p - r, p + 1e-3 * r);
        probe(p - 1e-3 * r, p + r);
      }
      report.modulus.push_back({r, modulus, modulus / std::cbrt(r * r)});
    }
    bool decreasing = true;
    for (std::size_t i = 1; i < report.modulus.size(); ++i) {
      if (report.modulus[i].ratio > report.modulus[i - 1].ratio * (1.0 + 1e-12)) {
        decreasing = false;
      }
    }
    const bool vanishing = report.modulus.back().ratio < report.modulus.front().ratio ||
                           report.modulus.front().ratio == 0.0;
    report.modulus_trend_decreasing = decreasing && vanishing;
  }
  return report;
}

Field discretize_initial(const ProblemSpec& spec, const Grid& grid,
                         double margin) {
  const double extent = spec.u0.support_extent(spec.dim);
  if (std::isinf(extent)) {
    if (grid.boundary() != Boundary::periodic) {
      throw DomainTooSmall("non-compact initial data needs a periodic domain");
    }
  } else if (extent > grid.half_width() - margin) {
    throw DomainTooSmall("initial data support reaches the boundary margin (extent " +
                         std::to_string(extent) + ", usable half-width " +
                         std::to_string(grid.half_width() - margin) + ")");
  }
  Field u(grid.size());
  for (std::size_t i = 0; i < u.size(); ++i) {
    u[i] = spec.u0.value(grid.center(i), grid.dim());
  }
  return u;
}

double boundary_mass(const Grid& grid, std::span<const double> u, double margin) {
  const double inner = grid.half_width() - margin;
  double sum = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const Point x = grid.center(i);
    double r = 0.0;
    for (int k = 0; k < grid.dim(); ++k) r = std::max(r, std::abs(x[k]));
    if (r > inner) sum += std::abs(u[i]);
  }
  return sum * grid.cell_volume();
}

}  // namespace levylab
