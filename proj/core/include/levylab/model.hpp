#ifndef LEVYLAB_MODEL_HPP_
#define LEVYLAB_MODEL_HPP_

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "levylab/catalog.hpp"
#include "levylab/grid.hpp"
#include "levylab/intensity.hpp"

namespace levylab {

// Sampling box for the validators: |u|, |v| <= kStateRange.
inline constexpr double kStateRange = 10.0;
inline constexpr double kValidateTol = 1e-8;

struct LipschitzBounds {
  double c_phi = 0.0;
  double c_f = 0.0;
  double lambda_star = 0.0;
  double K = 0.0;
};

// Dominating data of the growth condition |eta| <= g(x)(1+|u|) h2(z) and the
// Lipschitz weight h1(z). With eta = g(x) sigma(u) v these are
//   h1(z) = |v| / v_max,   h2(z) = growth(sigma) |v|,   g = |g(x)|.
struct GrowthData {
  double g_sup = 0.0;
  double v_max = 0.0;
  double sigma_growth = 0.0;
  double h1(const Mark& z) const { return v_max > 0 ? std::abs(z.size) / v_max : 0.0; }
  double h2(const Mark& z) const { return sigma_growth * std::abs(z.size); }
};

struct ProblemSpec {
  int dim = 1;
  Phi phi = Phi::zero();
  Flux flux = Flux::zero();
  NoiseAmplitude eta;
  InitialData u0 = InitialData::zero();
  LevyIntensity levy = LevyIntensity::none();
  double epsilon = 0.0;
  double horizon = 1.0;
  double half_width = 1.0;
  // Width of the layer next to the truncation boundary that must stay free
  // of initial data and is monitored for escaping mass.
  double margin = 0.0;
  Boundary boundary = Boundary::periodic;
  // Engquist-Osher flux differencing instead of central.
  bool monotone_flux = false;

  LipschitzBounds lipschitz_bounds() const;
  GrowthData growth_data() const;
  double eta_at(const Point& x, double u, const Mark& z) const {
    return eta.eval(x, dim, u, z.size);
  }
};

struct AssumptionCheck {
  std::string name;
  double worst_ratio = 0.0;
  double bound = 1.0;
  double margin = 0.0;
  bool pass = true;
  std::string reason;
};

struct ModulusSample {
  double r = 0.0;
  double modulus = 0.0;  // sup_{|a-b|<=r} |sqrt(phi'(a)) - sqrt(phi'(b))|
  double ratio = 0.0;    // modulus / r^(2/3)
};

struct ValidationReport {
  std::vector<AssumptionCheck> checks;
  std::vector<ModulusSample> modulus;
  // Sampled trend of modulus / r^(2/3); a finite sample cannot certify the
  // limit, so this is informational.
  bool modulus_trend_decreasing = false;
  LipschitzBounds bounds;

  bool all_pass() const;
  const AssumptionCheck* find(const std::string& name) const;
};

ValidationReport validate_assumptions(const ProblemSpec& spec, int samples,
                                      std::uint64_t seed);

// Cell-center samples of u0. Requires supp u0 inside [-L+margin, L-margin]^d.
Field discretize_initial(const ProblemSpec& spec, const Grid& grid,
                         double margin);

// int_{|x|_inf > L - margin} |u|: mass that reached the truncation layer.
double boundary_mass(const Grid& grid, std::span<const double> u, double margin);

}  // namespace levylab

#endif  // LEVYLAB_MODEL_HPP_
