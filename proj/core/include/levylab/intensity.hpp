#ifndef LEVYLAB_INTENSITY_HPP_
#define LEVYLAB_INTENSITY_HPP_

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace levylab {

// Point of E = O x R*: jump position y and jump size v.
struct Mark {
  double position = 0.0;
  double size = 0.0;
};

struct WeightedMark {
  Mark mark;
  double weight = 0.0;
};

// Reproducible random source. The engine is fully specified by the standard;
// the variates below are computed by hand so results do not depend on the
// standard library's distribution implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  // Uniform on [0, 1) with 53 random bits.
  double uniform() { return (engine_() >> 11) * 0x1.0p-53; }
  // Poisson variate by sequential inversion in chunks of mean <= 16.
  std::uint64_t poisson(double mean);

 private:
  std::mt19937_64 engine_;
};

// Intensity m = lambda x mu of the Poisson random measure, restricted to
// the simulated part {|v| >= z_min} of E.
//
// Position measure lambda:  atom(y0, mass) | uniform(lo, hi, density)
// Size measure mu:          none | atoms(v_i, m_i) | uniform(lo, hi, density)
//                           | stable(alpha, scale, z_min, z_max), density
//                             scale |v|^(-1-alpha) on z_min <= |v| <= z_max.
class LevyIntensity {
 public:
  enum class PositionKind { atom, uniform };
  enum class SizeKind { none, atoms, uniform, stable };

  static LevyIntensity none();
  static LevyIntensity atoms(std::vector<double> sizes,
                             std::vector<double> masses);
  static LevyIntensity uniform_sizes(double lo, double hi, double density);
  static LevyIntensity stable(double alpha, double scale, double z_min,
                              double z_max);

  LevyIntensity with_atom_position(double y0, double mass) const;
  LevyIntensity with_uniform_position(double lo, double hi,
                                      double density) const;

  PositionKind position_kind() const { return position_kind_; }
  SizeKind size_kind() const { return size_kind_; }

  // Lambda = m({|v| >= z_min}). Throws TruncationRequired when infinite.
  double total_mass() const;
  double position_mass() const;
  Mark sample_mark(Rng& rng) const;
  // Quadrature rule for integrals against m over the simulated part; atoms
  // are exact, continuous size measures use composite 16-point Gauss.
  std::span<const WeightedMark> nodes() const { return nodes_; }
  // int v^k m(dz) over the simulated part.
  double size_moment(int k) const;
  // int_{|v| < z_min} v m(dz), added back to the compensator analytically.
  double small_jump_first_moment() const;
  // int_{|v| < z_min} v^2 m(dz): the discarded part of the isometry.
  double truncation_error() const;
  // sup |v| over the support of the simulated size measure.
  double max_jump_size() const;
  std::string describe() const;

  // Parameters (for manifests).
  const std::vector<double>& atom_sizes() const { return sizes_; }
  const std::vector<double>& atom_masses() const { return masses_; }
  double size_param(int i) const { return size_params_[i]; }
  double position_param(int i) const { return position_params_[i]; }

 private:
  void build_nodes();
  PositionKind position_kind_ = PositionKind::atom;
  SizeKind size_kind_ = SizeKind::none;
  // atom: {y0, mass}; uniform: {lo, hi, density}
  double position_params_[3] = {0.0, 1.0, 0.0};
  // uniform: {lo, hi, density}; stable: {alpha, scale, z_min, z_max}
  double size_params_[4] = {0.0, 0.0, 0.0, 0.0};
  std::vector<double> sizes_, masses_, cumulative_;
  std::vector<WeightedMark> nodes_;
};

}  // namespace levylab

#endif  // LEVYLAB_INTENSITY_HPP_
