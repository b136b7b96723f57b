#ifndef LEVYLAB_CATALOG_HPP_
#define LEVYLAB_CATALOG_HPP_

#include <array>
#include <cmath>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "levylab/grid.hpp"

namespace levylab {

// A named coefficient family plus its scalar parameters, as written in a
// config file (e.g. `phi = stefan`, `phi.c = 1`).
struct FamilySpec {
  std::string family;
  std::map<std::string, double> params;
};

// Degenerate diffusion nonlinearity.
//   zero    : 0
//   linear  : c u + offset
//   stefan  : c sign(u) max(|u| - knee, 0)
//   porous  : c u^3 / (3 knee^2) on |u| <= knee, continued linearly with slope c
class Phi {
 public:
  enum class Kind { zero, linear, stefan, porous };

  static Phi make(const FamilySpec& spec);
  static Phi zero() { return Phi(Kind::zero, 0.0, 0.0, 1.0); }
  static Phi linear(double c, double offset = 0.0) {
    return Phi(Kind::linear, c, offset, 1.0);
  }
  static Phi stefan(double c = 1.0, double knee = 1.0) {
    return Phi(Kind::stefan, c, 0.0, knee);
  }
  static Phi porous(double c = 1.0, double knee = 1.0) {
    return Phi(Kind::porous, c, 0.0, knee);
  }

  Kind kind() const { return kind_; }
  double value(double u) const;
  double derivative(double u) const;
  double sqrt_derivative(double u) const;
  // Declared Lipschitz constant c_phi of the family.
  double lipschitz() const;
  // Points where phi' fails to be smooth.
  std::span<const double> breakpoints() const {
    return {breakpoints_.data(), breakpoint_count_};
  }
  FamilySpec describe() const;

 private:
  Phi(Kind kind, double c, double offset, double knee);
  Kind kind_;
  double c_, offset_, knee_;
  std::array<double, 2> breakpoints_{};
  std::size_t breakpoint_count_ = 0;
};

// Convective flux f(u) = direction * base(u) (+ offset), one component per axis.
//   zero    : 0
//   linear  : c u
//   burgers : c u^2 / 2 on |u| <= clip, continued linearly (Lipschitz c clip)
class Flux {
 public:
  enum class Kind { zero, linear, burgers };

  static Flux make(const FamilySpec& spec);
  static Flux zero() { return Flux(Kind::zero, 0.0, 1.0, 0.0, {1.0, 0.0}); }
  static Flux linear(double c, Point direction = {1.0, 0.0}) {
    return Flux(Kind::linear, c, 1.0, 0.0, direction);
  }
  static Flux burgers(double c = 1.0, double clip = 10.0,
                      Point direction = {1.0, 0.0}) {
    return Flux(Kind::burgers, c, clip, 0.0, direction);
  }
  Flux with_offset(double offset) const {
    Flux f = *this;
    f.offset_ = offset;
    return f;
  }

  Kind kind() const { return kind_; }
  double value(double u, int axis) const;
  double derivative(double u, int axis) const;
  // Engquist-Osher split: plus(u) = int_0^u max(f', 0), minus(u) = int_0^u
  // min(f', 0), so that plus + minus = f - f(0).
  double plus(double u, int axis) const;
  double minus(double u, int axis) const;
  double lipschitz() const;
  std::span<const double> breakpoints() const {
    return {breakpoints_.data(), breakpoint_count_};
  }
  FamilySpec describe() const;

 private:
  Flux(Kind kind, double c, double clip, double offset, Point direction);
  double base(double u) const;
  double base_derivative(double u) const;
  double base_plus(double u) const;
  double base_minus(double u) const;
  Kind kind_;
  double c_, clip_, offset_;
  Point direction_;
  std::array<double, 2> breakpoints_{};
  std::size_t breakpoint_count_ = 0;
};

// Spatial factor g(x) of a separable noise amplitude.
//   constant : amp
//   gaussian : amp exp(-|x - center|^2 / (2 width^2))
class SpatialProfile {
 public:
  enum class Kind { constant, gaussian };
  static SpatialProfile make(const FamilySpec& spec);
  static SpatialProfile constant(double amp) {
    return SpatialProfile(Kind::constant, amp, 1.0, {0.0, 0.0});
  }
  static SpatialProfile gaussian(double amp, double width,
                                 Point center = {0.0, 0.0}) {
    return SpatialProfile(Kind::gaussian, amp, width, center);
  }
  Kind kind() const { return kind_; }
  double value(const Point& x, int dim) const;
  double sup() const { return std::abs(amp_); }
  double lipschitz() const;
  FamilySpec describe() const;

 private:
  SpatialProfile(Kind kind, double amp, double width, Point center)
      : kind_(kind), amp_(amp), width_(width), center_(center) {}
  Kind kind_;
  double amp_, width_;
  Point center_;
};

// State factor sigma(u) of a separable noise amplitude.
//   zero    : 0
//   one     : 1
//   linear  : lambda u
//   affine  : a + b u
//   cutoff  : max(1 - |u| / radius, 0)   (vanishes for |u| >= radius)
class StateFactor {
 public:
  enum class Kind { zero, one, linear, affine, cutoff };
  static StateFactor make(const FamilySpec& spec);
  static StateFactor zero() { return StateFactor(Kind::zero, 0.0, 0.0); }
  static StateFactor one() { return StateFactor(Kind::one, 1.0, 0.0); }
  static StateFactor linear(double lambda) {
    return StateFactor(Kind::linear, 0.0, lambda);
  }
  static StateFactor affine(double a, double b) {
    return StateFactor(Kind::affine, a, b);
  }
  static StateFactor cutoff(double radius) {
    return StateFactor(Kind::cutoff, radius, 0.0);
  }
  Kind kind() const { return kind_; }
  double value(double u) const;
  double lipschitz() const;
  // Smallest C with |sigma(u)| <= C (1 + |u|).
  double growth() const;
  // sup of |sigma| over |u| <= r.
  double sup_on(double r) const;
  // Radius outside which sigma vanishes; +inf when it never does.
  double support_radius() const;
  bool vanishes_at_zero() const { return value(0.0) == 0.0; }
  FamilySpec describe() const;

 private:
  StateFactor(Kind kind, double a, double b) : kind_(kind), a_(a), b_(b) {}
  Kind kind_;
  double a_, b_;
};

// Separable noise amplitude eta(x, u; z) = g(x) sigma(u) v for a mark
// z = (y, v); the mark position y only enters through the intensity.
class NoiseAmplitude {
 public:
  NoiseAmplitude() : g_(SpatialProfile::constant(0.0)), sigma_(StateFactor::zero()) {}
  NoiseAmplitude(SpatialProfile g, StateFactor sigma) : g_(g), sigma_(sigma) {}

  bool is_zero() const {
    return g_.sup() == 0.0 || sigma_.kind() == StateFactor::Kind::zero;
  }
  double spatial(const Point& x, int dim) const { return g_.value(x, dim); }
  double state(double u) const { return sigma_.value(u); }
  double eval(const Point& x, int dim, double u, double mark_size) const {
    return g_.value(x, dim) * sigma_.value(u) * mark_size;
  }
  const SpatialProfile& profile() const { return g_; }
  const StateFactor& factor() const { return sigma_; }

 private:
  SpatialProfile g_;
  StateFactor sigma_;
};

// Initial data u0.
//   zero     : 0
//   constant : height everywhere (periodic domains only)
//   bump     : height exp(1 - 1 / (1 - r^2 / width^2)) for r < width
//   cosine   : height cos^2(pi r / (2 width)) for r < width
// with r = |x - center|.
class InitialData {
 public:
  enum class Kind { zero, constant, bump, cosine };
  static InitialData make(const FamilySpec& spec);
  static InitialData zero() { return InitialData(Kind::zero, 0.0, 1.0, {0, 0}); }
  static InitialData constant(double c) {
    return InitialData(Kind::constant, c, 1.0, {0, 0});
  }
  static InitialData bump(double height, double width, Point center = {0, 0}) {
    return InitialData(Kind::bump, height, width, center);
  }
  static InitialData cosine(double height, double width,
                            Point center = {0, 0}) {
    return InitialData(Kind::cosine, height, width, center);
  }
  Kind kind() const { return kind_; }
  double value(const Point& x, int dim) const;
  // Largest distance from the origin at which u0 may be nonzero (+inf for
  // constant data).
  double support_extent(int dim) const;
  double sup() const { return kind_ == Kind::zero ? 0.0 : std::abs(height_); }
  FamilySpec describe() const;

 private:
  InitialData(Kind kind, double height, double width, Point center)
      : kind_(kind), height_(height), width_(width), center_(center) {}
  Kind kind_;
  double height_, width_;
  Point center_;
};

}  // namespace levylab

#endif  // LEVYLAB_CATALOG_HPP_
