#include "levylab/catalog.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <set>

#include "levylab/errors.hpp"

namespace levylab {
namespace {

double sign(double x) { return (x > 0.0) - (x < 0.0); }

// Reads a parameter, rejecting keys the family does not know.
class ParamReader {
 public:
  ParamReader(const FamilySpec& spec, std::string owner)
      : spec_(spec), owner_(std::move(owner)) {}
  double get(const std::string& key, double fallback) {
    used_.insert(key);
    auto it = spec_.params.find(key);
    return it == spec_.params.end() ? fallback : it->second;
  }
  void finish() const {
    for (const auto& [key, value] : spec_.params) {
      if (!used_.count(key)) {
        throw Error(owner_ + " family '" + spec_.family +
                    "' has no parameter '" + key + "'");
      }
    }
  }

 private:
  const FamilySpec& spec_;
  std::string owner_;
  std::set<std::string> used_;
};

double radius(const Point& x, const Point& c, int dim) {
  const double dx = x[0] - c[0];
  if (dim == 1) return std::abs(dx);
  const double dy = x[1] - c[1];
  return std::sqrt(dx * dx + dy * dy);
}

}  // namespace

// ---------------------------------------------------------------- Phi

Phi::Phi(Kind kind, double c, double offset, double knee)
    : kind_(kind), c_(c), offset_(offset), knee_(knee) {
  if (kind == Kind::stefan || kind == Kind::porous) {
    if (!(knee > 0.0)) throw Error("phi knee must be positive");
    breakpoints_ = {-knee, knee};
    breakpoint_count_ = 2;
  }
}

Phi Phi::make(const FamilySpec& spec) {
  ParamReader p(spec, "phi");
  Phi out = zero();
  if (spec.family == "zero") {
    out = zero();
  } else if (spec.family == "linear") {
    const double c = p.get("c", 1.0);
    out = linear(c, p.get("offset", 0.0));
  } else if (spec.family == "stefan") {
    const double c = p.get("c", 1.0);
    out = stefan(c, p.get("knee", 1.0));
  } else if (spec.family == "porous") {
    const double c = p.get("c", 1.0);
    out = porous(c, p.get("knee", 1.0));
  } else {
    throw Error("unknown phi family '" + spec.family + "'");
  }
  p.finish();
  return out;
}

double Phi::value(double u) const {
  switch (kind_) {
    case Kind::zero:
      return 0.0;
    case Kind::linear:
      return c_ * u + offset_;
    case Kind::stefan:
      return c_ * sign(u) * std::max(std::abs(u) - knee_, 0.0);
    case Kind::porous: {
      const double a = std::abs(u);
      if (a <= knee_) return c_ * u * u * u / (3.0 * knee_ * knee_);
      return c_ * sign(u) * (knee_ / 3.0 + a - knee_);
    }
  }
  return 0.0;
}

double Phi::derivative(double u) const {
  switch (kind_) {
    case Kind::zero:
      return 0.0;
    case Kind::linear:
      return c_;
    case Kind::stefan:
      return std::abs(u) > knee_ ? c_ : 0.0;
    case Kind::porous: {
      const double a = std::abs(u);
      return a <= knee_ ? c_ * (a / knee_) * (a / knee_) : c_;
    }
  }
  return 0.0;
}

double Phi::sqrt_derivative(double u) const {
  const double d = derivative(u);
  return d > 0.0 ? std::sqrt(d) : 0.0;
}

double Phi::lipschitz() const {
  return kind_ == Kind::zero ? 0.0 : std::abs(c_);
}

FamilySpec Phi::describe() const {
  switch (kind_) {
    case Kind::zero:
      return {"zero", {}};
    case Kind::linear:
      return {"linear", {{"c", c_}, {"offset", offset_}}};
    case Kind::stefan:
      return {"stefan", {{"c", c_}, {"knee", knee_}}};
    case Kind::porous:
      return {"porous", {{"c", c_}, {"knee", knee_}}};
  }
  return {};
}

// ---------------------------------------------------------------- Flux

Flux::Flux(Kind kind, double c, double clip, double offset, Point direction)
    : kind_(kind), c_(c), clip_(clip), offset_(offset), direction_(direction) {
  if (kind == Kind::burgers) {
    if (!(clip > 0.0)) throw Error("burgers clip must be positive");
    breakpoints_ = {-clip, clip};
    breakpoint_count_ = 2;
  }
}

Flux Flux::make(const FamilySpec& spec) {
  ParamReader p(spec, "flux");
  Point dir = {p.get("dir_x", 1.0), p.get("dir_y", 0.0)};
  Flux out = zero();
  if (spec.family == "zero") {
    out = zero();
  } else if (spec.family == "linear") {
    out = linear(p.get("c", 1.0), dir);
  } else if (spec.family == "burgers") {
    const double c = p.get("c", 1.0);
    out = burgers(c, p.get("clip", 10.0), dir);
  } else {
    throw Error("unknown flux family '" + spec.family + "'");
  }
  out.offset_ = p.get("offset", 0.0);
  p.finish();
  return out;
}

double Flux::base(double u) const {
  switch (kind_) {
    case Kind::zero:
      return 0.0;
    case Kind::linear:
      return c_ * u;
    case Kind::burgers: {
      const double a = std::abs(u);
      if (a <= clip_) return 0.5 * c_ * u * u;
      return c_ * (clip_ * a - 0.5 * clip_ * clip_);
    }
  }
  return 0.0;
}

double Flux::base_derivative(double u) const {
  switch (kind_) {
    case Kind::zero:
      return 0.0;
    case Kind::linear:
      return c_;
    case Kind::burgers:
      return c_ * std::clamp(u, -clip_, clip_);
  }
  return 0.0;
}

double Flux::base_plus(double u) const {
  switch (kind_) {
    case Kind::zero:
      return 0.0;
    case Kind::linear:
      return std::max(c_, 0.0) * u;
    case Kind::burgers:
      // f' = c clamp(u) has the sign of c u.
      return c_ * u > 0.0 ? base(u) : 0.0;
  }
  return 0.0;
}

double Flux::base_minus(double u) const {
  switch (kind_) {
    case Kind::zero:
      return 0.0;
    case Kind::linear:
      return std::min(c_, 0.0) * u;
    case Kind::burgers:
      return c_ * u < 0.0 ? base(u) : 0.0;
  }
  return 0.0;
}

double Flux::value(double u, int axis) const {
  return direction_[axis] * base(u) + offset_;
}

double Flux::derivative(double u, int axis) const {
  return direction_[axis] * base_derivative(u);
}

double Flux::plus(double u, int axis) const {
  const double d = direction_[axis];
  return d >= 0.0 ? d * base_plus(u) : d * base_minus(u);
}

double Flux::minus(double u, int axis) const {
  const double d = direction_[axis];
  return d >= 0.0 ? d * base_minus(u) : d * base_plus(u);
}

double Flux::lipschitz() const {
  const double dir = std::max(std::abs(direction_[0]), std::abs(direction_[1]));
  switch (kind_) {
    case Kind::zero:
      return 0.0;
    case Kind::linear:
      return dir * std::abs(c_);
    case Kind::burgers:
      return dir * std::abs(c_) * clip_;
  }
  return 0.0;
}

FamilySpec Flux::describe() const {
  FamilySpec out;
  switch (kind_) {
    case Kind::zero:
      out.family = "zero";
      break;
    case Kind::linear:
      out = {"linear", {{"c", c_}}};
      break;
    case Kind::burgers:
      out = {"burgers", {{"c", c_}, {"clip", clip_}}};
      break;
  }
  if (kind_ != Kind::zero) {
    out.params["dir_x"] = direction_[0];
    out.params["dir_y"] = direction_[1];
  }
  if (offset_ != 0.0) out.params["offset"] = offset_;
  return out;
}

// ------------------------------------------------------ SpatialProfile

SpatialProfile SpatialProfile::make(const FamilySpec& spec) {
  ParamReader p(spec, "eta.profile");
  SpatialProfile out = constant(0.0);
  if (spec.family == "constant") {
    out = constant(p.get("amp", 1.0));
  } else if (spec.family == "gaussian") {
    const double amp = p.get("amp", 1.0);
    const double width = p.get("width", 1.0);
    const double cx = p.get("center", 0.0);
    out = gaussian(amp, width, {cx, p.get("center_y", 0.0)});
    if (!(width > 0.0)) throw Error("gaussian profile width must be positive");
  } else {
    throw Error("unknown eta.profile family '" + spec.family + "'");
  }
  p.finish();
  return out;
}

double SpatialProfile::value(const Point& x, int dim) const {
  if (kind_ == Kind::constant) return amp_;
  const double r = radius(x, center_, dim);
  return amp_ * std::exp(-r * r / (2.0 * width_ * width_));
}

double SpatialProfile::lipschitz() const {
  if (kind_ == Kind::constant) return 0.0;
  // max of r/w^2 exp(-r^2/(2w^2)) is attained at r = w.
  return std::abs(amp_) / width_ * std::exp(-0.5);
}

FamilySpec SpatialProfile::describe() const {
  if (kind_ == Kind::constant) return {"constant", {{"amp", amp_}}};
  return {"gaussian",
          {{"amp", amp_},
           {"width", width_},
           {"center", center_[0]},
           {"center_y", center_[1]}}};
}

// --------------------------------------------------------- StateFactor

StateFactor StateFactor::make(const FamilySpec& spec) {
  ParamReader p(spec, "eta.sigma");
  StateFactor out = zero();
  if (spec.family == "zero") {
    out = zero();
  } else if (spec.family == "one") {
    out = one();
  } else if (spec.family == "linear") {
    out = linear(p.get("lambda", 0.5));
  } else if (spec.family == "affine") {
    const double a = p.get("a", 1.0);
    out = affine(a, p.get("b", 0.5));
  } else if (spec.family == "cutoff") {
    out = cutoff(p.get("radius", 1.0));
    if (!(out.a_ > 0.0)) throw Error("cutoff radius must be positive");
  } else {
    throw Error("unknown eta.sigma family '" + spec.family + "'");
  }
  p.finish();
  return out;
}

double StateFactor::value(double u) const {
  switch (kind_) {
    case Kind::zero:
      return 0.0;
    case Kind::one:
      return 1.0;
    case Kind::linear:
      return b_ * u;
    case Kind::affine:
      return a_ + b_ * u;
    case Kind::cutoff:
      return std::max(1.0 - std::abs(u) / a_, 0.0);
  }
  return 0.0;
}

double StateFactor::lipschitz() const {
  switch (kind_) {
    case Kind::zero:
    case Kind::one:
      return 0.0;
    case Kind::linear:
    case Kind::affine:
      return std::abs(b_);
    case Kind::cutoff:
      return 1.0 / a_;
  }
  return 0.0;
}

double StateFactor::growth() const {
  switch (kind_) {
    case Kind::zero:
      return 0.0;
    case Kind::one:
    case Kind::cutoff:
      return 1.0;
    case Kind::linear:
      return std::abs(b_);
    case Kind::affine:
      return std::max(std::abs(a_), std::abs(b_));
  }
  return 0.0;
}

double StateFactor::sup_on(double r) const {
  switch (kind_) {
    case Kind::zero:
      return 0.0;
    case Kind::one:
      return 1.0;
    case Kind::linear:
      return std::abs(b_) * r;
    case Kind::affine:
      return std::max(std::abs(a_ + b_ * r), std::abs(a_ - b_ * r));
    case Kind::cutoff:
      return 1.0;
  }
  return 0.0;
}

double StateFactor::support_radius() const {
  if (kind_ == Kind::zero) return 0.0;
  if (kind_ == Kind::cutoff) return a_;
  return std::numeric_limits<double>::infinity();
}

FamilySpec StateFactor::describe() const {
  switch (kind_) {
    case Kind::zero:
      return {"zero", {}};
    case Kind::one:
      return {"one", {}};
    case Kind::linear:
      return {"linear", {{"lambda", b_}}};
    case Kind::affine:
      return {"affine", {{"a", a_}, {"b", b_}}};
    case Kind::cutoff:
      return {"cutoff", {{"radius", a_}}};
  }
  return {};
}

// --------------------------------------------------------- InitialData

InitialData InitialData::make(const FamilySpec& spec) {
  ParamReader p(spec, "u0");
  InitialData out = zero();
  if (spec.family == "zero") {
    out = zero();
  } else if (spec.family == "constant") {
    out = constant(p.get("height", 1.0));
  } else if (spec.family == "bump" || spec.family == "cosine") {
    const double height = p.get("height", 1.0);
    const double width = p.get("width", 1.0);
    const double cx = p.get("center", 0.0);
    const Point c = {cx, p.get("center_y", 0.0)};
    if (!(width > 0.0)) throw Error("u0 width must be positive");
    out = spec.family == "bump" ? bump(height, width, c)
                                : cosine(height, width, c);
  } else {
    throw Error("unknown u0 family '" + spec.family + "'");
  }
  p.finish();
  return out;
}

double InitialData::value(const Point& x, int dim) const {
  switch (kind_) {
    case Kind::zero:
      return 0.0;
    case Kind::constant:
      return height_;
    case Kind::bump: {
      const double r = radius(x, center_, dim);
      if (r >= width_) return 0.0;
      const double s = r / width_;
      return height_ * std::exp(1.0 - 1.0 / (1.0 - s * s));
    }
    case Kind::cosine: {
      const double r = radius(x, center_, dim);
      if (r >= width_) return 0.0;
      const double c = std::cos(std::numbers::pi * r / (2.0 * width_));
      return height_ * c * c;
    }
  }
  return 0.0;
}

double InitialData::support_extent(int dim) const {
  switch (kind_) {
    case Kind::zero:
      return 0.0;
    case Kind::constant:
      return std::numeric_limits<double>::infinity();
    case Kind::bump:
    case Kind::cosine: {
      const double c = dim == 1 ? std::abs(center_[0])
                                : std::max(std::abs(center_[0]),
                                           std::abs(center_[1]));
      return c + width_;
    }
  }
  return 0.0;
}

FamilySpec InitialData::describe() const {
  switch (kind_) {
    case Kind::zero:
      return {"zero", {}};
    case Kind::constant:
      return {"constant", {{"height", height_}}};
    case Kind::bump:
    case Kind::cosine:
      return {kind_ == Kind::bump ? "bump" : "cosine",
              {{"height", height_},
               {"width", width_},
               {"center", center_[0]},
               {"center_y", center_[1]}}};
  }
  return {};
}

}  // namespace levylab
