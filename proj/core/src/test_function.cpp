#include "levylab/test_function.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "levylab/errors.hpp"

namespace levylab {

double TimeFactor::value(double t) const {
  if (is_one()) return 1.0;
  if (t >= end_) return 0.0;
  const double s = 1.0 - t / end_;
  return s * s * s;
}

double TimeFactor::derivative(double t) const {
  if (is_one() || t >= end_) return 0.0;
  const double s = 1.0 - t / end_;
  return -3.0 * s * s / end_;
}

double TimeFactor::primitive(double t) const {
  if (is_one()) return t;
  const double s = 1.0 - std::min(t, end_) / end_;
  return 0.25 * end_ * (1.0 - s * s * s * s);
}

SpaceFactor SpaceFactor::bump(Point center, double width) {
  if (!(width > 0.0)) throw Error("bump width must be positive");
  return SpaceFactor(Kind::bump, center, width, 0.0);
}

SpaceFactor SpaceFactor::window(Point center, double spacing, double period) {
  if (!(spacing > 0.0) || !(period > 0.0)) {
    throw Error("window spacing and period must be positive");
  }
  return SpaceFactor(Kind::window, center, spacing, period);
}

void SpaceFactor::window_axis(double x, double c, double out[3]) const {
  // Signed periodic distance in [-period/2, period/2).
  double d = std::fmod(x - c, period_);
  if (d >= 0.5 * period_) d -= period_;
  if (d < -0.5 * period_) d += period_;
  if (std::abs(d) >= width_) {
    out[0] = out[1] = out[2] = 0.0;
    return;
  }
  const double k = std::numbers::pi / (2.0 * width_);
  const double c1 = std::cos(k * d);
  out[0] = c1 * c1;
  out[1] = -k * std::sin(2.0 * k * d);
  out[2] = -2.0 * k * k * std::cos(2.0 * k * d);
}

double SpaceFactor::value(const Point& x, int dim) const {
  if (kind_ == Kind::window) {
    double v = 1.0;
    for (int k = 0; k < dim; ++k) {
      double w[3];
      window_axis(x[k], center_[k], w);
      v *= w[0];
    }
    return v;
  }
  double r2 = 0.0;
  for (int k = 0; k < dim; ++k) r2 += (x[k] - center_[k]) * (x[k] - center_[k]);
  const double q = 1.0 - r2 / (width_ * width_);
  if (q <= 0.0) return 0.0;
  return q * q * q * q;
}

Point SpaceFactor::gradient(const Point& x, int dim) const {
  Point g{0.0, 0.0};
  if (kind_ == Kind::window) {
    double w[2][3] = {{1.0, 0.0, 0.0}, {1.0, 0.0, 0.0}};
    for (int k = 0; k < dim; ++k) window_axis(x[k], center_[k], w[k]);
    g[0] = w[0][1] * w[1][0];
    g[1] = w[0][0] * w[1][1];
    return g;
  }
  double r2 = 0.0;
  for (int k = 0; k < dim; ++k) r2 += (x[k] - center_[k]) * (x[k] - center_[k]);
  const double w2 = width_ * width_;
  const double q = 1.0 - r2 / w2;
  if (q <= 0.0) return g;
  for (int k = 0; k < dim; ++k) {
    g[k] = 4.0 * q * q * q * (-2.0 * (x[k] - center_[k]) / w2);
  }
  return g;
}

double SpaceFactor::laplacian(const Point& x, int dim) const {
  if (kind_ == Kind::window) {
    double w[2][3] = {{1.0, 0.0, 0.0}, {1.0, 0.0, 0.0}};
    for (int k = 0; k < dim; ++k) window_axis(x[k], center_[k], w[k]);
    return w[0][2] * w[1][0] + w[0][0] * w[1][2];
  }
  double r2 = 0.0;
  for (int k = 0; k < dim; ++k) r2 += (x[k] - center_[k]) * (x[k] - center_[k]);
  const double w2 = width_ * width_;
  const double q = 1.0 - r2 / w2;
  if (q <= 0.0) return 0.0;
  // b = q^4 with d_k q = -2 (x_k - c_k) / w^2 and d_kk q = -2 / w^2.
  double lap = 0.0;
  for (int k = 0; k < dim; ++k) {
    const double dq = -2.0 * (x[k] - center_[k]) / w2;
    lap += 12.0 * q * q * dq * dq + 4.0 * q * q * q * (-2.0 / w2);
  }
  return lap;
}

std::string SpaceFactor::describe() const {
  std::ostringstream os;
  os.precision(6);
  os << (kind_ == Kind::bump ? "bump" : "window") << "(" << center_[0] << ","
     << center_[1] << ";" << width_ << ")";
  return os.str();
}

std::string TestFunction::describe() const {
  std::ostringstream os;
  os.precision(6);
  os << b_.describe();
  if (!a_.is_one()) os << "*cutoff(" << a_.end() << ")";
  return os.str();
}

std::vector<TestFunction> standard_test_functions(int dim, double half_width,
                                                  double horizon) {
  std::vector<TestFunction> out;
  const double width = 0.45 * half_width;
  for (double c : {-0.5, -0.25, 0.0, 0.25, 0.5}) {
    out.emplace_back(TimeFactor::cutoff(horizon),
                     SpaceFactor::bump({c * half_width, 0.0}, width));
  }
  (void)dim;
  return out;
}

std::vector<TestFunction> partition_of_unity(int dim, double half_width,
                                             int windows_per_axis) {
  if (windows_per_axis < 2) throw Error("partition of unity needs >= 2 windows");
  const double period = 2.0 * half_width;
  const double spacing = period / windows_per_axis;
  std::vector<TestFunction> out;
  const int ny = dim == 2 ? windows_per_axis : 1;
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < windows_per_axis; ++i) {
      const Point c{-half_width + (i + 0.5) * spacing,
                    dim == 2 ? -half_width + (j + 0.5) * spacing : 0.0};
      out.emplace_back(TimeFactor::one(), SpaceFactor::window(c, spacing, period));
    }
  }
  return out;
}

}  // namespace levylab
