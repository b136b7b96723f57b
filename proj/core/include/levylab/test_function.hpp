#ifndef LEVYLAB_TEST_FUNCTION_HPP_
#define LEVYLAB_TEST_FUNCTION_HPP_

#include <string>
#include <vector>

#include "levylab/grid.hpp"

namespace levylab {

// Time factor a(t): either a == 1 or the cutoff (1 - t/Tc)^3 on [0, Tc).
class TimeFactor {
 public:
  static TimeFactor one() { return TimeFactor(0.0); }
  static TimeFactor cutoff(double end) { return TimeFactor(end); }
  double value(double t) const;
  double derivative(double t) const;
  // int_0^t a(s) ds.
  double primitive(double t) const;
  bool is_one() const { return end_ == 0.0; }
  double end() const { return end_; }

 private:
  explicit TimeFactor(double end) : end_(end) {}
  double end_;
};

// Space factor b(x).
//   bump   : (1 - |x - c|^2 / w^2)^4 on |x - c| < w
//   window : periodic cos^2 window of half-width s centred at c; the windows
//            centred at -L + s/2 + j s, j = 0..2L/s - 1, sum to one.
class SpaceFactor {
 public:
  static SpaceFactor bump(Point center, double width);
  static SpaceFactor window(Point center, double spacing, double period);
  double value(const Point& x, int dim) const;
  Point gradient(const Point& x, int dim) const;
  double laplacian(const Point& x, int dim) const;
  std::string describe() const;

 private:
  enum class Kind { bump, window };
  SpaceFactor(Kind kind, Point center, double width, double period)
      : kind_(kind), center_(center), width_(width), period_(period) {}
  // Window factors along one axis: value, first and second derivative.
  void window_axis(double x, double c, double out[3]) const;
  Kind kind_;
  Point center_;
  double width_;
  double period_;
};

// Nonnegative separable test function psi(t, x) = a(t) b(x) with analytic
// derivatives.
class TestFunction {
 public:
  TestFunction(TimeFactor a, SpaceFactor b) : a_(a), b_(b) {}
  double value(double t, const Point& x, int dim) const {
    return a_.value(t) * b_.value(x, dim);
  }
  const TimeFactor& time() const { return a_; }
  const SpaceFactor& space() const { return b_; }
  std::string describe() const;

 private:
  TimeFactor a_;
  SpaceFactor b_;
};

// Five bumps spread over the interior, each with the cutoff a(t) = (1 - t/T)^3.
std::vector<TestFunction> standard_test_functions(int dim, double half_width,
                                                  double horizon);
// Periodic cos^2 windows summing to one on [-L, L)^d, with a == 1.
std::vector<TestFunction> partition_of_unity(int dim, double half_width,
                                             int windows_per_axis);

}  // namespace levylab

#endif  // LEVYLAB_TEST_FUNCTION_HPP_
