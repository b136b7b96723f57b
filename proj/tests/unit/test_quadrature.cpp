#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "levylab/quadrature.hpp"
#include "oracle.hpp"

using namespace levylab;

TEST_CASE("adaptive Simpson integrates smooth functions to tolerance") {
  const double v = adaptive_simpson([](double x) { return std::exp(x); }, 0.0, 1.0);
  CHECK(v == doctest::Approx(std::numbers::e - 1.0).epsilon(1e-12));
  const double s = adaptive_simpson([](double x) { return std::sin(x); }, 0.0, std::numbers::pi);
  CHECK(std::abs(s - 2.0) < 1e-9);
}

TEST_CASE("adaptive Simpson is oriented") {
  auto f = [](double x) { return x * x; };
  CHECK(adaptive_simpson(f, 1.0, 0.0) == doctest::Approx(-1.0 / 3.0));
  CHECK(adaptive_simpson(f, 2.0, 2.0) == 0.0);
}

TEST_CASE("adaptive Simpson rejects non-finite integrands") {
  auto f = [](double x) { return 1.0 / x; };
  CHECK_THROWS_AS(adaptive_simpson(f, 0.0, 1.0), QuadratureError);
}

TEST_CASE("piecewise integration handles a jump sitting on a breakpoint") {
  // Step of height one at x = 1, as in sqrt(phi') for a Stefan nonlinearity.
  auto step = [](double x) { return x > 1.0 ? 1.0 : 0.0; };
  const std::vector<double> cuts{1.0};
  CHECK(integrate_piecewise(step, 0.0, 3.0, cuts) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(integrate_piecewise(step, 3.0, 0.0, cuts) == doctest::Approx(-2.0).epsilon(1e-14));
  CHECK(integrate_piecewise(step, 1.0, 1.0 + 1e-9, cuts) ==
        doctest::Approx(1e-9).epsilon(1e-12));
}

TEST_CASE("piecewise integration matches the Gauss oracle on a kinked polynomial") {
  auto f = [](double x) { return std::abs(x) * x * x + (x > 0.5 ? 1.0 : -2.0); };
  const std::vector<double> cuts{0.0, 0.5};
  const double ref = oracle::piecewise_gauss(f, -1.3, 2.1, cuts);
  CHECK(std::abs(integrate_piecewise(f, -1.3, 2.1, cuts) - ref) < 1e-9);
}

TEST_CASE("16-point Gauss rule is exact to degree 31") {
  for (int k : {0, 1, 7, 20, 31}) {
    const double v = GaussLegendre16::integrate([k](double x) { return std::pow(x, k); }, 0.0, 1.0);
    CHECK(v == doctest::Approx(1.0 / (k + 1)).epsilon(1e-14));
  }
  // Degree 32 is not integrated exactly.
  const double v32 = GaussLegendre16::integrate([](double x) { return std::pow(x, 32); }, -1.0, 1.0);
  CHECK(std::abs(v32 - 2.0 / 33.0) > 1e-16);
}

TEST_CASE("library Gauss nodes agree with a Newton-built rule") {
  const auto r = oracle::gauss_legendre(16);
  for (std::size_t i = 0; i < 8; ++i) {
    // Newton nodes are generated in descending order.
    CHECK(r.x[7 - i] == doctest::Approx(GaussLegendre16::kNodes[i]).epsilon(1e-14));
    CHECK(r.w[7 - i] == doctest::Approx(GaussLegendre16::kWeights[i]).epsilon(1e-13));
  }
}

TEST_CASE("piecewise Gauss splits at breakpoints") {
  auto f = [](double x) { return std::abs(x - 0.3); };
  const std::vector<double> cuts{0.3};
  const double v = GaussLegendre16::integrate_piecewise(f, 0.0, 1.0, cuts);
  CHECK(v == doctest::Approx(0.5 * 0.09 + 0.5 * 0.49).epsilon(1e-15));
}
