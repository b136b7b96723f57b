#include "levylab/entropy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "levylab/errors.hpp"
#include "levylab/quadrature.hpp"

namespace levylab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNestedTol = 1e-8;

double sign(double x) { return (x > 0.0) - (x < 0.0); }

void sort_unique(std::vector<double>& v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
}

// Oriented Gauss integral over [a, b] split at sorted cuts. Exact for the
// piecewise polynomial integrands produced by the catalog.
template <class F>
double gauss_oriented(const F& f, double a, double b,
                      const std::vector<double>& cuts) {
  if (a == b) return 0.0;
  if (a < b) return GaussLegendre16::integrate_piecewise(f, a, b, cuts);
  return -GaussLegendre16::integrate_piecewise(f, b, a, cuts);
}

}  // namespace

double BaseProfile::value(double r) {
  const double x = std::abs(r);
  if (x >= 1.0) return x - kM1;
  const double x2 = x * x;
  return 15.0 / 8.0 * x2 * (0.5 - x2 / 6.0 + x2 * x2 / 30.0);
}

double BaseProfile::first(double r) {
  if (r >= 1.0) return 1.0;
  if (r <= -1.0) return -1.0;
  const double r2 = r * r;
  return 15.0 / 8.0 * r * (1.0 - 2.0 * r2 / 3.0 + r2 * r2 / 5.0);
}

double BaseProfile::second(double r) {
  if (std::abs(r) >= 1.0) return 0.0;
  const double q = 1.0 - r * r;
  return kM2 * q * q;
}

EntropyTriple::EntropyTriple(EntropyFamily family, double theta, int power,
                             double delta, const Phi& phi, const Flux& flux)
    : family_(family), theta_(theta), power_(power), delta_(delta),
      phi_(phi), flux_(flux) {
  if (family_ == EntropyFamily::beta_theta) {
    breakpoints_ = {-theta_, theta_};
  } else if (family_ == EntropyFamily::h_delta && power_ > 2) {
    breakpoints_ = {-1.0 / delta_, 1.0 / delta_};
  }
  nu_cuts_ = breakpoints_;
  for (double p : phi_.breakpoints()) nu_cuts_.push_back(p);
  nu_cuts_.push_back(0.0);
  sort_unique(nu_cuts_);
  zeta_cuts_ = breakpoints_;
  for (double p : flux_.breakpoints()) zeta_cuts_.push_back(p);
  zeta_cuts_.push_back(0.0);
  sort_unique(zeta_cuts_);
}

EntropyTriple EntropyTriple::make_beta_theta(double theta, const Phi& phi,
                                             const Flux& flux) {
  if (!(theta > 0.0) || !std::isfinite(theta)) {
    throw Error("beta_theta needs a finite theta > 0");
  }
  return EntropyTriple(EntropyFamily::beta_theta, theta, 0, 0.0, phi, flux);
}

EntropyTriple EntropyTriple::make_h_delta(int p, double delta, const Phi& phi,
                                          const Flux& flux) {
  if (p < 2 || p % 2 != 0) throw Error("h_delta needs an even power p >= 2");
  if (!(delta > 0.0)) throw Error("h_delta needs delta > 0");
  return EntropyTriple(EntropyFamily::h_delta, 0.0, p, delta, phi, flux);
}

EntropyTriple EntropyTriple::make_quadratic(const Phi& phi, const Flux& flux) {
  return EntropyTriple(EntropyFamily::quadratic, 0.0, 2, 0.0, phi, flux);
}

std::string EntropyTriple::label() const {
  std::ostringstream os;
  os.precision(6);
  switch (family_) {
    case EntropyFamily::beta_theta:
      os << "beta_theta(" << theta_ << ")";
      break;
    case EntropyFamily::h_delta:
      os << "h_delta(" << power_ << "," << delta_ << ")";
      break;
    case EntropyFamily::quadratic:
      os << "quadratic";
      break;
  }
  return os.str();
}

double EntropyTriple::beta(double r) const {
  switch (family_) {
    case EntropyFamily::beta_theta:
      return theta_ * BaseProfile::value(r / theta_);
    case EntropyFamily::quadratic:
      return 0.5 * r * r;
    case EntropyFamily::h_delta: {
      const int p = power_;
      const double A = 1.0 / delta_, x = std::abs(r);
      if (x <= A) return std::pow(x, p) / (p * (p - 1.0));
      const double d = x - A;
      return std::pow(A, p) / (p * (p - 1.0)) + std::pow(A, p - 1) / (p - 1.0) * d +
             0.5 * std::pow(A, p - 2) * d * d;
    }
  }
  return 0.0;
}

double EntropyTriple::beta_prime(double r) const {
  switch (family_) {
    case EntropyFamily::beta_theta:
      return BaseProfile::first(r / theta_);
    case EntropyFamily::quadratic:
      return r;
    case EntropyFamily::h_delta: {
      const int p = power_;
      const double A = 1.0 / delta_, x = std::abs(r);
      if (x <= A) return sign(r) * std::pow(x, p - 1) / (p - 1.0);
      return sign(r) * (std::pow(A, p - 1) / (p - 1.0) + std::pow(A, p - 2) * (x - A));
    }
  }
  return 0.0;
}

double EntropyTriple::beta_second(double r) const {
  switch (family_) {
    case EntropyFamily::beta_theta:
      return BaseProfile::second(r / theta_) / theta_;
    case EntropyFamily::quadratic:
      return 1.0;
    case EntropyFamily::h_delta: {
      const double A = 1.0 / delta_;
      return std::pow(std::min(std::abs(r), A), power_ - 2);
    }
  }
  return 0.0;
}

double EntropyTriple::second_support() const {
  return family_ == EntropyFamily::beta_theta ? theta_ : kInf;
}

double EntropyTriple::nu(double r) const {
  return gauss_oriented(
      [this](double s) { return beta_prime(s) * phi_.derivative(s); }, 0.0, r,
      nu_cuts_);
}

double EntropyTriple::zeta(double r, int axis) const {
  return gauss_oriented(
      [this, axis](double s) { return beta_prime(s) * flux_.derivative(s, axis); },
      0.0, r, zeta_cuts_);
}

namespace {

// Kinks of sqrt(phi'): the breakpoints of phi' plus the origin, where
// sqrt(phi') of a porous-medium law has a corner even though phi' is smooth.
std::vector<double> sqrt_kinks(const Phi& phi) {
  const auto bps = phi.breakpoints();
  std::vector<double> out(bps.begin(), bps.end());
  out.push_back(0.0);
  return out;
}

}  // namespace

double kirchhoff_G(const Phi& phi, double u) {
  return integrate_piecewise([&phi](double s) { return phi.sqrt_derivative(s); },
                             0.0, u, sqrt_kinks(phi));
}

namespace {

std::vector<double> shifted_cuts(const EntropyTriple& triple, double b,
                                 std::span<const double> extra) {
  std::vector<double> cuts;
  for (double p : triple.breakpoints()) cuts.push_back(b + p);
  cuts.push_back(b);
  for (double p : extra) cuts.push_back(p);
  sort_unique(cuts);
  return cuts;
}

}  // namespace

double phi_beta(double a, double b, const EntropyTriple& triple) {
  const auto cuts = shifted_cuts(triple, b, triple.phi().breakpoints());
  const Phi& phi = triple.phi();
  return integrate_piecewise(
      [&](double s) { return triple.beta_prime(s - b) * phi.derivative(s); }, b,
      a, cuts);
}

Point F_beta(double a, double b, const EntropyTriple& triple, int dim) {
  const auto cuts = shifted_cuts(triple, b, triple.flux().breakpoints());
  const Flux& flux = triple.flux();
  Point out{0.0, 0.0};
  for (int k = 0; k < dim; ++k) {
    out[k] = integrate_piecewise(
        [&](double s) { return triple.beta_prime(s - b) * flux.derivative(s, k); },
        b, a, cuts);
  }
  return out;
}

Point kruzkov_F(double a, double b, const Flux& flux, int dim) {
  Point out{0.0, 0.0};
  const double s = sign(a - b);
  for (int k = 0; k < dim; ++k) out[k] = s * (flux.value(a, k) - flux.value(b, k));
  return out;
}

double I_beta(double a, double b, const EntropyTriple& triple) {
  if (a == b) return 0.0;
  const Phi& phi = triple.phi();
  const double support = triple.second_support();
  const auto phi_bps = sqrt_kinks(phi);
  QuadratureOptions inner_opt;
  inner_opt.abs_tol = 1e-10;
  QuadratureOptions outer_opt;
  outer_opt.abs_tol = kNestedTol;

  auto inner = [&](double mu) {
    const double smu = phi.sqrt_derivative(mu);
    if (smu == 0.0) return 0.0;
    // beta''(mu - s) vanishes for |mu - s| > support.
    double lo = std::min(mu, a), hi = std::max(mu, a);
    lo = std::max(lo, mu - support);
    hi = std::min(hi, mu + support);
    if (!(hi > lo)) return 0.0;
    std::vector<double> cuts(phi_bps.begin(), phi_bps.end());
    for (double p : triple.breakpoints()) cuts.push_back(mu - p);
    const double value = integrate_piecewise(
        [&](double s) { return triple.beta_second(mu - s) * phi.sqrt_derivative(s); },
        lo, hi, cuts, inner_opt);
    return (a >= mu ? value : -value) * smu;
  };

  std::vector<double> cuts{a};
  for (double p : triple.breakpoints()) {
    cuts.push_back(a + p);
    cuts.push_back(a - p);
  }
  for (double q : phi_bps) {
    cuts.push_back(q);
    for (double p : triple.breakpoints()) {
      cuts.push_back(q + p);
      cuts.push_back(q - p);
    }
  }
  sort_unique(cuts);
  return integrate_piecewise(inner, a, b, cuts, outer_opt);
}

}  // namespace levylab
