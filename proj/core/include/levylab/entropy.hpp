#ifndef LEVYLAB_ENTROPY_HPP_
#define LEVYLAB_ENTROPY_HPP_

#include <string>
#include <vector>

#include "levylab/catalog.hpp"
#include "levylab/grid.hpp"

namespace levylab {

// Smoothed |r|: beta'' = (15/8)(1 - r^2)^2 on |r| <= 1 and 0 outside, so
// beta'(+-1) = +-1, beta(1) = 11/16 and beta(r) = |r| - 5/16 for |r| >= 1.
struct BaseProfile {
  static constexpr double kM1 = 5.0 / 16.0;  // sup_{|r|<=1} ||r| - beta(r)|
  static constexpr double kM2 = 15.0 / 8.0;  // sup |beta''|
  static double value(double r);
  static double first(double r);
  static double second(double r);
};

enum class EntropyFamily { beta_theta, h_delta, quadratic };

// Entropy flux triple (beta, zeta, nu) bound to one (phi, f) pair:
//   zeta_k' = beta' f_k',  nu' = beta' phi',  zeta(0) = nu(0) = 0.
class EntropyTriple {
 public:
  static EntropyTriple make_beta_theta(double theta, const Phi& phi,
                                       const Flux& flux);
  // p even, h'' = |x|^(p-2) up to 1/delta and delta^(2-p) beyond.
  static EntropyTriple make_h_delta(int p, double delta, const Phi& phi,
                                    const Flux& flux);
  // beta(r) = r^2 / 2.
  static EntropyTriple make_quadratic(const Phi& phi, const Flux& flux);

  EntropyFamily family() const { return family_; }
  double theta() const { return theta_; }
  int power() const { return power_; }
  double delta() const { return delta_; }
  std::string label() const;

  double beta(double r) const;
  double beta_prime(double r) const;
  double beta_second(double r) const;
  // beta'' vanishes outside [-support, support] (+inf when it never does).
  double second_support() const;
  // Points where beta'' is not smooth, ascending.
  const std::vector<double>& breakpoints() const { return breakpoints_; }

  double zeta(double r, int axis) const;
  double nu(double r) const;

  const Phi& phi() const { return phi_; }
  const Flux& flux() const { return flux_; }

 private:
  EntropyTriple(EntropyFamily family, double theta, int power, double delta,
                const Phi& phi, const Flux& flux);
  EntropyFamily family_;
  double theta_ = 1.0;
  int power_ = 2;
  double delta_ = 1.0;
  Phi phi_;
  Flux flux_;
  std::vector<double> breakpoints_;
  std::vector<double> nu_cuts_, zeta_cuts_;
};

// G(u) = int_0^u sqrt(phi').
double kirchhoff_G(const Phi& phi, double u);
// phi^beta(a, b) = int_b^a beta'(s - b) phi'(s) ds.
double phi_beta(double a, double b, const EntropyTriple& triple);
// F^beta_k(a, b) = int_b^a beta'(s - b) f_k'(s) ds.
Point F_beta(double a, double b, const EntropyTriple& triple, int dim);
// Kruzkov flux F_k(a, b) = sign(a - b)(f_k(a) - f_k(b)).
Point kruzkov_F(double a, double b, const Flux& flux, int dim);
// I_beta(a, b) = int_a^b int_mu^a beta''(mu - s) sqrt(phi'(s)) ds sqrt(phi'(mu)) dmu.
double I_beta(double a, double b, const EntropyTriple& triple);

}  // namespace levylab

#endif  // LEVYLAB_ENTROPY_HPP_
