#ifndef LEVYLAB_ERRORS_HPP_
#define LEVYLAB_ERRORS_HPP_

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace levylab {

// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A coefficient produced a non-finite value or violates its catalog contract.
class InvalidSpec : public Error {
 public:
  InvalidSpec(std::string coefficient, double input, const std::string& what)
      : Error(what), coefficient_(std::move(coefficient)), input_(input) {}
  const std::string& coefficient() const { return coefficient_; }
  double input() const { return input_; }

 private:
  std::string coefficient_;
  double input_;
};

// Initial data reaches into the boundary margin of the truncated domain.
class DomainTooSmall : public Error {
 public:
  using Error::Error;
};

class QuadratureError : public Error {
 public:
  QuadratureError(double a, double b, double estimate, const std::string& what)
      : Error(what), a_(a), b_(b), estimate_(estimate) {}
  double lower() const { return a_; }
  double upper() const { return b_; }
  double estimate() const { return estimate_; }

 private:
  double a_, b_, estimate_;
};

// Infinite-activity size measure without a positive small-jump cutoff.
class TruncationRequired : public Error {
 public:
  using Error::Error;
};

// Newton and the fixed-point fallback both failed to reach tolerance.
class StepFailure : public Error {
 public:
  StepFailure(int step, std::vector<double> residuals, const std::string& what)
      : Error(what), step_(step), residuals_(std::move(residuals)) {}
  int step() const { return step_; }
  const std::vector<double>& residual_history() const { return residuals_; }
  StepFailure at_step(int step) const {
    return StepFailure(step, residuals_,
                       "step " + std::to_string(step) + ": " + what());
  }

 private:
  int step_;
  std::vector<double> residuals_;
};

class ConfigError : public Error {
 public:
  ConfigError(int line, std::string key, const std::string& what)
      : Error(format(line, key, what)), line_(line), key_(std::move(key)) {}
  int line() const { return line_; }
  const std::string& key() const { return key_; }

 private:
  static std::string format(int line, const std::string& key,
                            const std::string& what) {
    std::string out = "config";
    if (line > 0) out += " line " + std::to_string(line);
    if (!key.empty()) out += " key '" + key + "'";
    return out + ": " + what;
  }
  int line_;
  std::string key_;
};

}  // namespace levylab

#endif  // LEVYLAB_ERRORS_HPP_
