#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace zominmax {

/// Thrown when a solver or objective produces a non-finite value.
class NumericalFailure : public std::runtime_error {
 public:
  NumericalFailure(const std::string& what, std::size_t epoch, std::size_t step)
      : std::runtime_error(what + " (epoch " + std::to_string(epoch) + ", step " +
                           std::to_string(step) + ")"),
        epoch_(epoch),
        step_(step) {}
  explicit NumericalFailure(const std::string& what)
      : std::runtime_error(what), epoch_(0), step_(0) {}

  std::size_t epoch() const { return epoch_; }
  std::size_t step() const { return step_; }

 private:
  std::size_t epoch_;
  std::size_t step_;
};

/// Thrown when an operation needs a capability the oracle does not offer,
/// e.g. an exact gradient through a black-box response model.
class UnsupportedMode : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Reference solver ran out of iterations before reaching its tolerance.
class NonConvergence : public std::runtime_error {
 public:
  NonConvergence(const std::string& what, double residual)
      : std::runtime_error(what + " (residual " + std::to_string(residual) + ")"),
        residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

/// Dataset parsing or file-system failure.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Output file could not be written.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid experiment configuration or command-line usage.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace zominmax
