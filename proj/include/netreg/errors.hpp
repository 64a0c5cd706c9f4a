#pragma once

#include <stdexcept>
#include <string>

namespace netreg {

/// Invalid or inconsistent input: parse failures, broken invariants,
/// queries outside kernel support. CLI exit code 1.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An iterative solver stopped before reaching its tolerance. CLI exit code 2.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, double residual, long iterations)
      : std::runtime_error(what), residual_(residual), iterations_(iterations) {}

  double residual() const noexcept { return residual_; }
  long iterations() const noexcept { return iterations_; }

 private:
  double residual_;
  long iterations_;
};

}  // namespace netreg
