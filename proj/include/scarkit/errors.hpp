#pragma once

#include <stdexcept>
#include <string>

namespace scarkit {

/// Raised when an operation is called outside its stated domain.
class precondition_error : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Operands live on chains of different length or vectors of the wrong size.
class dimension_error : public precondition_error {
 public:
  using precondition_error::precondition_error;
};

/// Dense representation would exceed the supported size.
class capacity_error : public precondition_error {
 public:
  using precondition_error::precondition_error;
};

/// A Hamiltonian does not have the required eigenstate.
class classification_error : public std::runtime_error {
 public:
  classification_error(const std::string& what, double residual)
      : std::runtime_error(what), residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

/// Numerical routine did not reach the requested accuracy.
class convergence_error : public std::runtime_error {
 public:
  convergence_error(const std::string& what, double achieved)
      : std::runtime_error(what), achieved_(achieved) {}
  double achieved() const { return achieved_; }

 private:
  double achieved_;
};

}  // namespace scarkit
