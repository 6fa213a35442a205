#pragma once

#include <stdexcept>
#include <string>

namespace srde {

/// Thrown when array dimensions do not match the grid they claim to live on.
class ShapeError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// Thrown when an iterative solve fails to reach its tolerance.
class NonConvergenceError : public std::runtime_error {
public:
  NonConvergenceError(const std::string& what, double residual)
      : std::runtime_error(what), residual_(residual) {}
  double residual() const { return residual_; }

private:
  double residual_;
};

/// Thrown when a trajectory leaves the finite range; carries the first bad point.
class BlowUpError : public std::runtime_error {
public:
  BlowUpError(const std::string& what, double t, double x)
      : std::runtime_error(what), t_(t), x_(x) {}
  double t() const { return t_; }
  double x() const { return x_; }

private:
  double t_;
  double x_;
};

/// Thrown when a quadrature or other numerical routine cannot certify its result.
class NumericalError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

}  // namespace srde
