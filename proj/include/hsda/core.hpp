#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <type_traits>

namespace hsda {

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

/// Matrix-free linear map on dense vectors.
template <typename Scalar>
using LinearMap = std::function<Vector<Scalar>(const Vector<Scalar>&)>;

/// Parameter type excluded from template deduction, so Eigen expressions and
/// literals can be passed where a concrete vector or scalar is expected.
template <typename T>
using NoDeduce = std::type_identity_t<T>;

using VectorXd = Vector<double>;
using MatrixXd = Matrix<double>;

// Error hierarchy. Every failure a solver can signal derives from Error so
// drivers and the CLI can catch one type and map it to an exit code.

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NonConvergence : public Error {
 public:
  using Error::Error;
};

class NumericalOverflow : public Error {
 public:
  using Error::Error;
};

class DimensionTooLarge : public Error {
 public:
  using Error::Error;
};

class EigensolverFailure : public Error {
 public:
  using Error::Error;
};

class RetryBudgetExceeded : public Error {
 public:
  using Error::Error;
};

class ConstructionError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class MismatchedProblem : public Error {
 public:
  using Error::Error;
};

/// Violated precondition on an argument (N = 0, step = 0, ...).
class PreconditionViolation : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

inline void require(bool condition, const std::string& what) {
  if (!condition) throw PreconditionViolation(what);
}

template <typename Scalar>
Scalar infinity() {
  return std::numeric_limits<Scalar>::infinity();
}

}  // namespace hsda
