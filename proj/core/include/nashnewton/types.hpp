#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>
#include <vector>

namespace nashnewton {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Raised when caller-supplied data is malformed: wrong dimensions,
/// non-finite entries, infeasible points where feasibility is required.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when an operation needs an oracle the problem does not provide
/// (e.g. a Hessian block for a game defined by gradients only).
class CapabilityError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Raised by the empirical estimators when the data cannot support a fit.
class EstimationError : public std::runtime_error {
 public:
  enum class Kind { TooFewPoints, DegenerateFit };

  EstimationError(Kind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

/// Raised when a solver precondition is violated in a way that is only
/// detectable from the numbers (singular agent blocks, non-common
/// constraints, non-isolated solutions).
class SolverError : public std::runtime_error {
 public:
  enum class Kind {
    SingularAgentBlock,
    ConstraintsNotCommon,
    NonIsolated,
    NotConverged,
    Unsupported,
  };

  SolverError(Kind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

inline bool all_finite(const Vector& v) { return v.allFinite(); }
inline bool all_finite(const Matrix& m) { return m.allFinite(); }

}  // namespace nashnewton
