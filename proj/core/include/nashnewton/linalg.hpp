#pragma once

#include "nashnewton/types.hpp"

namespace nashnewton {

/// Smallest LU pivot, relative to the largest, of a matrix treated as
/// nonsingular.
inline constexpr double kSingularPivot = 1e-13;

enum class LinearSolveStatus { Direct, Regularized, Failed };

/// Solves J x = rhs by LU with partial pivoting. When J is numerically
/// singular, falls back to the minimum-norm least-squares solution
/// (reported as Regularized). Returns Failed if neither yields a finite
/// solution.
LinearSolveStatus solve_newton_system(const Matrix& J, const Vector& rhs,
                                      Vector& x);

/// Smallest singular value of a square matrix.
double smallest_singular_value(const Matrix& A);

}  // namespace nashnewton
