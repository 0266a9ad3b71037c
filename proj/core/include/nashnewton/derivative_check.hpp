#pragma once

#include "nashnewton/game.hpp"

#include <functional>
#include <optional>

namespace nashnewton {

/// Central-difference Jacobian of f at x.
Matrix finite_difference_jacobian(
    const std::function<Vector(const Vector&)>& f, const Vector& x, double h);

/// |analytic - reference|_inf / max(1, |reference|_inf).
double relative_error(const Matrix& analytic, const Matrix& reference);

/// Compares each agent's gradient oracle against central differences of its
/// cost value with respect to its own block. Returns the relative error.
double pseudogradient_fd_error(const GameProblem& game, const Vector& a,
                               double h = 1e-6);

/// Compares the assembled game Hessian against central differences of the
/// pseudogradient.
double game_hessian_fd_error(const GameProblem& game, const Vector& a,
                             double h = 1e-6);

/// Compares each agent's constraint Jacobian against differences of g_i.
double constraint_jacobian_fd_error(const GameProblem& game, const Vector& a,
                                    double h = 1e-6);

/// Compares the limiting-Jacobian element of Phi at the stacked point z with
/// central differences of Phi. Returns nullopt when some complementarity
/// row lies within 100 h of its kink, where Phi is not differentiable.
std::optional<double> phi_jacobian_fd_error(const GameProblem& game, const Vector& z,
                                            double h = 1e-6);

}  // namespace nashnewton
