#include "nashnewton/derivative_check.hpp"

#include "nashnewton/kkt.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace nashnewton {

Matrix finite_difference_jacobian(
    const std::function<Vector(const Vector&)>& f, const Vector& x, double h) {
  const Vector f0 = f(x);
  Matrix J(f0.size(), x.size());
  Vector xp = x;
  for (Eigen::Index k = 0; k < x.size(); ++k) {
    const double step = h * std::max(1.0, std::abs(x(k)));
    xp(k) = x(k) + step;
    const Vector fp = f(xp);
    xp(k) = x(k) - step;
    const Vector fm = f(xp);
    xp(k) = x(k);
    J.col(k) = (fp - fm) / (2.0 * step);
  }
  return J;
}

double relative_error(const Matrix& analytic, const Matrix& reference) {
  if (analytic.size() == 0) return 0.0;
  const double scale = std::max(1.0, reference.cwiseAbs().maxCoeff());
  return (analytic - reference).cwiseAbs().maxCoeff() / scale;
}

double pseudogradient_fd_error(const GameProblem& game, const Vector& a,
                               double h) {
  const Vector F = pseudogradient(game, a);
  Vector fd(game.dimension());
  for (int i = 0; i < game.num_agents(); ++i) {
    const auto& value = game.cost(i).value;
    if (!value)
      throw CapabilityError("agent " + std::to_string(i) +
                            " has no cost value oracle");
    for (int k = 0; k < game.dim(i); ++k) {
      const int idx = game.offset(i) + k;
      const double step = h * std::max(1.0, std::abs(a(idx)));
      Vector ap = a, am = a;
      ap(idx) += step;
      am(idx) -= step;
      fd(idx) = (value(ap) - value(am)) / (2.0 * step);
    }
  }
  return relative_error(F, fd);
}

double game_hessian_fd_error(const GameProblem& game, const Vector& a,
                             double h) {
  const Matrix H = game_hessian(game, a).assembled;
  const Matrix fd = finite_difference_jacobian(
      [&game](const Vector& x) { return pseudogradient(game, x); }, a, h);
  return relative_error(H, fd);
}

double constraint_jacobian_fd_error(const GameProblem& game, const Vector& a,
                                    double h) {
  double worst = 0.0;
  for (int i = 0; i < game.num_agents(); ++i) {
    const auto& g = game.constraint(i);
    if (g.count == 0) continue;
    if (!g.jacobian)
      throw CapabilityError("agent " + std::to_string(i) +
                            " has no constraint Jacobian oracle");
    const Matrix fd = finite_difference_jacobian(g.value, a, h);
    worst = std::max(worst, relative_error(g.jacobian(a), fd));
  }
  return worst;
}

std::optional<double> phi_jacobian_fd_error(const GameProblem& game, const Vector& z,
                                            double h) {
  const int n = game.dimension();
  if (z.size() != n + game.num_multipliers())
    throw InputError("primal-dual point has the wrong length");
  const auto pd = PrimalDualPoint::split(z, n);
  const Vector gap = -stacked_constraints(game, pd.a) - pd.lambda;
  const double scale = std::max(1.0, z.cwiseAbs().maxCoeff());
  for (Eigen::Index r = 0; r < gap.size(); ++r)
    if (std::abs(gap(r)) <= 100.0 * h * scale) return std::nullopt;
  const Matrix J = limiting_jacobian(game, pd, TieRule::PreferG).matrix;
  const Matrix fd = finite_difference_jacobian(
      [&game](const Vector& x) { return assemble_phi(game, x); }, z, h);
  return relative_error(J, fd);
}

}  // namespace nashnewton
