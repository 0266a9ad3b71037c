#include "nashnewton/kkt.hpp"

#include <Eigen/QR>

#include <cmath>
#include <string>

namespace nashnewton {

namespace {

void require_point(const GameProblem& game, const PrimalDualPoint& z) {
  game.require_dimension(z.a);
  if (z.lambda.size() != game.num_multipliers())
    throw InputError("multiplier vector has length " + std::to_string(z.lambda.size()) +
                     ", game has " + std::to_string(game.num_multipliers()) +
                     " constraints");
}

Vector agent_lambda(const GameProblem& game, const PrimalDualPoint& z, int i) {
  return z.lambda.segment(game.multiplier_offset(i), game.multiplier_count(i));
}

Matrix constraint_jacobian(const GameProblem& game, const Vector& a, int i) {
  const auto& g = game.constraint(i);
  if (!g.jacobian)
    throw CapabilityError("agent " + std::to_string(i) + " has no constraint Jacobian");
  return g.jacobian(a);
}

}  // namespace

Vector PrimalDualPoint::stacked() const {
  Vector z(a.size() + lambda.size());
  z << a, lambda;
  return z;
}

PrimalDualPoint PrimalDualPoint::split(const Vector& z, int n) {
  if (z.size() < n) throw InputError("stacked point shorter than the primal dimension");
  return {z.head(n), z.tail(z.size() - n)};
}

const char* to_string(TieRule rule) {
  return rule == TieRule::PreferG ? "prefer_g" : "prefer_lambda";
}

Vector lagrangian_gradient(const GameProblem& game, const PrimalDualPoint& z) {
  require_point(game, z);
  Vector L = pseudogradient(game, z.a);
  if (!game.has_constraints()) return L;
  for (int i = 0; i < game.num_agents(); ++i) {
    if (game.multiplier_count(i) == 0) continue;
    const Matrix Ji = constraint_jacobian(game, z.a, i);
    L.segment(game.offset(i), game.dim(i)) +=
        Ji.middleCols(game.offset(i), game.dim(i)).transpose() * agent_lambda(game, z, i);
  }
  return L;
}

Vector stacked_constraints(const GameProblem& game, const Vector& a) {
  Vector g(game.num_multipliers());
  for (int i = 0; i < game.num_agents(); ++i) {
    if (game.multiplier_count(i) == 0) continue;
    g.segment(game.multiplier_offset(i), game.multiplier_count(i)) =
        game.constraint(i).value(a);
  }
  return g;
}

Vector assemble_phi(const GameProblem& game, const PrimalDualPoint& z) {
  const Vector L = lagrangian_gradient(game, z);
  const Vector g = stacked_constraints(game, z.a);
  Vector phi(L.size() + g.size());
  phi << L, (-g).cwiseMin(z.lambda);
  return phi;
}

Vector assemble_phi(const GameProblem& game, const Vector& z) {
  return assemble_phi(game, PrimalDualPoint::split(z, game.dimension()));
}

BranchRecord branch_record(const GameProblem& game, const PrimalDualPoint& z,
                           TieRule rule) {
  require_point(game, z);
  const Vector g = stacked_constraints(game, z.a);
  BranchRecord rec;
  const int m = static_cast<int>(g.size());
  rec.side.resize(m);
  rec.tied.resize(m);
  for (int r = 0; r < m; ++r) {
    const double lhs = -g(r);
    const double lam = z.lambda(r);
    if (std::abs(lhs - lam) <= kTieThreshold) {
      rec.tied[r] = true;
      rec.side[r] = rule == TieRule::PreferG ? Branch::Constraint : Branch::Multiplier;
    } else {
      rec.side[r] = lhs < lam ? Branch::Constraint : Branch::Multiplier;
    }
  }
  return rec;
}

Matrix jacobian_for_branches(const GameProblem& game, const PrimalDualPoint& z,
                             const std::vector<Branch>& branches) {
  require_point(game, z);
  const int n = game.dimension();
  const int m = game.num_multipliers();
  if (static_cast<int>(branches.size()) != m)
    throw InputError("one branch per complementarity row is required");
  Matrix J = Matrix::Zero(n + m, n + m);
  for (int i = 0; i < game.num_agents(); ++i) {
    const auto& cost = game.cost(i);
    if (!cost.hessian_row)
      throw CapabilityError("agent " + std::to_string(i) + " has no Hessian oracle");
    const int off = game.offset(i);
    const int ni = game.dim(i);
    J.block(off, 0, ni, n) = cost.hessian_row(z.a);
    const int mi = game.multiplier_count(i);
    if (mi == 0) continue;
    const auto& g = game.constraint(i);
    const Vector lam = agent_lambda(game, z, i);
    if (!g.linear) {
      if (!g.weighted_hessian)
        throw CapabilityError("agent " + std::to_string(i) +
                              " has nonlinear constraints without a Hessian oracle");
      J.block(off, 0, ni, n) += g.weighted_hessian(z.a, lam).middleRows(off, ni);
    }
    const Matrix Ji = constraint_jacobian(game, z.a, i);
    const int moff = game.multiplier_offset(i);
    J.block(off, n + moff, ni, mi) = Ji.middleCols(off, ni).transpose();
    for (int c = 0; c < mi; ++c) {
      const int row = n + moff + c;
      if (branches[moff + c] == Branch::Constraint) {
        J.block(row, 0, 1, n) = -Ji.row(c);
      } else {
        J(row, row) = 1.0;
      }
    }
  }
  return J;
}

JacobianElement limiting_jacobian(const GameProblem& game, const PrimalDualPoint& z,
                                  TieRule rule) {
  JacobianElement el;
  el.branches = branch_record(game, z, rule);
  el.matrix = jacobian_for_branches(game, z, el.branches.side);
  return el;
}

Vector initial_multipliers(const GameProblem& game, const Vector& a) {
  game.require_dimension(a);
  Vector lambda = Vector::Zero(game.num_multipliers());
  if (!game.has_constraints()) return lambda;
  const Vector F = pseudogradient(game, a);
  for (int i = 0; i < game.num_agents(); ++i) {
    const int mi = game.multiplier_count(i);
    if (mi == 0) continue;
    const Matrix Gi =
        constraint_jacobian(game, a, i).middleCols(game.offset(i), game.dim(i)).transpose();
    const Vector rhs = -F.segment(game.offset(i), game.dim(i));
    const Vector li = Gi.completeOrthogonalDecomposition().solve(rhs);
    lambda.segment(game.multiplier_offset(i), mi) = li.cwiseMax(0.0);
  }
  return lambda;
}

}  // namespace nashnewton
