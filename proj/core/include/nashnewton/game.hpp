#pragma once

#include "nashnewton/feasible_set.hpp"
#include "nashnewton/types.hpp"

#include <functional>
#include <optional>
#include <vector>

namespace nashnewton {

/// Cost oracle of one agent, J_i(a) over the stacked decision vector a.
///
/// `gradient` returns the agent's own gradient (length n_i). `hessian_row`
/// returns the n_i x n row of second derivatives [d2J_i/da_i da_1, ...,
/// d2J_i/da_i da_N]. Either may be left empty; operations that need a
/// missing oracle throw CapabilityError.
struct AgentCost {
  std::function<double(const Vector&)> value;
  std::function<Vector(const Vector&)> gradient;
  std::function<Matrix(const Vector&)> hessian_row;
};

/// Inequality constraints g_i(a) <= 0 of one agent (m_i rows).
struct ConstraintFunction {
  int count = 0;
  std::function<Vector(const Vector&)> value;
  /// m_i x n Jacobian with respect to the full stacked vector.
  std::function<Matrix(const Vector&)> jacobian;
  /// n x n matrix sum_c w_c * Hessian(g_c) for weights w (length m_i).
  std::function<Matrix(const Vector&, const Vector&)> weighted_hessian;
  /// Present when g(a) = C a - d exactly.
  std::optional<LinearRows> linear;

  static ConstraintFunction from_linear(LinearRows rows);
  static ConstraintFunction none(int n);
};

/// An N-agent game. NE form carries a FeasibleRegion (fixed per-agent sets,
/// optionally with joint linear constraints); GNE form carries one
/// ConstraintFunction per agent.
class GameProblem {
 public:
  GameProblem(std::vector<int> dims, std::vector<AgentCost> costs);

  GameProblem& with_region(FeasibleRegion region);
  GameProblem& with_constraints(std::vector<ConstraintFunction> constraints);

  int num_agents() const { return static_cast<int>(dims_.size()); }
  int dimension() const { return total_; }
  int dim(int i) const { return dims_[i]; }
  int offset(int i) const { return offsets_[i]; }
  const std::vector<int>& dims() const { return dims_; }
  const AgentCost& cost(int i) const { return costs_[i]; }

  bool has_region() const { return region_.has_value(); }
  /// The NE feasible region; the whole space when none was set.
  const FeasibleRegion& region() const;

  bool has_constraints() const { return !constraints_.empty(); }
  const ConstraintFunction& constraint(int i) const { return constraints_[i]; }
  int num_multipliers() const { return total_multipliers_; }
  int multiplier_count(int i) const;
  int multiplier_offset(int i) const;

  Vector block(const Vector& a, int i) const {
    return a.segment(offsets_[i], dims_[i]);
  }

  void require_dimension(const Vector& a) const;

 private:
  std::vector<int> dims_;
  std::vector<int> offsets_;
  std::vector<AgentCost> costs_;
  std::optional<FeasibleRegion> region_;
  FeasibleRegion unconstrained_;
  std::vector<ConstraintFunction> constraints_;
  std::vector<int> multiplier_offsets_;
  int total_ = 0;
  int total_multipliers_ = 0;
};

/// Block matrix H_ij = d2 J_i / da_i da_j. Generally non-symmetric.
struct GameHessian {
  std::vector<std::vector<Matrix>> blocks;
  Matrix assembled;
};

/// Stack of each agent's own gradient, in agent order.
Vector pseudogradient(const GameProblem& game, const Vector& a);

GameHessian game_hessian(const GameProblem& game, const Vector& a);

/// Diagonal block d2 J_i / da_i da_i only.
Matrix own_hessian(const GameProblem& game, const Vector& a, int i);

}  // namespace nashnewton
