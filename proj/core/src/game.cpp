#include "nashnewton/game.hpp"

#include <string>

namespace nashnewton {

ConstraintFunction ConstraintFunction::from_linear(LinearRows rows) {
  ConstraintFunction g;
  g.count = rows.count();
  const Matrix C = rows.C;
  const Vector d = rows.d;
  g.value = [C, d](const Vector& a) -> Vector { return C * a - d; };
  g.jacobian = [C](const Vector&) -> Matrix { return C; };
  g.weighted_hessian = [n = C.cols()](const Vector&, const Vector&) -> Matrix {
    return Matrix::Zero(n, n);
  };
  g.linear = std::move(rows);
  return g;
}

ConstraintFunction ConstraintFunction::none(int n) {
  return from_linear(LinearRows{Matrix(0, n), Vector(0)});
}

GameProblem::GameProblem(std::vector<int> dims, std::vector<AgentCost> costs)
    : dims_(std::move(dims)), costs_(std::move(costs)) {
  if (dims_.empty()) throw InputError("a game needs at least one agent");
  if (dims_.size() != costs_.size())
    throw InputError("one cost oracle per agent is required");
  offsets_.resize(dims_.size());
  for (std::size_t i = 0; i < dims_.size(); ++i) {
    if (dims_[i] <= 0) throw InputError("agent dimensions must be positive");
    offsets_[i] = total_;
    total_ += dims_[i];
  }
  unconstrained_ = FeasibleRegion::unconstrained(dims_);
}

GameProblem& GameProblem::with_region(FeasibleRegion region) {
  if (region.dims() != dims_)
    throw InputError("region block structure does not match agent dims");
  region_ = std::move(region);
  return *this;
}

GameProblem& GameProblem::with_constraints(
    std::vector<ConstraintFunction> constraints) {
  if (constraints.size() != dims_.size())
    throw InputError("one constraint function per agent is required");
  multiplier_offsets_.assign(constraints.size(), 0);
  total_multipliers_ = 0;
  for (std::size_t i = 0; i < constraints.size(); ++i) {
    if (constraints[i].count < 0)
      throw InputError("constraint count must be nonnegative");
    if (constraints[i].count > 0 && !constraints[i].value)
      throw InputError("constraint value oracle missing for agent " +
                       std::to_string(i));
    multiplier_offsets_[i] = total_multipliers_;
    total_multipliers_ += constraints[i].count;
  }
  constraints_ = std::move(constraints);
  return *this;
}

const FeasibleRegion& GameProblem::region() const {
  return region_ ? *region_ : unconstrained_;
}

int GameProblem::multiplier_count(int i) const {
  return constraints_.empty() ? 0 : constraints_[i].count;
}

int GameProblem::multiplier_offset(int i) const {
  return constraints_.empty() ? 0 : multiplier_offsets_[i];
}

void GameProblem::require_dimension(const Vector& a) const {
  if (a.size() != total_)
    throw InputError("decision vector has length " + std::to_string(a.size()) +
                     ", game dimension is " + std::to_string(total_));
}

Vector pseudogradient(const GameProblem& game, const Vector& a) {
  game.require_dimension(a);
  Vector F(game.dimension());
  for (int i = 0; i < game.num_agents(); ++i) {
    const auto& grad = game.cost(i).gradient;
    if (!grad)
      throw CapabilityError("agent " + std::to_string(i) +
                            " has no gradient oracle");
    Vector gi = grad(a);
    if (gi.size() != game.dim(i))
      throw InputError("gradient oracle of agent " + std::to_string(i) +
                       " returned wrong length");
    F.segment(game.offset(i), game.dim(i)) = gi;
  }
  return F;
}

GameHessian game_hessian(const GameProblem& game, const Vector& a) {
  game.require_dimension(a);
  const int N = game.num_agents();
  GameHessian H;
  H.assembled.resize(game.dimension(), game.dimension());
  H.blocks.assign(N, std::vector<Matrix>(N));
  for (int i = 0; i < N; ++i) {
    const auto& row_oracle = game.cost(i).hessian_row;
    if (!row_oracle)
      throw CapabilityError("agent " + std::to_string(i) +
                            " has no Hessian oracle");
    Matrix row = row_oracle(a);
    if (row.rows() != game.dim(i) || row.cols() != game.dimension())
      throw InputError("Hessian oracle of agent " + std::to_string(i) +
                       " returned wrong shape");
    H.assembled.middleRows(game.offset(i), game.dim(i)) = row;
    for (int j = 0; j < N; ++j)
      H.blocks[i][j] = row.middleCols(game.offset(j), game.dim(j));
  }
  return H;
}

Matrix own_hessian(const GameProblem& game, const Vector& a, int i) {
  const auto& row_oracle = game.cost(i).hessian_row;
  if (!row_oracle)
    throw CapabilityError("agent " + std::to_string(i) +
                          " has no Hessian oracle");
  return row_oracle(a).middleCols(game.offset(i), game.dim(i));
}

}  // namespace nashnewton
