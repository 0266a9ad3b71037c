#include "nashnewton/vgne.hpp"

#include <Eigen/QR>

#include <random>
#include <sstream>

namespace nashnewton {

Vector VgneReduction::shared_multiplier(const Vector& a, double tol_act) const {
  ne_game.require_dimension(a);
  const int m = shared.count();
  Vector lambda = Vector::Zero(m);
  if (m == 0) return lambda;
  const Vector slack = shared.C * a - shared.d;
  std::vector<int> active;
  for (int r = 0; r < m; ++r)
    if (slack(r) >= -tol_act) active.push_back(r);
  if (active.empty()) return lambda;
  Matrix Ct(a.size(), active.size());
  for (std::size_t j = 0; j < active.size(); ++j)
    Ct.col(j) = shared.C.row(active[j]).transpose();
  const Vector la = Ct.completeOrthogonalDecomposition().solve(-pseudogradient(ne_game, a));
  for (std::size_t j = 0; j < active.size(); ++j)
    lambda(active[j]) = std::max(0.0, la(j));
  return lambda;
}

PrimalDualPoint VgneReduction::lift(const Vector& a, const Vector& lambda_bar) const {
  if (lambda_bar.size() != shared.count())
    throw InputError("shared multiplier has the wrong length");
  const int N = ne_game.num_agents();
  PrimalDualPoint z;
  z.a = a;
  z.lambda.resize(static_cast<Eigen::Index>(N) * shared.count());
  for (int i = 0; i < N; ++i) z.lambda.segment(i * shared.count(), shared.count()) = lambda_bar;
  return z;
}

VgneReduction vgne_reduce(const GameProblem& game, std::uint64_t seed) {
  const int N = game.num_agents();
  const int n = game.dimension();
  std::vector<AgentCost> costs;
  for (int i = 0; i < N; ++i) costs.push_back(game.cost(i));

  if (!game.has_constraints() || game.num_multipliers() == 0) {
    GameProblem plain(game.dims(), costs);
    if (game.has_region()) plain.with_region(game.region());
    return {plain, LinearRows{Matrix(0, n), Vector(0)}, 0.0};
  }

  const int m = game.multiplier_count(0);
  for (int i = 1; i < N; ++i)
    if (game.multiplier_count(i) != m)
      throw SolverError(SolverError::Kind::ConstraintsNotCommon,
                        "agents register different numbers of constraints");

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  double dev = 0.0;
  for (int s = 0; s < 10; ++s) {
    Vector a(n);
    for (int k = 0; k < n; ++k) a(k) = normal(rng);
    const Vector g0 = game.constraint(0).value(a);
    for (int i = 1; i < N; ++i)
      dev = std::max(dev, (game.constraint(i).value(a) - g0).cwiseAbs().maxCoeff());
  }
  if (dev > 1e-12) {
    std::ostringstream msg;
    msg << "agent constraints differ: max deviation " << dev;
    throw SolverError(SolverError::Kind::ConstraintsNotCommon, msg.str());
  }
  const auto& linear = game.constraint(0).linear;
  if (!linear)
    throw SolverError(SolverError::Kind::Unsupported,
                      "v-GNE reduction needs linear shared constraints");

  std::vector<FeasibleSet> blocks;
  for (int i = 0; i < N; ++i) blocks.emplace_back(Box::unbounded(game.dim(i)));
  GameProblem reduced(game.dims(), costs);
  reduced.with_region(FeasibleRegion(game.dims(), blocks, Polyhedron{linear->C, linear->d}));
  return {reduced, *linear, dev};
}

}  // namespace nashnewton
