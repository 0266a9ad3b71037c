// Timing of the solver kernels on fixed, seeded problems.

#include "nashnewton/affine_vi.hpp"
#include "nashnewton/builtin_games.hpp"
#include "nashnewton/feasible_set.hpp"
#include "nashnewton/josephy_newton.hpp"
#include "nashnewton/kkt.hpp"
#include "nashnewton/mpc.hpp"
#include "nashnewton/semismooth_newton.hpp"

#include <benchmark/benchmark.h>

#include <random>

namespace nn = nashnewton;

namespace {

nn::Matrix random_matrix(int rows, int cols, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  nn::Matrix m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = normal(rng);
  return m;
}

// Strongly monotone: identity plus a PSD part plus a skew part.
nn::Matrix random_monotone(int n, std::mt19937_64& rng) {
  const nn::Matrix b = random_matrix(n, n, rng);
  const nn::Matrix s = random_matrix(n, n, rng);
  return nn::Matrix::Identity(n, n) + b * b.transpose() / n + (s - s.transpose()) / 2;
}

void BM_ProjectOntoRows(benchmark::State& state) {
  const int m = static_cast<int>(state.range(0));
  const int n = 20;
  std::mt19937_64 rng(1);
  nn::LinearRows rows{random_matrix(m, n, rng), nn::Vector::Ones(m)};
  const nn::Vector y = 3.0 * random_matrix(n, 1, rng);
  for (auto _ : state) benchmark::DoNotOptimize(nn::project_onto_rows(rows, y));
}
BENCHMARK(BM_ProjectOntoRows)->Arg(5)->Arg(20)->Arg(80);

void BM_AffineViBox(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  std::mt19937_64 rng(2);
  nn::AffineViProblem p{random_monotone(n, rng), 2.0 * random_matrix(n, 1, rng),
                        nn::FeasibleRegion({n}, {nn::Box::uniform(n, -1.0, 1.0)})};
  const nn::Vector a0 = nn::Vector::Zero(n);
  for (auto _ : state) benchmark::DoNotOptimize(nn::solve_affine_vi(p, a0));
}
BENCHMARK(BM_AffineViBox)->Arg(4)->Arg(16)->Arg(64);

void BM_AffineViPolyhedron(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  std::mt19937_64 rng(3);
  nn::Polyhedron poly{random_matrix(2 * n, n, rng), nn::Vector::Ones(2 * n)};
  nn::AffineViProblem p{random_monotone(n, rng), 2.0 * random_matrix(n, 1, rng),
                        nn::FeasibleRegion({n}, {poly})};
  const nn::Vector a0 = nn::Vector::Zero(n);
  for (auto _ : state) benchmark::DoNotOptimize(nn::solve_affine_vi(p, a0));
}
BENCHMARK(BM_AffineViPolyhedron)->Arg(4)->Arg(16);

void BM_JosephyNewtonQuartic(benchmark::State& state) {
  const nn::GameProblem game = nn::builtin_quartic_game();
  const nn::Vector a0 = nn::Vector::Constant(game.dimension(), 0.5);
  for (auto _ : state) benchmark::DoNotOptimize(nn::josephy_newton(game, a0, {}));
}
BENCHMARK(BM_JosephyNewtonQuartic);

void BM_Mechanism1Quartic(benchmark::State& state) {
  const nn::GameProblem game = nn::builtin_quartic_game();
  const nn::Vector a0 = nn::Vector::Constant(game.dimension(), 0.5);
  for (auto _ : state)
    benchmark::DoNotOptimize(nn::distributed_jn_mechanism1(game, a0, {}));
}
BENCHMARK(BM_Mechanism1Quartic);

void BM_SemismoothNewtonShared(benchmark::State& state) {
  std::mt19937_64 rng(4);
  const nn::GameProblem game = nn::random_shared_constraint_game({2, 2}, 3, rng);
  const nn::Vector a0 = nn::Vector::Zero(game.dimension());
  const nn::PrimalDualPoint z0{a0, nn::initial_multipliers(game, a0)};
  for (auto _ : state)
    benchmark::DoNotOptimize(nn::semismooth_newton(game, z0.stacked(), {}));
}
BENCHMARK(BM_SemismoothNewtonShared);

void BM_ClosedLoopPursuit(benchmark::State& state) {
  const nn::MpcScenario s = nn::builtin_pursuit_scenario();
  const int K = static_cast<int>(state.range(0));
  for (auto _ : state)
    benchmark::DoNotOptimize(nn::run_closed_loop(s, nn::MpcSolver::DistributedJN, K, 0));
}
BENCHMARK(BM_ClosedLoopPursuit)->Arg(1)->Arg(5)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
