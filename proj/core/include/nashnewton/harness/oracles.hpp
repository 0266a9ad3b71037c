#pragma once

#include "nashnewton/affine_vi.hpp"
#include "nashnewton/game.hpp"

#include <cstdint>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

namespace nashnewton::harness {

inline constexpr double kPseudogradientFdTol = 1e-5;
inline constexpr double kHessianFdTol = 1e-4;
inline constexpr double kPhiJacobianFdTol = 1e-4;

/// FNV-1a over the dimensions, M, q and the set data of the problem.
std::uint64_t problem_hash(const AffineViProblem& p);

struct GridVerdict {
  /// min over grid points a' of (a' - a)'(q + M a).
  double min_value = 0.0;
  long points_checked = 0;
  bool feasible = false;
  bool holds(double tol = 1e-9) const { return feasible && min_value >= -tol; }
};

struct DerivativeReport {
  int points = 0;
  int checks = 0;
  int passed = 0;
  double worst_pseudogradient = 0.0;
  double worst_hessian = 0.0;
  /// Worst Phi Jacobian error over points away from kinks (GNE games only).
  double worst_phi = 0.0;
  int phi_points_skipped = 0;
  std::vector<std::string> failures;

  bool all_passed() const { return checks > 0 && passed == checks; }
};

struct OracleInfo {
  std::string name;
  std::string description;
};

struct SelfTest {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// Brute-force reference computations shared by the tests and the report
/// cross-checks. Enumeration results are cached by problem hash; the cache
/// is guarded by a mutex.
class OracleRegistry {
 public:
  std::vector<OracleInfo> catalog() const;
  SelfTest self_test(const std::string& name) const;
  std::vector<SelfTest> self_test_all() const;

  /// Active-set enumeration (box sets, n <= 12). Repeat calls on the same
  /// problem return the cached solution.
  ViSolution active_set_solution(const AffineViProblem& p) const;

  /// Checks the VI inequality at `a` against a grid of feasible points:
  /// `per_axis` points per coordinate over the set's bounding box (a +- 1
  /// along unbounded directions), or 20000 seeded samples when the grid
  /// would be larger.
  GridVerdict grid_vi_check(const AffineViProblem& p, const Vector& a, int per_axis = 5,
                            std::uint64_t seed = 0) const;

  /// Pseudogradient, Hessian and (for GNE games) Phi Jacobian checks at
  /// `points` seeded random points drawn uniformly from [-radius, radius]^n
  /// (multipliers from [0, radius]).
  DerivativeReport derivative_check(const GameProblem& game, int points = 20,
                                    std::uint64_t seed = 0, double radius = 1.0) const;

  /// Known solution of a named analytic example: "analytic_gne" gives
  /// z* = (0.5, 0.5, 0.5, 0.5).
  std::optional<Vector> analytic_solution(const std::string& name) const;

  std::size_t cache_size() const;
  std::size_t cache_hits() const;

 private:
  struct Entry {
    std::vector<double> key;
    ViSolution solution;
  };
  mutable std::mutex mutex_;
  mutable std::map<std::uint64_t, std::vector<Entry>> cache_;
  mutable std::size_t hits_ = 0;
};

/// Process-wide registry.
const OracleRegistry& oracle_registry();

}  // namespace nashnewton::harness
