#pragma once

#include "nashnewton/feasible_set.hpp"
#include "nashnewton/types.hpp"

#include <stdexcept>
#include <vector>

namespace nashnewton {

/// Find a in `set` with (a' - a)'(q + M a) >= 0 for all a' in `set`.
struct AffineViProblem {
  Matrix M;
  Vector q;
  FeasibleRegion set;

  int dimension() const { return static_cast<int>(q.size()); }
  void validate() const;
};

struct ViOptions {
  double tol_inner = 1e-10;
  int max_iter = 100;
};

struct ViSolution {
  enum class Status { Converged, MaxIter, Singular };

  Vector a;
  /// Natural-map residual |a - proj(a - (q + M a))|.
  double residual = 0.0;
  Status status = Status::MaxIter;
  int iterations = 0;
  /// Multipliers of set.rows() (polyhedral path only; empty for boxes).
  Vector multipliers;
  /// Number of projection (extragradient) steps taken instead of Newton.
  int fallback_steps = 0;

  bool converged() const { return status == Status::Converged; }
};

/// |a - proj_set(a - Fa)| for an arbitrary operator value Fa at a.
double vi_natural_residual(const FeasibleRegion& set, const Vector& a,
                           const Vector& Fa);

double natural_map_residual(const AffineViProblem& p, const Vector& a);

/// Semismooth Newton on the natural map (boxes) or on the min-reformulated
/// KKT system (polyhedra), with backtracking on the residual norm and an
/// extragradient fallback. Deterministic for identical inputs.
ViSolution solve_affine_vi(const AffineViProblem& p, const Vector& a0,
                           const ViOptions& options = {});

class EnumerationError : public std::runtime_error {
 public:
  enum class Kind { NoSolution, MultipleSolutions, TooLarge, NotBox };

  EnumerationError(Kind kind, const std::string& what,
                   std::vector<Vector> solutions = {})
      : std::runtime_error(what), kind_(kind), solutions_(std::move(solutions)) {}

  Kind kind() const noexcept { return kind_; }
  const std::vector<Vector>& solutions() const noexcept { return solutions_; }

 private:
  Kind kind_;
  std::vector<Vector> solutions_;
};

/// Brute-force oracle for box-constrained affine VIs of dimension <= 12:
/// tries every {lower, free, upper} pattern and keeps the patterns whose
/// reduced solution satisfies the bound and sign conditions.
ViSolution enumerate_active_set_solution(const AffineViProblem& p);

}  // namespace nashnewton
