#pragma once

#include "nashnewton/game.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace nashnewton {

/// Default absolute tolerance for deciding that a constraint binds.
inline constexpr double kActiveTolerance = 1e-8;

enum class SignKind { Free, NonNegative, NonPositive, Zero };

/// One agent's critical cone { d : inequality * d <= 0, normal' d = 0 }.
///
/// When the agent's set is a box and the gradient hyperplane reduces to
/// fixing coordinates, `coordinate_signs` records the cone as a product of
/// per-coordinate cones and enables exact orthant enumeration.
struct AgentCone {
  int dim = 0;
  Matrix inequality;
  Vector normal;
  std::optional<std::vector<SignKind>> coordinate_signs;

  bool contains(const Vector& d, double tol = 1e-10) const;
  static AgentCone from_signs(std::vector<SignKind> signs);
  static AgentCone full_space(int dim);
};

/// Cartesian product of per-agent cones.
struct CriticalCone {
  std::vector<AgentCone> agents;

  int dimension() const;
  bool contains(const Vector& d, double tol = 1e-10) const;
};

/// Critical cone of the game at a_star: per agent, the tangent cone of the
/// agent's set intersected with the orthogonal complement of its own
/// gradient. Requires an NE-form game without joint constraints.
CriticalCone critical_cone(const GameProblem& game, const Vector& a_star,
                           double tol_act = kActiveTolerance);

struct SemicopositivityVerdict {
  enum class Outcome { CertifiedViolated, NoViolationFound };
  Outcome outcome = Outcome::NoViolationFound;
  /// Unit-norm cone element with max_i c_i'(Hc)_i <= 0, when violated.
  std::optional<Vector> witness;
  /// Smallest max_i c_i'(Hc)_i seen over all normalized candidates.
  double smallest_value = 0.0;
  long samples_checked = 0;
  long orthant_representatives = 0;

  bool violated() const { return outcome == Outcome::CertifiedViolated; }
};

/// Searches for c in the cone, c != 0, with max_i c_i'(Hc)_i <= 0.
///
/// Sign-constrained coordinates are sampled in their open half-lines, so the
/// check targets the relative interior of each orthant face. For product
/// coordinate cones of total dimension <= 6 every orthant representative is
/// evaluated before sampling. A NoViolationFound verdict is a sampling
/// certificate, not a proof.
SemicopositivityVerdict check_strict_semicopositivity(const Matrix& H,
                                                      const CriticalCone& cone,
                                                      long n_samples,
                                                      std::uint64_t seed);

struct MonotonicityVerdict {
  enum class Class { PositiveDefinite, PositiveSemidefinite, Indefinite };
  Class classification = Class::Indefinite;
  double min_eigenvalue = 0.0;
};

/// Classifies the symmetric part (H + H')/2.
MonotonicityVerdict check_monotonicity(const Matrix& H);

}  // namespace nashnewton
