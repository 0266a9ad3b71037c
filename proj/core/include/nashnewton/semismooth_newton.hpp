#pragma once

#include "nashnewton/josephy_newton.hpp"
#include "nashnewton/kkt.hpp"

#include <cstdint>
#include <optional>

namespace nashnewton {

/// z^{k+1} = z^k - J^{-1} Phi(z^k) with J a limiting-Jacobian element.
/// Iterates are stacked z = (a, lambda); residuals are |Phi(z^k)|.
IterateTrace semismooth_newton(const GameProblem& game, const Vector& z0,
                               const NewtonConfig& cfg,
                               TieRule rule = TieRule::PreferG,
                               const std::optional<Vector>& ref = std::nullopt);

/// Solves J (z - z^k) = -Phi(z^k) + r^k with r^k drawn from `pert`, which
/// must use mode ResidualInjection (or None).
IterateTrace perturbed_semismooth_newton(const GameProblem& game, const Vector& z0,
                                         const NewtonConfig& cfg,
                                         const PerturbationSpec& pert,
                                         TieRule rule = TieRule::PreferG,
                                         const std::optional<Vector>& ref = std::nullopt);

/// Jacobi round in which agent i updates z_i = (a_i, lambda_i) using Phi_i
/// at the full z^k and the block of the Jacobian with respect to z_i only.
IterateTrace distributed_semismooth_newton(const GameProblem& game, const Vector& z0,
                                           const NewtonConfig& cfg,
                                           TieRule rule = TieRule::PreferG,
                                           const std::optional<Vector>& ref = std::nullopt);

/// Smallest singular value below which a Jacobian element counts as singular.
inline constexpr double kSingularThreshold = 1e-10;

struct QuasiRegularityVerdict {
  enum class Outcome { AllNonsingular, FoundSingular };
  Outcome outcome = Outcome::AllNonsingular;
  double min_singular_value = 0.0;
  /// Branch choice of the first singular element found.
  std::optional<std::vector<Branch>> witness;
  long elements_checked = 0;
  int ties = 0;
  /// True when the tie count exceeded the cap and only a sample of branch
  /// combinations was examined.
  bool partial = false;

  bool regular() const { return outcome == Outcome::AllNonsingular; }
};

/// Examines every limiting-Jacobian element at z_star (all 2^t branch
/// combinations over the t tied rows). With more than `max_ties` ties a
/// seeded sample of 2^max_ties combinations is checked and the verdict is
/// flagged partial.
QuasiRegularityVerdict check_quasi_regularity(const GameProblem& game,
                                              const Vector& z_star,
                                              int max_ties = 20,
                                              std::uint64_t seed = 0);

}  // namespace nashnewton
