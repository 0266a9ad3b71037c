#pragma once

#include "nashnewton/types.hpp"

#include <cstdint>
#include <random>

namespace nashnewton {

struct PerturbationSpec {
  enum class Mode { None, AdditiveGradient, AdditiveHessian, ResidualInjection };
  enum class Distribution { UniformBall, FixedVector };

  Mode mode = Mode::None;
  /// Radius of the ball for UniformBall. For FixedVector the vector is used
  /// verbatim and its norm is the effective magnitude.
  double magnitude = 0.0;
  Distribution distribution = Distribution::UniformBall;
  Vector fixed;
  std::uint64_t seed = 0;

  /// True when the spec injects nothing (no mode, or zero size).
  bool inactive() const;
  double effective_magnitude() const;
  void validate() const;
};

const char* to_string(PerturbationSpec::Mode mode);

/// Seeded stream of disturbance vectors of a fixed length.
class PerturbationSource {
 public:
  PerturbationSource(const PerturbationSpec& spec, int length);

  /// Next disturbance; a zero vector when the spec is inactive.
  Vector draw();
  int length() const { return length_; }

 private:
  PerturbationSpec spec_;
  int length_;
  std::mt19937_64 rng_;
};

/// Uniform sample from the Euclidean ball of the given radius.
Vector sample_uniform_ball(int dim, double radius, std::mt19937_64& rng);

}  // namespace nashnewton
