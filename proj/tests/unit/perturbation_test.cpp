#include "nashnewton/perturbation.hpp"

#include <gtest/gtest.h>

namespace nashnewton {
namespace {

PerturbationSpec ball(double magnitude, std::uint64_t seed) {
  PerturbationSpec p;
  p.mode = PerturbationSpec::Mode::AdditiveGradient;
  p.magnitude = magnitude;
  p.seed = seed;
  return p;
}

TEST(Perturbation, BallSamplesStayInsideTheRadius) {
  PerturbationSource src(ball(0.3, 1), 5);
  double largest = 0.0;
  for (int k = 0; k < 2000; ++k) {
    const double r = src.draw().norm();
    EXPECT_LE(r, 0.3 + 1e-15);
    largest = std::max(largest, r);
  }
  // Uniform in a 5-ball: radius^5 is uniform, so the largest of 2000 draws
  // is close to the boundary.
  EXPECT_GT(largest, 0.29);
}

TEST(Perturbation, StreamIsAFunctionOfTheSeed) {
  PerturbationSource a(ball(1.0, 7), 3), b(ball(1.0, 7), 3), c(ball(1.0, 8), 3);
  for (int k = 0; k < 10; ++k) {
    const Vector va = a.draw();
    EXPECT_TRUE(va == b.draw());
    EXPECT_FALSE(va == c.draw());
  }
}

TEST(Perturbation, FixedVectorIsUsedVerbatim) {
  PerturbationSpec p;
  p.mode = PerturbationSpec::Mode::ResidualInjection;
  p.distribution = PerturbationSpec::Distribution::FixedVector;
  p.fixed = Vector(2);
  p.fixed << 3.0, 4.0;
  EXPECT_DOUBLE_EQ(p.effective_magnitude(), 5.0);
  PerturbationSource src(p, 2);
  EXPECT_TRUE(src.draw() == p.fixed);
  EXPECT_TRUE(src.draw() == p.fixed);
}

TEST(Perturbation, InactiveSpecDrawsZeros) {
  PerturbationSpec none;
  EXPECT_TRUE(none.inactive());
  EXPECT_TRUE(ball(0.0, 1).inactive());
  PerturbationSource src(none, 4);
  EXPECT_EQ(src.draw().norm(), 0.0);
}

TEST(Perturbation, InvalidSpecsAreRejected) {
  EXPECT_THROW(ball(-1.0, 0).validate(), InputError);
  PerturbationSpec p;
  p.mode = PerturbationSpec::Mode::AdditiveGradient;
  p.distribution = PerturbationSpec::Distribution::FixedVector;
  p.fixed = Vector::Ones(2);
  EXPECT_NO_THROW(p.validate());
  EXPECT_THROW(PerturbationSource(p, 3), InputError);
}

}  // namespace
}  // namespace nashnewton
