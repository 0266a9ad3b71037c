#include "nashnewton/rates.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

namespace nashnewton {
namespace {

std::vector<double> sequence(double e0, int n, double (*next)(double)) {
  std::vector<double> e{e0};
  for (int k = 1; k < n; ++k) e.push_back(next(e.back()));
  return e;
}

TEST(Rates, QuadraticSequenceIsClassifiedQuadratic) {
  const auto e = sequence(0.1, 5, [](double x) { return 2.0 * x * x; });
  const auto r = estimate_q_rate(e);
  EXPECT_EQ(r.classification, RateEstimate::Class::Quadratic);
  EXPECT_NEAR(r.tail_max, 2.0, 1e-9);
}

TEST(Rates, LinearSequenceIsClassifiedLinear) {
  const auto e = sequence(0.1, 20, [](double x) { return 0.5 * x; });
  EXPECT_EQ(estimate_q_rate(e).classification, RateEstimate::Class::Linear);
}

TEST(Rates, SuperlinearSequenceIsNeitherLinearNorQuadratic) {
  const auto e = sequence(0.5, 9, [](double x) { return std::pow(x, 1.5); });
  EXPECT_EQ(estimate_q_rate(e).classification, RateEstimate::Class::Superlinear);
}

TEST(Rates, FloorValuesAreExcluded) {
  std::vector<double> e{1e-1, 1e-2, 1e-4, 1e-8, 1e-16, 0.0};
  const auto r = estimate_q_rate(e);
  EXPECT_EQ(r.quadratic_ratios.size(), 3u);
  std::vector<double> short_run{1e-1, 1e-2, 1e-14};
  try {
    estimate_q_rate(short_run);
    FAIL();
  } catch (const EstimationError& err) {
    EXPECT_EQ(err.kind(), EstimationError::Kind::TooFewPoints);
  }
}

TEST(Rates, IssFitRecoversExactConstants) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<IssSample> s;
  for (int k = 0; k < 60; ++k) {
    const double e = u(rng), v = 1e-3 * u(rng);
    s.push_back({e, 0.3 * e + 2.0 * v, v});
  }
  const auto f = estimate_iss_constants(s, IssModel::Linear);
  EXPECT_NEAR(f.L_a, 0.3, 1e-10);
  EXPECT_NEAR(f.L_v, 2.0, 1e-7);
  EXPECT_EQ(f.violations, 0);
  EXPECT_EQ(f.samples, 60);
  EXPECT_LE(f.required_slack, 1.0 + 1e-9);
}

TEST(Rates, QuadraticModelFitsSquaredErrors) {
  std::vector<IssSample> s;
  for (int k = 1; k <= 40; ++k) {
    const double e = 0.01 * k, v = 1e-4 * (k % 7 + 1);
    s.push_back({e, 5.0 * e * e + 1.5 * v, v});
  }
  const auto f = estimate_iss_constants(s, IssModel::Quadratic);
  EXPECT_NEAR(f.L_a, 5.0, 1e-8);
  EXPECT_NEAR(f.L_v, 1.5, 1e-6);
}

TEST(Rates, ViolationsAreCountedAgainstTheSlackedBound) {
  std::vector<IssSample> s;
  for (int k = 1; k <= 40; ++k) s.push_back({0.1, 0.05, 1e-3});
  s.push_back({0.1, 0.5, 1e-3});
  const auto f = estimate_iss_constants(s, IssModel::Linear, 1.1);
  EXPECT_GE(f.violations, 1);
  EXPECT_GT(f.required_slack, 1.1);
  EXPECT_NEAR(f.violation_fraction, static_cast<double>(f.violations) / f.samples, 1e-15);
}

TEST(Rates, ZeroDisturbanceIsADegenerateFit) {
  std::vector<IssSample> s(40, IssSample{0.1, 0.05, 0.0});
  try {
    estimate_iss_constants(s);
    FAIL();
  } catch (const EstimationError& e) {
    EXPECT_EQ(e.kind(), EstimationError::Kind::DegenerateFit);
  }
}

TEST(Rates, FitNeedsThirtySamples) {
  std::vector<IssSample> s(29, IssSample{0.1, 0.05, 1e-3});
  try {
    estimate_iss_constants(s);
    FAIL();
  } catch (const EstimationError& e) {
    EXPECT_EQ(e.kind(), EstimationError::Kind::TooFewPoints);
  }
}

TEST(Rates, SlackNeededHandlesEdgeCases) {
  EXPECT_EQ(slack_needed(0.0, 0.0), 0.0);
  EXPECT_EQ(slack_needed(1.0, 0.0), std::numeric_limits<double>::infinity());
  EXPECT_DOUBLE_EQ(slack_needed(2.0, 4.0), 0.5);
}

TEST(Rates, IssSamplesPairConsecutiveErrors) {
  IterateTrace t;
  for (int k = 0; k < 4; ++k) {
    t.iterates.push_back(Vector::Constant(1, 1.0 / (k + 1)));
    t.residuals.push_back(0.0);
    t.step_norms.push_back(0.0);
    t.wall_seconds.push_back(0.0);
    if (k < 3) t.perturbations.push_back(Vector::Constant(1, 0.1 * k));
  }
  t.set_reference(Vector::Zero(1));
  const auto s = iss_samples(t, 1);
  ASSERT_EQ(s.size(), 2u);
  EXPECT_DOUBLE_EQ(s[0].e, 0.5);
  EXPECT_DOUBLE_EQ(s[0].e_next, 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(s[0].v, 0.1);
}

}  // namespace
}  // namespace nashnewton
