#include "nashnewton/feasible_set.hpp"

#include "test_util.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>

namespace nashnewton {
namespace {

const double kInf = std::numeric_limits<double>::infinity();

TEST(FeasibleSet, BoxProjectionClampsEachCoordinate) {
  Box b{Vector::Constant(3, -1.0), Vector::Constant(3, 1.0)};
  b.lower(2) = -kInf;
  FeasibleRegion r({3}, {b});
  Vector y(3);
  y << 2.0, -0.5, -7.0;
  const Vector p = r.project(y);
  EXPECT_DOUBLE_EQ(p(0), 1.0);
  EXPECT_DOUBLE_EQ(p(1), -0.5);
  EXPECT_DOUBLE_EQ(p(2), -7.0);
  EXPECT_TRUE(r.is_box());
  EXPECT_TRUE(r.contains(p, 0.0));
}

TEST(FeasibleSet, PolyhedronProjectionSatisfiesVariationalCharacterization) {
  // p = proj(y) iff (y - p)'(x - p) <= 0 for every feasible x.
  std::mt19937_64 rng(11);
  Polyhedron simplex{Matrix(3, 2), Vector(3)};
  simplex.A << -1, 0, 0, -1, 1, 1;
  simplex.b << 0, 0, 1;
  FeasibleRegion r({2}, {simplex});
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    const Vector y = testing::random_vector(2, 3.0, rng);
    const Vector p = r.project(y);
    ASSERT_LE(r.violation(p), 1e-10);
    for (int s = 0; s < 200; ++s) {
      Vector x(2);
      x << u(rng), u(rng);
      if (x.sum() > 1.0) x = Vector::Ones(2) - x;
      EXPECT_LE((y - p).dot(x - p), 1e-9);
    }
  }
}

TEST(FeasibleSet, ProjectionOntoThinWedgeMatchesCandidateEnumeration) {
  // Two nearly opposite rows. In the plane the projection is y itself, the
  // projection onto one bounding line, or the apex; the nearest feasible
  // candidate is exact.
  std::mt19937_64 rng(12);
  for (double eps : {1e-2, 1e-4, 1e-6}) {
    LinearRows rows{Matrix(2, 2), Vector::Zero(2)};
    rows.C << 1.0, eps, -1.0, eps;
    for (int trial = 0; trial < 20; ++trial) {
      const Vector y = testing::random_vector(2, 5.0, rng);
      std::vector<Vector> candidates{y, Vector::Zero(2)};
      for (int r = 0; r < 2; ++r) {
        const Vector c = rows.C.row(r).transpose();
        candidates.push_back(y - std::max(0.0, c.dot(y)) / c.squaredNorm() * c);
      }
      Vector best;
      double best_dist = kInf;
      for (const Vector& x : candidates) {
        if ((rows.C * x - rows.d).maxCoeff() > 1e-12) continue;
        if ((x - y).norm() < best_dist) {
          best_dist = (x - y).norm();
          best = x;
        }
      }
      const Vector p = project_onto_rows(rows, y);
      EXPECT_LE((p - best).norm(), 1e-9 * (1.0 + y.norm())) << "eps " << eps;
    }
  }
}

TEST(FeasibleSet, ProjectionOntoEmptyRowsThrows) {
  LinearRows rows{Matrix(2, 1), Vector(2)};
  rows.C << 1.0, -1.0;
  rows.d << -1.0, -1.0;
  EXPECT_THROW(project_onto_rows(rows, Vector::Zero(1)), InputError);
}

TEST(FeasibleSet, ProjectionIsIdempotent) {
  std::mt19937_64 rng(3);
  Polyhedron half{Matrix::Ones(1, 3), Vector::Constant(1, 0.5)};
  FeasibleRegion r({1, 2}, {Box::uniform(1, -1.0, 1.0), Box::unbounded(2)}, half);
  for (int trial = 0; trial < 20; ++trial) {
    const Vector p = r.project(testing::random_vector(3, 4.0, rng));
    EXPECT_LE((r.project(p) - p).norm(), 1e-9);
    EXPECT_TRUE(r.contains(p, 1e-9));
  }
}

TEST(FeasibleSet, RowsListOnlyFiniteBounds) {
  Box b = Box::uniform(2, 0.0, 1.0);
  b.upper(1) = kInf;
  FeasibleRegion r({2}, {b});
  EXPECT_EQ(r.rows().count(), 3);
}

TEST(FeasibleSet, ViolationMeasuresLargestExcess) {
  FeasibleRegion r({2}, {Box::uniform(2, 0.0, 1.0)});
  Vector x(2);
  x << 1.5, -0.25;
  EXPECT_DOUBLE_EQ(r.violation(x), 0.5);
  EXPECT_FALSE(r.contains(x, 0.1));
}

TEST(FeasibleSet, BlockRegionRejectsJointConstraints) {
  Polyhedron joint{Matrix::Ones(1, 2), Vector::Ones(1)};
  FeasibleRegion r({1, 1}, {Box::unbounded(1), Box::unbounded(1)}, joint);
  EXPECT_THROW(r.block_region(0), InputError);
  FeasibleRegion plain({1, 1}, {Box::uniform(1, 0, 1), Box::uniform(1, -1, 0)});
  EXPECT_DOUBLE_EQ(plain.block_region(1).upper()(0), 0.0);
}

TEST(FeasibleSet, MalformedSetsAreRejected) {
  EXPECT_THROW(FeasibleRegion({2}, {Box::uniform(3, 0, 1)}), InputError);
  Box crossed = Box::uniform(1, 1.0, 0.0);
  EXPECT_THROW(validate_set(crossed), InputError);
  Polyhedron nan_rows{Matrix::Constant(1, 1, std::nan("")), Vector::Ones(1)};
  EXPECT_THROW(validate_set(nan_rows), InputError);
}

}  // namespace
}  // namespace nashnewton
