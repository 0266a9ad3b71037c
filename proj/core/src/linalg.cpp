#include "nashnewton/linalg.hpp"

#include <Eigen/LU>
#include <Eigen/QR>
#include <Eigen/SVD>

namespace nashnewton {

LinearSolveStatus solve_newton_system(const Matrix& J, const Vector& rhs,
                                      Vector& x) {
  if (J.rows() == 0) {
    x.resize(0);
    return LinearSolveStatus::Direct;
  }
  // rcond() of PartialPivLU is unreliable for exactly singular matrices, so
  // singularity is read off the pivots and the solution is checked.
  Eigen::PartialPivLU<Matrix> lu(J);
  const Vector pivots = lu.matrixLU().diagonal().cwiseAbs();
  if (pivots.minCoeff() > kSingularPivot * pivots.maxCoeff()) {
    x = lu.solve(rhs);
    if (x.allFinite() &&
        (J * x - rhs).norm() <= 1e-8 * (rhs.norm() + J.norm() * x.norm()))
      return LinearSolveStatus::Direct;
  }
  x = J.completeOrthogonalDecomposition().solve(rhs);
  if (x.allFinite()) return LinearSolveStatus::Regularized;
  return LinearSolveStatus::Failed;
}

double smallest_singular_value(const Matrix& A) {
  if (A.size() == 0) return 0.0;
  Eigen::JacobiSVD<Matrix> svd(A);
  return svd.singularValues().minCoeff();
}

}  // namespace nashnewton
