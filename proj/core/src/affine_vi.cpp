#include "nashnewton/affine_vi.hpp"

#include "nashnewton/linalg.hpp"

#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <deque>
#include <string>

namespace nashnewton {

namespace {

constexpr int kStallWindow = 10;
constexpr double kStallDecrease = 1e-16;
constexpr double kArmijo = 1e-4;
constexpr int kMaxHalvings = 30;

struct StallMonitor {
  std::deque<double> history;

  bool stalled(double residual) {
    history.push_back(residual);
    if (static_cast<int>(history.size()) <= kStallWindow) return false;
    const double old = history.front();
    history.pop_front();
    return old - residual < kStallDecrease;
  }
};

double extragradient_step_size(const Matrix& M) {
  return 1.0 / (1.0 + M.norm());
}

// ---- box path -------------------------------------------------------------

struct BoxMap {
  const Matrix& M;
  const Vector& q;
  Vector lower;
  Vector upper;

  Vector residual_vector(const Vector& a, Vector* w_out = nullptr) const {
    const Vector w = a - (M * a + q);
    if (w_out) *w_out = w;
    return a - w.cwiseMax(lower).cwiseMin(upper);
  }

  // Limiting-Jacobian element of the natural map; rows where w sits on or
  // beyond a bound take the projection-side derivative.
  Matrix jacobian(const Vector& w) const {
    const int n = static_cast<int>(w.size());
    Matrix J(n, n);
    for (int k = 0; k < n; ++k) {
      if (w(k) > lower(k) && w(k) < upper(k)) {
        J.row(k) = M.row(k);
      } else {
        J.row(k).setZero();
        J(k, k) = 1.0;
      }
    }
    return J;
  }

  Vector project(const Vector& y) const {
    return y.cwiseMax(lower).cwiseMin(upper);
  }
};

ViSolution solve_box(const AffineViProblem& p, const Vector& a0,
                     const ViOptions& opt) {
  BoxMap map{p.M, p.q, p.set.lower(), p.set.upper()};
  const double gamma = extragradient_step_size(p.M);
  ViSolution sol;
  sol.a = a0;
  StallMonitor stall;

  for (int it = 0;; ++it) {
    Vector w;
    const Vector phi = map.residual_vector(sol.a, &w);
    const double res = phi.norm();
    sol.residual = res;
    sol.iterations = it;
    if (res <= opt.tol_inner) {
      sol.status = ViSolution::Status::Converged;
      return sol;
    }
    if (it >= opt.max_iter) {
      sol.status = ViSolution::Status::MaxIter;
      return sol;
    }
    if (stall.stalled(res)) {
      sol.status = ViSolution::Status::Singular;
      return sol;
    }

    Vector d;
    bool accepted = false;
    if (solve_newton_system(map.jacobian(w), -phi, d) !=
        LinearSolveStatus::Failed) {
      double t = 1.0;
      for (int h = 0; h <= kMaxHalvings; ++h, t *= 0.5) {
        const Vector trial = sol.a + t * d;
        if (map.residual_vector(trial).norm() <= (1.0 - kArmijo * t) * res) {
          sol.a = trial;
          accepted = true;
          break;
        }
      }
    }
    if (!accepted) {
      const Vector mid = map.project(sol.a - gamma * (p.M * sol.a + p.q));
      sol.a = map.project(sol.a - gamma * (p.M * mid + p.q));
      ++sol.fallback_steps;
    }
  }
}

// ---- polyhedral path ------------------------------------------------------

struct KktMap {
  const Matrix& M;
  const Vector& q;
  const LinearRows& rows;

  int n() const { return static_cast<int>(q.size()); }
  int m() const { return rows.count(); }

  Vector value(const Vector& z) const {
    const auto a = z.head(n());
    const auto mu = z.tail(m());
    Vector out(n() + m());
    out.head(n()) = M * a + q + rows.C.transpose() * mu;
    out.tail(m()) = (rows.d - rows.C * a).cwiseMin(mu);
    return out;
  }

  Matrix jacobian(const Vector& z) const {
    const auto a = z.head(n());
    const auto mu = z.tail(m());
    Matrix J = Matrix::Zero(n() + m(), n() + m());
    J.topLeftCorner(n(), n()) = M;
    J.topRightCorner(n(), m()) = rows.C.transpose();
    const Vector slack = rows.d - rows.C * a;
    for (int r = 0; r < m(); ++r) {
      if (slack(r) <= mu(r)) {
        J.block(n() + r, 0, 1, n()) = -rows.C.row(r);
      } else {
        J(n() + r, n() + r) = 1.0;
      }
    }
    return J;
  }
};

ViSolution solve_polyhedral(const AffineViProblem& p, const Vector& a0,
                            const ViOptions& opt) {
  const LinearRows rows = p.set.rows();
  const int n = p.dimension();
  const int m = rows.count();
  KktMap map{p.M, p.q, rows};
  const double gamma = extragradient_step_size(p.M);

  Vector z = Vector::Zero(n + m);
  z.head(n) = a0;
  ViSolution sol;
  StallMonitor stall;

  auto finish = [&](ViSolution::Status status, int it) {
    sol.a = z.head(n);
    sol.multipliers = z.tail(m).cwiseMax(0.0);
    sol.residual = natural_map_residual(p, sol.a);
    sol.iterations = it;
    sol.status = status;
    if (status == ViSolution::Status::Converged && sol.residual > opt.tol_inner)
      sol.status = ViSolution::Status::MaxIter;
    return sol;
  };

  for (int it = 0;; ++it) {
    const Vector phi = map.value(z);
    const double res = phi.norm();
    if (res <= 0.1 * opt.tol_inner) {
      return finish(ViSolution::Status::Converged, it);
    }
    if (it >= opt.max_iter) {
      const Vector a = z.head(n);
      if (natural_map_residual(p, a) <= opt.tol_inner)
        return finish(ViSolution::Status::Converged, it);
      return finish(ViSolution::Status::MaxIter, it);
    }
    if (stall.stalled(res)) {
      const Vector a = z.head(n);
      if (natural_map_residual(p, a) <= opt.tol_inner)
        return finish(ViSolution::Status::Converged, it);
      return finish(ViSolution::Status::Singular, it);
    }

    Vector d;
    bool accepted = false;
    if (solve_newton_system(map.jacobian(z), -phi, d) !=
        LinearSolveStatus::Failed) {
      double t = 1.0;
      for (int h = 0; h <= kMaxHalvings; ++h, t *= 0.5) {
        const Vector trial = z + t * d;
        if (map.value(trial).norm() <= (1.0 - kArmijo * t) * res) {
          z = trial;
          accepted = true;
          break;
        }
      }
    }
    if (!accepted) {
      Vector a = z.head(n);
      const Vector mid = p.set.project(a - gamma * (p.M * a + p.q));
      a = p.set.project(a - gamma * (p.M * mid + p.q));
      z.head(n) = a;
      // Multipliers re-estimated on the rows that bind at the new point.
      z.tail(m).setZero();
      ++sol.fallback_steps;
    }
  }
}

}  // namespace

void AffineViProblem::validate() const {
  const int n = dimension();
  if (M.rows() != n || M.cols() != n)
    throw InputError("affine VI matrix must be n x n with n = |q|");
  if (set.dimension() != n)
    throw InputError("affine VI set dimension does not match q");
  if (!M.allFinite() || !q.allFinite())
    throw InputError("affine VI data must be finite");
}

double vi_natural_residual(const FeasibleRegion& set, const Vector& a,
                           const Vector& Fa) {
  return (a - set.project(a - Fa)).norm();
}

double natural_map_residual(const AffineViProblem& p, const Vector& a) {
  return vi_natural_residual(p.set, a, p.M * a + p.q);
}

ViSolution solve_affine_vi(const AffineViProblem& p, const Vector& a0,
                           const ViOptions& options) {
  p.validate();
  if (a0.size() != p.dimension())
    throw InputError("affine VI start point has wrong length");
  if (!a0.allFinite()) throw InputError("affine VI start point is not finite");
  if (p.set.is_box()) return solve_box(p, a0, options);
  return solve_polyhedral(p, a0, options);
}

ViSolution enumerate_active_set_solution(const AffineViProblem& p) {
  p.validate();
  if (!p.set.is_box())
    throw EnumerationError(EnumerationError::Kind::NotBox,
                           "active-set enumeration needs a box set");
  const int n = p.dimension();
  if (n > 12)
    throw EnumerationError(EnumerationError::Kind::TooLarge,
                           "active-set enumeration is limited to n <= 12");
  const Vector lo = p.set.lower();
  const Vector hi = p.set.upper();
  const double scale =
      1.0 + std::max(p.M.cwiseAbs().maxCoeff(), p.q.cwiseAbs().maxCoeff());
  const double tol = 1e-10 * scale;

  // 0 = at lower, 1 = free, 2 = at upper
  std::vector<int> pattern(n, 0);
  std::vector<Vector> found;
  long total = 1;
  for (int k = 0; k < n; ++k) total *= 3;

  for (long code = 0; code < total; ++code) {
    long c = code;
    bool usable = true;
    for (int k = 0; k < n; ++k) {
      pattern[k] = static_cast<int>(c % 3);
      c /= 3;
      if (pattern[k] == 0 && !std::isfinite(lo(k))) usable = false;
      if (pattern[k] == 2 && !std::isfinite(hi(k))) usable = false;
    }
    if (!usable) continue;

    std::vector<int> free_idx;
    Vector a = Vector::Zero(n);
    for (int k = 0; k < n; ++k) {
      if (pattern[k] == 0) a(k) = lo(k);
      else if (pattern[k] == 2) a(k) = hi(k);
      else free_idx.push_back(k);
    }
    const int nf = static_cast<int>(free_idx.size());
    if (nf > 0) {
      Matrix Mff(nf, nf);
      Vector rhs(nf);
      for (int r = 0; r < nf; ++r) {
        rhs(r) = -p.q(free_idx[r]);
        for (int k = 0; k < n; ++k)
          if (pattern[k] != 1) rhs(r) -= p.M(free_idx[r], k) * a(k);
        for (int s = 0; s < nf; ++s) Mff(r, s) = p.M(free_idx[r], free_idx[s]);
      }
      Eigen::FullPivLU<Matrix> lu(Mff);
      lu.setThreshold(1e-12);
      if (!lu.isInvertible()) continue;
      const Vector xf = lu.solve(rhs);
      for (int r = 0; r < nf; ++r) a(free_idx[r]) = xf(r);
    }

    const Vector w = p.M * a + p.q;
    bool ok = true;
    for (int k = 0; k < n && ok; ++k) {
      switch (pattern[k]) {
        case 0: ok = w(k) >= -tol; break;
        case 2: ok = w(k) <= tol; break;
        default: ok = a(k) >= lo(k) - tol && a(k) <= hi(k) + tol; break;
      }
    }
    if (!ok) continue;
    const bool duplicate = std::any_of(found.begin(), found.end(), [&](const Vector& s) {
      return (s - a).cwiseAbs().maxCoeff() <= 1e-8 * (1.0 + s.cwiseAbs().maxCoeff());
    });
    if (!duplicate) found.push_back(a);
  }

  if (found.empty())
    throw EnumerationError(EnumerationError::Kind::NoSolution,
                           "no active-set pattern yields a solution");
  if (found.size() > 1)
    throw EnumerationError(EnumerationError::Kind::MultipleSolutions,
                           std::to_string(found.size()) +
                               " distinct solutions found",
                           found);
  ViSolution sol;
  sol.a = found.front();
  sol.residual = natural_map_residual(p, sol.a);
  sol.status = ViSolution::Status::Converged;
  return sol;
}

}  // namespace nashnewton
