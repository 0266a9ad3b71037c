#include "nashnewton/feasible_set.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace nashnewton {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Dual active-set method (Goldfarb-Idnani with identity Hessian) for
// min 0.5|x - y|^2 s.t. C x <= d. Starts from x = y and adds the most
// violated row each round, dropping rows whose multiplier would turn
// negative. Terminates in finitely many steps.
Vector active_set_projection(const LinearRows& rows, const Vector& y) {
  const int m = rows.count();
  const int n = static_cast<int>(y.size());
  Vector row_norm(m);
  for (int r = 0; r < m; ++r) row_norm(r) = rows.C.row(r).norm();
  const double tol = 1e-12 * (1.0 + rows.d.cwiseAbs().maxCoeff() + y.cwiseAbs().maxCoeff());

  Vector x = y;
  std::vector<int> active;
  std::vector<double> u;

  // Primal direction z = P c_p (P projects onto the null space of the
  // active normals) and dual direction r = (N'N)^+ N' c_p.
  auto directions = [&](int p, Vector& z, Vector& r) {
    const Vector c = rows.C.row(p).transpose();
    if (active.empty()) {
      z = c;
      r.resize(0);
      return;
    }
    Matrix N(n, static_cast<int>(active.size()));
    for (std::size_t j = 0; j < active.size(); ++j) N.col(j) = rows.C.row(active[j]).transpose();
    r = N.completeOrthogonalDecomposition().solve(c);
    z = c - N * r;
  };

  // The incremental steps drift when active normals are nearly parallel.
  // Re-solve x as the point of the active affine subspace nearest y and keep
  // it unless it is further from feasibility.
  auto polish = [&]() {
    const int k = static_cast<int>(active.size());
    Matrix Nt(k, n);
    Vector dA(k);
    for (int j = 0; j < k; ++j) {
      Nt.row(j) = rows.C.row(active[j]);
      dA(j) = rows.d(active[j]);
    }
    const Vector candidate = y + Nt.completeOrthogonalDecomposition().solve(dA - Nt * y);
    auto excess = [&](const Vector& v) { return (rows.C * v - rows.d).maxCoeff(); };
    if (excess(candidate) <= std::max(excess(x), 0.0)) x = candidate;
  };

  const int max_steps = 10 * (m + n) + 100;
  for (int step = 0; step < max_steps; ++step) {
    int p = -1;
    double worst = tol;
    for (int r = 0; r < m; ++r) {
      if (row_norm(r) == 0.0 || std::find(active.begin(), active.end(), r) != active.end())
        continue;
      const double v = (rows.C.row(r).dot(x) - rows.d(r)) / row_norm(r);
      if (v > worst) {
        worst = v;
        p = r;
      }
    }
    if (p < 0) return x;

    double u_p = 0.0;
    for (int inner = 0; inner <= m; ++inner) {
      Vector z, r;
      directions(p, z, r);
      const double s_p = rows.C.row(p).dot(x) - rows.d(p);
      const double curv = z.dot(rows.C.row(p).transpose());
      const bool primal = z.norm() > 1e-14 * row_norm(p);
      const double t_full = primal ? s_p / curv : kInf;
      double t_part = kInf;
      int drop = -1;
      for (std::size_t j = 0; j < active.size(); ++j)
        if (r(j) > 1e-14 && u[j] / r(j) < t_part) {
          t_part = u[j] / r(j);
          drop = static_cast<int>(j);
        }
      const double t = std::min(t_full, t_part);
      if (!std::isfinite(t)) throw InputError("constraint rows are infeasible");
      if (primal) x -= t * z;
      for (std::size_t j = 0; j < active.size(); ++j) u[j] -= t * r(j);
      u_p += t;
      if (t_full <= t_part) {
        active.push_back(p);
        u.push_back(u_p);
        polish();
        break;
      }
      active.erase(active.begin() + drop);
      u.erase(u.begin() + drop);
    }
  }
  return x;
}

}  // namespace

Box Box::unbounded(int dim) {
  return Box{Vector::Constant(dim, -kInf), Vector::Constant(dim, kInf)};
}

Box Box::uniform(int dim, double lower, double upper) {
  return Box{Vector::Constant(dim, lower), Vector::Constant(dim, upper)};
}

int set_dimension(const FeasibleSet& set) {
  return std::visit(
      [](const auto& s) -> int {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Box>) {
          return static_cast<int>(s.lower.size());
        } else {
          return static_cast<int>(s.A.cols());
        }
      },
      set);
}

void validate_set(const FeasibleSet& set) {
  if (const auto* box = std::get_if<Box>(&set)) {
    if (box->lower.size() != box->upper.size())
      throw InputError("box bounds have different lengths");
    for (Eigen::Index k = 0; k < box->lower.size(); ++k) {
      if (std::isnan(box->lower(k)) || std::isnan(box->upper(k)))
        throw InputError("box bound is NaN");
      if (box->lower(k) > box->upper(k))
        throw InputError("box lower bound exceeds upper bound at index " +
                         std::to_string(k));
    }
  } else {
    const auto& poly = std::get<Polyhedron>(set);
    if (poly.A.rows() != poly.b.size())
      throw InputError("polyhedron A and b have inconsistent row counts");
    if (!poly.A.allFinite() || !poly.b.allFinite())
      throw InputError("polyhedron rows must be finite");
  }
}

Vector project_onto_rows(const LinearRows& rows, const Vector& y) {
  if (rows.count() == 0) return y;
  if (((rows.C * y - rows.d).array() <= 0.0).all()) return y;
  return active_set_projection(rows, y);
}

FeasibleRegion::FeasibleRegion(std::vector<int> dims,
                               std::vector<FeasibleSet> blocks,
                               std::optional<Polyhedron> coupled)
    : dims_(std::move(dims)),
      blocks_(std::move(blocks)),
      coupled_(std::move(coupled)) {
  if (dims_.size() != blocks_.size())
    throw InputError("region needs one set per agent block");
  offsets_.resize(dims_.size());
  total_ = 0;
  for (std::size_t i = 0; i < dims_.size(); ++i) {
    if (dims_[i] <= 0) throw InputError("agent dimensions must be positive");
    validate_set(blocks_[i]);
    if (set_dimension(blocks_[i]) != dims_[i])
      throw InputError("set dimension does not match agent " +
                       std::to_string(i) + " dimension");
    offsets_[i] = total_;
    total_ += dims_[i];
  }
  if (coupled_) {
    validate_set(*coupled_);
    if (coupled_->A.cols() != total_)
      throw InputError("coupled constraint matrix must have n columns");
  }
}

FeasibleRegion FeasibleRegion::unconstrained(std::vector<int> dims) {
  std::vector<FeasibleSet> blocks;
  blocks.reserve(dims.size());
  for (int d : dims) blocks.emplace_back(Box::unbounded(d));
  return FeasibleRegion(std::move(dims), std::move(blocks));
}

bool FeasibleRegion::is_box() const {
  if (coupled_) return false;
  return std::all_of(blocks_.begin(), blocks_.end(), [](const auto& s) {
    return std::holds_alternative<Box>(s);
  });
}

Vector FeasibleRegion::lower() const {
  Vector lo = Vector::Constant(total_, -kInf);
  for (int i = 0; i < num_blocks(); ++i)
    if (const auto* box = std::get_if<Box>(&blocks_[i]))
      lo.segment(offsets_[i], dims_[i]) = box->lower;
  return lo;
}

Vector FeasibleRegion::upper() const {
  Vector hi = Vector::Constant(total_, kInf);
  for (int i = 0; i < num_blocks(); ++i)
    if (const auto* box = std::get_if<Box>(&blocks_[i]))
      hi.segment(offsets_[i], dims_[i]) = box->upper;
  return hi;
}

LinearRows FeasibleRegion::rows() const {
  std::vector<std::pair<Vector, double>> collected;
  for (int i = 0; i < num_blocks(); ++i) {
    const int off = offsets_[i];
    if (const auto* box = std::get_if<Box>(&blocks_[i])) {
      for (int k = 0; k < dims_[i]; ++k) {
        if (std::isfinite(box->lower(k))) {
          Vector row = Vector::Zero(total_);
          row(off + k) = -1.0;
          collected.emplace_back(std::move(row), -box->lower(k));
        }
        if (std::isfinite(box->upper(k))) {
          Vector row = Vector::Zero(total_);
          row(off + k) = 1.0;
          collected.emplace_back(std::move(row), box->upper(k));
        }
      }
    } else {
      const auto& poly = std::get<Polyhedron>(blocks_[i]);
      for (Eigen::Index r = 0; r < poly.A.rows(); ++r) {
        Vector row = Vector::Zero(total_);
        row.segment(off, dims_[i]) = poly.A.row(r).transpose();
        collected.emplace_back(std::move(row), poly.b(r));
      }
    }
  }
  if (coupled_) {
    for (Eigen::Index r = 0; r < coupled_->A.rows(); ++r)
      collected.emplace_back(coupled_->A.row(r).transpose(), coupled_->b(r));
  }
  LinearRows out{Matrix(collected.size(), total_), Vector(collected.size())};
  for (std::size_t r = 0; r < collected.size(); ++r) {
    out.C.row(r) = collected[r].first.transpose();
    out.d(r) = collected[r].second;
  }
  return out;
}

Vector FeasibleRegion::project(const Vector& y) const {
  if (y.size() != total_) throw InputError("projection point has wrong size");
  if (coupled_) return project_onto_rows(rows(), y);
  Vector x(total_);
  for (int i = 0; i < num_blocks(); ++i) {
    const auto seg = y.segment(offsets_[i], dims_[i]);
    if (const auto* box = std::get_if<Box>(&blocks_[i])) {
      x.segment(offsets_[i], dims_[i]) =
          seg.cwiseMax(box->lower).cwiseMin(box->upper);
    } else {
      const auto& poly = std::get<Polyhedron>(blocks_[i]);
      x.segment(offsets_[i], dims_[i]) =
          project_onto_rows(LinearRows{poly.A, poly.b}, seg);
    }
  }
  return x;
}

double FeasibleRegion::violation(const Vector& x) const {
  if (x.size() != total_) throw InputError("point has wrong size");
  const LinearRows r = rows();
  if (r.count() == 0) return 0.0;
  return std::max(0.0, (r.C * x - r.d).maxCoeff());
}

bool FeasibleRegion::contains(const Vector& x, double tol) const {
  return violation(x) <= tol;
}

FeasibleRegion FeasibleRegion::block_region(int block) const {
  if (coupled_)
    throw InputError("region with joint constraints has no agent-local part");
  return FeasibleRegion({dims_[block]}, {blocks_[block]});
}

}  // namespace nashnewton
