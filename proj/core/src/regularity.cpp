#include "nashnewton/regularity.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

namespace nashnewton {

namespace {

Matrix sign_rows(const std::vector<SignKind>& signs) {
  std::vector<Vector> rows;
  const int n = static_cast<int>(signs.size());
  for (int k = 0; k < n; ++k) {
    Vector e = Vector::Zero(n);
    e(k) = 1.0;
    switch (signs[k]) {
      case SignKind::Free:
        break;
      case SignKind::NonNegative:
        rows.push_back(-e);
        break;
      case SignKind::NonPositive:
        rows.push_back(e);
        break;
      case SignKind::Zero:
        rows.push_back(e);
        rows.push_back(-e);
        break;
    }
  }
  Matrix out(rows.size(), n);
  for (std::size_t r = 0; r < rows.size(); ++r) out.row(r) = rows[r];
  return out;
}

AgentCone box_cone(const Box& box, const Vector& ai, const Vector& grad,
                   double tol) {
  const int n = static_cast<int>(ai.size());
  std::vector<SignKind> signs(n, SignKind::Free);
  for (int k = 0; k < n; ++k) {
    if (ai(k) < box.lower(k) - tol || ai(k) > box.upper(k) + tol)
      throw InputError("point is outside the box beyond the active tolerance");
    const bool at_lower = ai(k) - box.lower(k) <= tol;
    const bool at_upper = box.upper(k) - ai(k) <= tol;
    if (at_lower && at_upper) {
      signs[k] = SignKind::Zero;
    } else if (at_lower) {
      signs[k] = SignKind::NonNegative;
    } else if (at_upper) {
      signs[k] = SignKind::NonPositive;
    }
  }

  // On the tangent cone, grad'd = 0 collapses to coordinate fixing when
  // every term grad_k d_k has the same sign.
  bool separable = true;
  std::vector<SignKind> reduced = signs;
  for (int k = 0; k < n; ++k) {
    if (std::abs(grad(k)) <= tol || signs[k] == SignKind::Zero) continue;
    if ((signs[k] == SignKind::NonNegative && grad(k) > 0.0) ||
        (signs[k] == SignKind::NonPositive && grad(k) < 0.0)) {
      reduced[k] = SignKind::Zero;
    } else {
      separable = false;
    }
  }

  AgentCone cone;
  cone.dim = n;
  if (separable) {
    cone = AgentCone::from_signs(reduced);
  } else {
    cone.inequality = sign_rows(signs);
    cone.normal = grad;
  }
  return cone;
}

AgentCone polyhedron_cone(const Polyhedron& poly, const Vector& ai,
                          const Vector& grad, double tol) {
  const Vector slack = poly.A * ai - poly.b;
  std::vector<int> active;
  for (Eigen::Index r = 0; r < slack.size(); ++r) {
    if (slack(r) > tol)
      throw InputError("point violates polyhedron row " + std::to_string(r) +
                       " beyond the active tolerance");
    if (slack(r) >= -tol) active.push_back(static_cast<int>(r));
  }
  AgentCone cone;
  cone.dim = static_cast<int>(ai.size());
  cone.inequality.resize(active.size(), cone.dim);
  for (std::size_t r = 0; r < active.size(); ++r)
    cone.inequality.row(r) = poly.A.row(active[r]);
  cone.normal = grad;
  if (cone.normal.cwiseAbs().maxCoeff() <= tol)
    cone.normal.setZero();
  if (active.empty() && cone.normal.isZero(0.0))
    cone = AgentCone::full_space(cone.dim);
  return cone;
}

double semicopositivity_value(const Matrix& H, const CriticalCone& cone,
                              const Vector& c) {
  const Vector Hc = H * c;
  double best = -std::numeric_limits<double>::infinity();
  int off = 0;
  for (const auto& agent : cone.agents) {
    best = std::max(best, c.segment(off, agent.dim).dot(Hc.segment(off, agent.dim)));
    off += agent.dim;
  }
  return best;
}

// Draws one element of an agent cone; returns a zero vector when the draw
// collapses (e.g. the cone is {0}).
Vector sample_agent(const AgentCone& agent, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector y(agent.dim);
  for (int k = 0; k < agent.dim; ++k) y(k) = normal(rng);

  if (agent.coordinate_signs) {
    const auto& signs = *agent.coordinate_signs;
    for (int k = 0; k < agent.dim; ++k) {
      switch (signs[k]) {
        case SignKind::Free:
          break;
        case SignKind::NonNegative:
          y(k) = std::abs(y(k));
          break;
        case SignKind::NonPositive:
          y(k) = -std::abs(y(k));
          break;
        case SignKind::Zero:
          y(k) = 0.0;
          break;
      }
    }
    return y;
  }

  const double nn = agent.normal.size() ? agent.normal.squaredNorm() : 0.0;
  auto onto_hyperplane = [&](Vector v) {
    if (nn > 0.0) v -= (agent.normal.dot(v) / nn) * agent.normal;
    return v;
  };
  for (int attempt = 0; attempt < 64; ++attempt) {
    Vector v = onto_hyperplane(y);
    if (agent.inequality.rows() == 0 ||
        (agent.inequality * v).maxCoeff() < 0.0)
      return v;
    for (int k = 0; k < agent.dim; ++k) y(k) = normal(rng);
  }
  // Narrow cone: fall back to the projection, which lands on a face.
  const int m = static_cast<int>(agent.inequality.rows());
  const int extra = nn > 0.0 ? 2 : 0;
  LinearRows rows{Matrix(m + extra, agent.dim), Vector::Zero(m + extra)};
  if (m > 0) rows.C.topRows(m) = agent.inequality;
  if (extra) {
    rows.C.row(m) = agent.normal.transpose();
    rows.C.row(m + 1) = -agent.normal.transpose();
  }
  Vector p = project_onto_rows(rows, y);
  if (p.norm() < 1e-12) p.setZero();
  return p;
}

bool enumerable(const CriticalCone& cone) {
  if (cone.dimension() > 6) return false;
  return std::all_of(cone.agents.begin(), cone.agents.end(),
                     [](const AgentCone& a) { return a.coordinate_signs.has_value(); });
}

}  // namespace

bool AgentCone::contains(const Vector& d, double tol) const {
  if (d.size() != dim) return false;
  if (inequality.rows() > 0 && (inequality * d).maxCoeff() > tol) return false;
  if (normal.size() > 0 && std::abs(normal.dot(d)) > tol) return false;
  return true;
}

AgentCone AgentCone::from_signs(std::vector<SignKind> signs) {
  AgentCone cone;
  cone.dim = static_cast<int>(signs.size());
  cone.inequality = sign_rows(signs);
  cone.normal = Vector::Zero(cone.dim);
  cone.coordinate_signs = std::move(signs);
  return cone;
}

AgentCone AgentCone::full_space(int dim) {
  return from_signs(std::vector<SignKind>(dim, SignKind::Free));
}

int CriticalCone::dimension() const {
  int n = 0;
  for (const auto& a : agents) n += a.dim;
  return n;
}

bool CriticalCone::contains(const Vector& d, double tol) const {
  if (d.size() != dimension()) return false;
  int off = 0;
  for (const auto& a : agents) {
    if (!a.contains(d.segment(off, a.dim), tol)) return false;
    off += a.dim;
  }
  return true;
}

CriticalCone critical_cone(const GameProblem& game, const Vector& a_star,
                           double tol_act) {
  game.require_dimension(a_star);
  const FeasibleRegion& region = game.region();
  if (region.has_coupled())
    throw InputError("critical cone needs per-agent sets without joint constraints");
  const Vector F = pseudogradient(game, a_star);

  CriticalCone cone;
  for (int i = 0; i < game.num_agents(); ++i) {
    const Vector ai = game.block(a_star, i);
    const Vector gi = F.segment(game.offset(i), game.dim(i));
    const auto& set = region.block_set(i);
    if (const auto* box = std::get_if<Box>(&set)) {
      cone.agents.push_back(box_cone(*box, ai, gi, tol_act));
    } else {
      cone.agents.push_back(
          polyhedron_cone(std::get<Polyhedron>(set), ai, gi, tol_act));
    }
  }
  return cone;
}

SemicopositivityVerdict check_strict_semicopositivity(const Matrix& H,
                                                      const CriticalCone& cone,
                                                      long n_samples,
                                                      std::uint64_t seed) {
  const int n = cone.dimension();
  if (cone.agents.empty() || n == 0)
    throw InputError("empty cone description");
  if (H.rows() != n || H.cols() != n)
    throw InputError("matrix and cone dimensions differ");
  if (!H.allFinite()) throw InputError("matrix has non-finite entries");

  const double threshold = 1e-12 * std::max(1.0, H.cwiseAbs().maxCoeff());
  SemicopositivityVerdict verdict;
  verdict.smallest_value = std::numeric_limits<double>::infinity();

  auto examine = [&](const Vector& c) {
    const double norm = c.norm();
    if (norm == 0.0) return false;
    const Vector unit = c / norm;
    const double value = semicopositivity_value(H, cone, unit);
    verdict.smallest_value = std::min(verdict.smallest_value, value);
    if (value <= threshold) {
      verdict.outcome = SemicopositivityVerdict::Outcome::CertifiedViolated;
      verdict.witness = unit;
      return true;
    }
    return false;
  };

  if (enumerable(cone)) {
    std::vector<std::vector<double>> choices;
    for (const auto& agent : cone.agents)
      for (SignKind s : *agent.coordinate_signs) {
        switch (s) {
          case SignKind::Free:
            choices.push_back({-1.0, 0.0, 1.0});
            break;
          case SignKind::NonNegative:
            choices.push_back({1.0});
            break;
          case SignKind::NonPositive:
            choices.push_back({-1.0});
            break;
          case SignKind::Zero:
            choices.push_back({0.0});
            break;
        }
      }
    std::vector<std::size_t> idx(n, 0);
    Vector c(n);
    while (true) {
      for (int k = 0; k < n; ++k) c(k) = choices[k][idx[k]];
      if (c.squaredNorm() > 0.0) {
        ++verdict.orthant_representatives;
        if (examine(c)) return verdict;
      }
      int k = 0;
      while (k < n && ++idx[k] == choices[k].size()) idx[k++] = 0;
      if (k == n) break;
    }
  }

  std::mt19937_64 rng(seed);
  Vector c(n);
  for (long s = 0; s < n_samples; ++s) {
    int off = 0;
    for (const auto& agent : cone.agents) {
      c.segment(off, agent.dim) = sample_agent(agent, rng);
      off += agent.dim;
    }
    if (c.squaredNorm() == 0.0) continue;
    ++verdict.samples_checked;
    if (examine(c)) return verdict;
  }
  if (!std::isfinite(verdict.smallest_value)) verdict.smallest_value = 0.0;
  return verdict;
}

MonotonicityVerdict check_monotonicity(const Matrix& H) {
  if (H.rows() != H.cols()) throw InputError("matrix must be square");
  if (!H.allFinite()) throw InputError("matrix has non-finite entries");
  const Matrix S = 0.5 * (H + H.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> eig(S, Eigen::EigenvaluesOnly);
  const Vector ev = eig.eigenvalues();
  MonotonicityVerdict verdict;
  verdict.min_eigenvalue = ev.size() ? ev.minCoeff() : 0.0;
  const double tol = 1e-10 * std::max(1.0, ev.size() ? ev.cwiseAbs().maxCoeff() : 0.0);
  if (verdict.min_eigenvalue > tol) {
    verdict.classification = MonotonicityVerdict::Class::PositiveDefinite;
  } else if (verdict.min_eigenvalue >= -tol) {
    verdict.classification = MonotonicityVerdict::Class::PositiveSemidefinite;
  } else {
    verdict.classification = MonotonicityVerdict::Class::Indefinite;
  }
  return verdict;
}

}  // namespace nashnewton
