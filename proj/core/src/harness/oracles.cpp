#include "nashnewton/harness/oracles.hpp"

#include "nashnewton/builtin_games.hpp"
#include "nashnewton/derivative_check.hpp"
#include "nashnewton/kkt.hpp"

#include <cmath>
#include <cstring>
#include <random>
#include <sstream>

namespace nashnewton::harness {

namespace {

std::vector<double> serialize(const AffineViProblem& p) {
  std::vector<double> out;
  auto put = [&out](const auto& m) {
    out.push_back(static_cast<double>(m.rows()));
    out.push_back(static_cast<double>(m.cols()));
    for (Eigen::Index k = 0; k < m.size(); ++k) out.push_back(m.data()[k]);
  };
  put(p.M);
  put(p.q);
  for (int b = 0; b < p.set.num_blocks(); ++b) {
    const auto& s = p.set.block_set(b);
    if (const auto* box = std::get_if<Box>(&s)) {
      out.push_back(0.0);
      put(box->lower);
      put(box->upper);
    } else {
      const auto& poly = std::get<Polyhedron>(s);
      out.push_back(1.0);
      put(poly.A);
      put(poly.b);
    }
  }
  if (p.set.coupled()) {
    out.push_back(2.0);
    put(p.set.coupled()->A);
    put(p.set.coupled()->b);
  }
  return out;
}

std::uint64_t fnv1a(const std::vector<double>& data) {
  std::uint64_t h = 1469598103934665603ULL;
  for (double x : data) {
    if (x == 0.0) x = 0.0;  // fold -0 into +0
    unsigned char bytes[sizeof(double)];
    std::memcpy(bytes, &x, sizeof(double));
    for (unsigned char c : bytes) {
      h ^= c;
      h *= 1099511628211ULL;
    }
  }
  return h;
}

AffineViProblem canonical_vi() {
  AffineViProblem p;
  p.M = Matrix::Identity(2, 2);
  p.q = Vector(2);
  p.q << -2.0, 0.5;
  p.set = FeasibleRegion({1, 1}, {Box::uniform(1, 0.0, 1.0), Box::uniform(1, 0.0, 1.0)});
  return p;
}

Vector canonical_vi_solution() {
  Vector a(2);
  a << 1.0, 0.0;
  return a;
}

}  // namespace

std::uint64_t problem_hash(const AffineViProblem& p) { return fnv1a(serialize(p)); }

std::vector<OracleInfo> OracleRegistry::catalog() const {
  return {
      {"active_set_enumeration",
       "exact solution of a box-constrained affine VI by trying every active pattern"},
      {"finite_difference",
       "central-difference checks of pseudogradient, game Hessian and Phi Jacobian"},
      {"grid_vi", "VI inequality checked against a grid of feasible points"},
      {"analytic_gne", "closed-form solution of the two-agent shared-constraint example"},
  };
}

SelfTest OracleRegistry::self_test(const std::string& name) const {
  SelfTest t{name, false, ""};
  std::ostringstream detail;
  try {
    if (name == "active_set_enumeration") {
      const auto p = canonical_vi();
      const auto s1 = active_set_solution(p);
      const auto s2 = active_set_solution(p);
      const double err = (s1.a - canonical_vi_solution()).norm();
      const bool same = s1.a.size() == s2.a.size() &&
                        std::memcmp(s1.a.data(), s2.a.data(), sizeof(double) * s1.a.size()) == 0;
      t.passed = err <= 1e-12 && same;
      detail << "error " << err << (same ? ", cached result identical" : ", cache mismatch");
    } else if (name == "finite_difference") {
      const auto r1 = derivative_check(builtin_quartic_game(), 5, 1);
      const auto r2 = derivative_check(analytic_shared_constraint_gne(), 5, 2);
      t.passed = r1.all_passed() && r2.all_passed();
      detail << r1.passed + r2.passed << "/" << r1.checks + r2.checks << " checks passed";
    } else if (name == "grid_vi") {
      const auto p = canonical_vi();
      const auto good = grid_vi_check(p, canonical_vi_solution());
      const auto bad = grid_vi_check(p, Vector::Zero(2));
      t.passed = good.holds() && !bad.holds();
      detail << "min at solution " << good.min_value << ", at origin " << bad.min_value;
    } else if (name == "analytic_gne") {
      const auto z = analytic_solution(name);
      const double phi = assemble_phi(analytic_shared_constraint_gne(), *z).norm();
      t.passed = phi <= 1e-14;
      detail << "|Phi(z*)| = " << phi;
    } else {
      detail << "unknown oracle";
    }
  } catch (const std::exception& e) {
    detail << "threw: " << e.what();
  }
  t.detail = detail.str();
  return t;
}

std::vector<SelfTest> OracleRegistry::self_test_all() const {
  std::vector<SelfTest> out;
  for (const auto& o : catalog()) out.push_back(self_test(o.name));
  return out;
}

ViSolution OracleRegistry::active_set_solution(const AffineViProblem& p) const {
  auto key = serialize(p);
  const auto h = fnv1a(key);
  {
    std::lock_guard lock(mutex_);
    if (auto it = cache_.find(h); it != cache_.end())
      for (const auto& e : it->second)
        if (e.key == key) {
          ++hits_;
          return e.solution;
        }
  }
  ViSolution s = enumerate_active_set_solution(p);
  std::lock_guard lock(mutex_);
  cache_[h].push_back({std::move(key), s});
  return s;
}

GridVerdict OracleRegistry::grid_vi_check(const AffineViProblem& p, const Vector& a,
                                          int per_axis, std::uint64_t seed) const {
  p.validate();
  if (a.size() != p.dimension()) throw InputError("grid check point has the wrong length");
  if (per_axis < 2) throw InputError("grid needs at least 2 points per axis");
  const int n = p.dimension();
  Vector lo = a.array() - 1.0, hi = a.array() + 1.0;
  for (int b = 0; b < p.set.num_blocks(); ++b)
    if (const auto* box = std::get_if<Box>(&p.set.block_set(b)))
      for (Eigen::Index k = 0; k < box->lower.size(); ++k) {
        const int idx = p.set.offset(b) + static_cast<int>(k);
        if (std::isfinite(box->lower(k))) lo(idx) = box->lower(k);
        if (std::isfinite(box->upper(k))) hi(idx) = box->upper(k);
      }

  GridVerdict v;
  v.feasible = p.set.contains(a, 1e-9);
  v.min_value = std::numeric_limits<double>::infinity();
  const Vector Fa = p.q + p.M * a;
  auto visit = [&](const Vector& x) {
    if (!p.set.contains(x, 1e-12)) return;
    v.min_value = std::min(v.min_value, (x - a).dot(Fa));
    ++v.points_checked;
  };

  const double total = std::pow(static_cast<double>(per_axis), n);
  if (total <= 20000.0) {
    std::vector<int> digit(n, 0);
    Vector x(n);
    for (long code = 0; code < static_cast<long>(total); ++code) {
      long c = code;
      for (int k = 0; k < n; ++k) {
        digit[k] = static_cast<int>(c % per_axis);
        c /= per_axis;
        x(k) = lo(k) + (hi(k) - lo(k)) * digit[k] / (per_axis - 1);
      }
      visit(x);
    }
  } else {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Vector x(n);
    for (int s = 0; s < 20000; ++s) {
      for (int k = 0; k < n; ++k) x(k) = lo(k) + (hi(k) - lo(k)) * u(rng);
      visit(x);
    }
  }
  if (v.points_checked == 0) v.min_value = 0.0;
  return v;
}

DerivativeReport OracleRegistry::derivative_check(const GameProblem& game, int points,
                                                  std::uint64_t seed, double radius) const {
  if (points < 1) throw InputError("derivative check needs at least one point");
  DerivativeReport r;
  r.points = points;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-radius, radius);
  std::uniform_real_distribution<double> w(0.0, radius);
  const int n = game.dimension();
  const int m = game.has_constraints() ? game.num_multipliers() : 0;
  auto record = [&r](bool ok, const std::string& what, int k, double err) {
    ++r.checks;
    if (ok) {
      ++r.passed;
    } else {
      std::ostringstream s;
      s << what << " at point " << k << ": relative error " << err;
      r.failures.push_back(s.str());
    }
  };
  for (int k = 0; k < points; ++k) {
    Vector a(n);
    for (int j = 0; j < n; ++j) a(j) = u(rng);
    const double eg = pseudogradient_fd_error(game, a);
    r.worst_pseudogradient = std::max(r.worst_pseudogradient, eg);
    record(eg <= kPseudogradientFdTol, "pseudogradient", k, eg);
    const double eh = game_hessian_fd_error(game, a);
    r.worst_hessian = std::max(r.worst_hessian, eh);
    record(eh <= kHessianFdTol, "game Hessian", k, eh);
    if (m > 0) {
      Vector z(n + m);
      z.head(n) = a;
      for (int j = 0; j < m; ++j) z(n + j) = w(rng);
      if (const auto ep = phi_jacobian_fd_error(game, z)) {
        r.worst_phi = std::max(r.worst_phi, *ep);
        record(*ep <= kPhiJacobianFdTol, "Phi Jacobian", k, *ep);
      } else {
        ++r.phi_points_skipped;
      }
    }
  }
  return r;
}

std::optional<Vector> OracleRegistry::analytic_solution(const std::string& name) const {
  if (name != "analytic_gne") return std::nullopt;
  Vector z(4);
  z << 0.5, 0.5, 0.5, 0.5;
  return z;
}

std::size_t OracleRegistry::cache_size() const {
  std::lock_guard lock(mutex_);
  std::size_t n = 0;
  for (const auto& [_, entries] : cache_) n += entries.size();
  return n;
}

std::size_t OracleRegistry::cache_hits() const {
  std::lock_guard lock(mutex_);
  return hits_;
}

const OracleRegistry& oracle_registry() {
  static const OracleRegistry registry;
  return registry;
}

}  // namespace nashnewton::harness
