#include "nashnewton/mpc.hpp"

#include "nashnewton/kkt.hpp"
#include "nashnewton/rates.hpp"
#include "nashnewton/semismooth_newton.hpp"

#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

namespace nashnewton {

namespace {

// Position of every predicted state and input inside the full trajectory
// vector w = [agent 0: xi(1..T), mu(0..T-1) | agent 1: ... ].
struct Layout {
  int T = 0;
  std::vector<int> nx, nu, block, block_len, mu_block;
  int nw = 0;
  int nmu = 0;

  Layout(const MpcScenario& s) : T(s.horizon) {
    for (const auto& ag : s.agents) {
      nx.push_back(ag.nx());
      nu.push_back(ag.nu());
      block.push_back(nw);
      block_len.push_back(T * (ag.nx() + ag.nu()));
      mu_block.push_back(nmu);
      nw += block_len.back();
      nmu += T * ag.nu();
    }
  }

  int xi(int i, int tau) const { return block[i] + (tau - 1) * nx[i]; }
  int mu(int i, int tau) const { return block[i] + T * nx[i] + tau * nu[i]; }
  int mu_only(int i, int tau) const { return mu_block[i] + tau * nu[i]; }
};

Matrix symmetric(const Matrix& M) { return 0.5 * (M + M.transpose()); }

// Agent i's horizon cost as 0.5 w' W_i w.
Matrix cost_matrix(const MpcScenario& s, const Layout& L, int i) {
  Matrix W = Matrix::Zero(L.nw, L.nw);
  const auto& ag = s.agents[i];
  const Matrix R = symmetric(ag.R);
  const Matrix Q = symmetric(ag.Q);
  const Matrix P = symmetric(ag.P);
  for (int tau = 0; tau < L.T; ++tau)
    W.block(L.mu(i, tau), L.mu(i, tau), L.nu[i], L.nu[i]) += R;
  for (int tau = 1; tau <= L.T; ++tau) {
    const int xi = L.xi(i, tau);
    W.block(xi, xi, L.nx[i], L.nx[i]) += tau < L.T ? Q : P;
    for (int j = 0; j < s.num_agents(); ++j) {
      if (j == i || s.pursuit.size() == 0) continue;
      const double p = s.pursuit(i, j);
      if (p == 0.0) continue;
      const int xj = L.xi(j, tau);
      const Matrix I = p * Matrix::Identity(L.nx[i], L.nx[i]);
      W.block(xi, xi, L.nx[i], L.nx[i]) += I;
      W.block(xj, xj, L.nx[i], L.nx[i]) += I;
      W.block(xi, xj, L.nx[i], L.nx[i]) -= I;
      W.block(xj, xi, L.nx[i], L.nx[i]) -= I;
    }
  }
  return W;
}

AgentCost quadratic_cost(Matrix H, Vector h, double c0, int off, int len) {
  AgentCost cost;
  cost.value = [H, h, c0](const Vector& y) { return 0.5 * y.dot(H * y) + h.dot(y) + c0; };
  cost.gradient = [H, h, off, len](const Vector& y) -> Vector {
    return H.middleRows(off, len) * y + h.segment(off, len);
  };
  cost.hessian_row = [H, off, len](const Vector&) -> Matrix {
    return H.middleRows(off, len);
  };
  return cost;
}

Vector bound_or(const Vector& v, int n, double fill) {
  return v.size() ? v : Vector::Constant(n, fill);
}

// Finite input bounds of agent i as rows over a vector of length ncols,
// with mu_i(tau) at column index(tau).
LinearRows input_rows(const MpcAgent& ag, int T, int ncols,
                      const std::function<int(int)>& index) {
  const Vector lo = bound_or(ag.u_lower, ag.nu(), -INFINITY);
  const Vector hi = bound_or(ag.u_upper, ag.nu(), INFINITY);
  std::vector<std::pair<int, double>> up, down;
  for (int tau = 0; tau < T; ++tau)
    for (int k = 0; k < ag.nu(); ++k) {
      if (std::isfinite(hi(k))) up.emplace_back(index(tau) + k, hi(k));
      if (std::isfinite(lo(k))) down.emplace_back(index(tau) + k, lo(k));
    }
  LinearRows rows{Matrix::Zero(up.size() + down.size(), ncols),
                  Vector(up.size() + down.size())};
  int r = 0;
  for (auto [c, b] : up) {
    rows.C(r, c) = 1.0;
    rows.d(r++) = b;
  }
  for (auto [c, b] : down) {
    rows.C(r, c) = -1.0;
    rows.d(r++) = -b;
  }
  return rows;
}

LinearRows stack_rows(const std::vector<LinearRows>& parts, int ncols) {
  int m = 0;
  for (const auto& p : parts) m += p.count();
  LinearRows out{Matrix(m, ncols), Vector(m)};
  int r = 0;
  for (const auto& p : parts) {
    out.C.middleRows(r, p.count()) = p.C;
    out.d.segment(r, p.count()) = p.d;
    r += p.count();
  }
  return out;
}

ParameterizedGame build_fast_path(const MpcScenario& s, const Layout& L, const Vector& x) {
  const int N = s.num_agents();
  // w = S x + G mu
  Matrix S = Matrix::Zero(L.nw, x.size());
  Matrix G = Matrix::Zero(L.nw, L.nmu);
  for (int i = 0; i < N; ++i) {
    const auto& ag = s.agents[i];
    for (int tau = 0; tau < L.T; ++tau)
      G.block(L.mu(i, tau), L.mu_only(i, tau), L.nu[i], L.nu[i]).setIdentity();
    Matrix Apow = ag.A;  // A^tau
    for (int tau = 1; tau <= L.T; ++tau) {
      S.block(L.xi(i, tau), s.state_offset(i), L.nx[i], L.nx[i]) = Apow;
      Apow = ag.A * Apow;
      Matrix Ak = Matrix::Identity(L.nx[i], L.nx[i]);  // A^{tau-1-sidx}
      for (int sidx = tau - 1; sidx >= 0; --sidx) {
        G.block(L.xi(i, tau), L.mu_only(i, sidx), L.nx[i], L.nu[i]) = Ak * ag.B;
        Ak = ag.A * Ak;
      }
    }
  }
  const Vector Sx = S * x;

  std::vector<AgentCost> costs;
  std::vector<int> dims;
  std::vector<FeasibleSet> boxes;
  std::vector<ConstraintFunction> cons;
  for (int i = 0; i < N; ++i) {
    const Matrix W = cost_matrix(s, L, i);
    const Matrix H = G.transpose() * W * G;
    const Vector h = G.transpose() * (W * Sx);
    const double c0 = 0.5 * Sx.dot(W * Sx);
    const int len = L.T * L.nu[i];
    dims.push_back(len);
    costs.push_back(quadratic_cost(symmetric(H), h, c0, L.mu_block[i], len));

    const auto& ag = s.agents[i];
    Box box{Vector(len), Vector(len)};
    for (int tau = 0; tau < L.T; ++tau) {
      box.lower.segment(tau * L.nu[i], L.nu[i]) = bound_or(ag.u_lower, L.nu[i], -INFINITY);
      box.upper.segment(tau * L.nu[i], L.nu[i]) = bound_or(ag.u_upper, L.nu[i], INFINITY);
    }
    boxes.emplace_back(box);
    cons.push_back(ConstraintFunction::from_linear(
        input_rows(ag, L.T, L.nmu, [&, i](int tau) { return L.mu_only(i, tau); })));
  }
  GameProblem game(dims, costs);
  game.with_region(FeasibleRegion(dims, boxes));
  game.with_constraints(cons);

  ParameterizedGame pg{ParameterizedGame::Mode::NashFastPath, std::move(game), x, L.T, {}, {}};
  for (int i = 0; i < N; ++i) {
    pg.input_dims.push_back(L.nu[i]);
    pg.input_offsets.push_back(L.mu_only(i, 0));
  }
  return pg;
}

ParameterizedGame build_multiple_shooting(const MpcScenario& s, const Layout& L,
                                          const Vector& x) {
  const int N = s.num_agents();
  std::optional<LinearRows> shared;
  if (s.shared_state) {
    const auto& E = s.shared_state->C;
    const int me = s.shared_state->count();
    LinearRows rows{Matrix::Zero(me * L.T, L.nw), Vector(me * L.T)};
    for (int tau = 1; tau <= L.T; ++tau) {
      const int r0 = (tau - 1) * me;
      for (int j = 0; j < N; ++j)
        rows.C.block(r0, L.xi(j, tau), me, L.nx[j]) =
            E.middleCols(s.state_offset(j), L.nx[j]);
      rows.d.segment(r0, me) = s.shared_state->d;
    }
    shared = rows;
  }

  std::vector<AgentCost> costs;
  std::vector<int> dims;
  std::vector<FeasibleSet> sets;
  std::vector<ConstraintFunction> cons;
  for (int i = 0; i < N; ++i) {
    const auto& ag = s.agents[i];
    const int nx = L.nx[i];
    const Matrix W = cost_matrix(s, L, i);
    costs.push_back(quadratic_cost(W, Vector::Zero(L.nw), 0.0, L.block[i], L.block_len[i]));
    dims.push_back(L.block_len[i]);

    // xi(tau+1) - A xi(tau) - B mu(tau) = [tau == 0] A x_i, as two rows each.
    LinearRows eq{Matrix::Zero(nx * L.T, L.nw), Vector::Zero(nx * L.T)};
    for (int tau = 0; tau < L.T; ++tau) {
      const int r0 = tau * nx;
      eq.C.block(r0, L.xi(i, tau + 1), nx, nx).setIdentity();
      if (tau > 0) eq.C.block(r0, L.xi(i, tau), nx, nx) = -ag.A;
      eq.C.block(r0, L.mu(i, tau), nx, L.nu[i]) = -ag.B;
      if (tau == 0) eq.d.segment(r0, nx) = ag.A * x.segment(s.state_offset(i), nx);
    }
    const LinearRows neg{-eq.C, -eq.d};
    const LinearRows inputs =
        input_rows(ag, L.T, L.nw, [&, i](int tau) { return L.mu(i, tau); });
    const LinearRows own = stack_rows({eq, neg, inputs}, L.nw);
    sets.emplace_back(Polyhedron{own.C.middleCols(L.block[i], L.block_len[i]), own.d});
    cons.push_back(ConstraintFunction::from_linear(
        shared ? stack_rows({own, *shared}, L.nw) : own));
  }
  GameProblem game(dims, costs);
  std::optional<Polyhedron> coupled;
  if (shared) coupled = Polyhedron{shared->C, shared->d};
  game.with_region(FeasibleRegion(dims, sets, coupled));
  game.with_constraints(cons);

  ParameterizedGame pg{ParameterizedGame::Mode::MultipleShooting, std::move(game), x, L.T, {}, {}};
  for (int i = 0; i < N; ++i) {
    pg.input_dims.push_back(L.nu[i]);
    pg.input_offsets.push_back(L.mu(i, 0));
  }
  return pg;
}

bool is_jn_family(MpcSolver solver) {
  return solver == MpcSolver::JN || solver == MpcSolver::DistributedJN;
}

IterateTrace run_solver(const ParameterizedGame& pg, const Vector& v, MpcSolver solver,
                        const NewtonConfig& cfg) {
  switch (solver) {
    case MpcSolver::JN: return josephy_newton(pg.game, v, cfg);
    case MpcSolver::DistributedJN: return distributed_jn_mechanism1(pg.game, v, cfg);
    case MpcSolver::SemismoothNewton: return semismooth_newton(pg.game, v, cfg);
    case MpcSolver::DistributedSSN: return distributed_semismooth_newton(pg.game, v, cfg);
  }
  throw InputError("unknown solver");
}

double residual_of(const ParameterizedGame& pg, const Vector& v, MpcSolver solver) {
  return is_jn_family(solver) ? game_residual(pg.game, v) : assemble_phi(pg.game, v).norm();
}

Vector plant_step(const MpcScenario& s, const Vector& x, const Vector& u) {
  Vector next(x.size());
  int uoff = 0;
  for (int i = 0; i < s.num_agents(); ++i) {
    const auto& ag = s.agents[i];
    const Vector xi = x.segment(s.state_offset(i), ag.nx());
    const Vector ui = u.segment(uoff, ag.nu());
    next.segment(s.state_offset(i), ag.nx()) =
        ag.nonlinear ? ag.nonlinear(xi, ui) : Vector(ag.A * xi + ag.B * ui);
    uoff += ag.nu();
  }
  return next;
}

std::string at_step(int t, const char* what) {
  return "t=" + std::to_string(t) + ": " + what;
}

}  // namespace

int MpcScenario::state_dimension() const {
  int n = 0;
  for (const auto& a : agents) n += a.nx();
  return n;
}

int MpcScenario::state_offset(int i) const {
  int n = 0;
  for (int j = 0; j < i; ++j) n += agents[j].nx();
  return n;
}

void MpcScenario::validate() const {
  if (agents.empty()) throw InputError("scenario has no agents");
  for (std::size_t i = 0; i < agents.size(); ++i) {
    const auto& a = agents[i];
    const std::string who = "agent " + std::to_string(i) + ": ";
    const int nx = a.nx();
    const int nu = a.nu();
    if (nx < 1 || a.A.cols() != nx) throw InputError(who + "A must be square and nonempty");
    if (a.B.rows() != nx || nu < 1) throw InputError(who + "B must have nx rows and nu >= 1 columns");
    if (a.Q.rows() != nx || a.Q.cols() != nx) throw InputError(who + "Q must be nx x nx");
    if (a.P.rows() != nx || a.P.cols() != nx) throw InputError(who + "P must be nx x nx");
    if (a.R.rows() != nu || a.R.cols() != nu) throw InputError(who + "R must be nu x nu");
    if (!a.A.allFinite() || !a.B.allFinite() || !a.Q.allFinite() || !a.R.allFinite() ||
        !a.P.allFinite())
      throw InputError(who + "plant and cost matrices must be finite");
    if (a.u_lower.size() && a.u_lower.size() != nu) throw InputError(who + "u_lower has the wrong length");
    if (a.u_upper.size() && a.u_upper.size() != nu) throw InputError(who + "u_upper has the wrong length");
    if (a.u_lower.size() && a.u_upper.size() && (a.u_lower.array() > a.u_upper.array()).any())
      throw InputError(who + "u_lower exceeds u_upper");
  }
  const int N = num_agents();
  if (pursuit.size()) {
    if (pursuit.rows() != N || pursuit.cols() != N)
      throw InputError("pursuit weights must be N x N");
    for (int i = 0; i < N; ++i)
      for (int j = 0; j < N; ++j) {
        if (!(pursuit(i, j) >= 0.0) || !std::isfinite(pursuit(i, j)))
          throw InputError("pursuit weights must be finite and nonnegative");
        if (i != j && pursuit(i, j) > 0.0 && agents[i].nx() != agents[j].nx())
          throw InputError("pursuit coupling needs equal state dimensions");
      }
  }
  if (shared_state && shared_state->C.cols() != state_dimension())
    throw InputError("shared state constraint has the wrong number of columns");
  if (horizon < 1) throw InputError("horizon must be at least 1");
  if (x0.size() != state_dimension()) throw InputError("x0 has the wrong length");
  if (!x0.allFinite()) throw InputError("x0 must be finite");
  for (int K : budgets)
    if (K < 0) throw InputError("iteration budgets must be nonnegative");
  if (t_end < 1) throw InputError("t_end must be at least 1");
  if (!(e0 >= 0.0) || !std::isfinite(e0)) throw InputError("e0 must be finite and nonnegative");
}

MpcScenario builtin_pursuit_scenario() {
  MpcScenario s;
  for (int i = 0; i < 2; ++i) {
    MpcAgent a;
    a.A = Matrix::Ones(1, 1);
    a.B = Matrix::Ones(1, 1);
    a.Q = Matrix::Constant(1, 1, 0.2);
    a.R = Matrix::Ones(1, 1);
    a.P = Matrix::Ones(1, 1);
    a.u_lower = Vector::Constant(1, -0.6);
    a.u_upper = Vector::Constant(1, 0.6);
    s.agents.push_back(a);
  }
  s.pursuit = Matrix::Zero(2, 2);
  s.pursuit(0, 1) = 0.5;
  s.pursuit(1, 0) = 0.3;
  s.horizon = 5;
  s.x0 = Vector(2);
  s.x0 << 4.0, -2.0;
  s.t_end = 40;
  s.e0 = 0.5;
  s.seed = 7;
  return s;
}

Vector ParameterizedGame::select_inputs(const Vector& v) const {
  int total = 0;
  for (int d : input_dims) total += d;
  Vector u(total);
  int off = 0;
  for (std::size_t i = 0; i < input_dims.size(); ++i) {
    u.segment(off, input_dims[i]) = v.segment(input_offsets[i], input_dims[i]);
    off += input_dims[i];
  }
  return u;
}

ParameterizedGame build_parameterized_game(const MpcScenario& s, const Vector& x) {
  s.validate();
  if (x.size() != s.state_dimension()) throw InputError("state has the wrong length");
  for (std::size_t i = 0; i < s.agents.size(); ++i)
    if (s.agents[i].nonlinear)
      throw SolverError(SolverError::Kind::Unsupported,
                        "agent " + std::to_string(i) +
                            ": nonlinear plant without derivative oracles");
  const Layout L(s);
  if (s.shared_state || s.multiple_shooting) return build_multiple_shooting(s, L, x);
  return build_fast_path(s, L, x);
}

const char* to_string(MpcSolver solver) {
  switch (solver) {
    case MpcSolver::JN: return "jn";
    case MpcSolver::SemismoothNewton: return "ssn";
    case MpcSolver::DistributedJN: return "distributed_jn";
    case MpcSolver::DistributedSSN: return "distributed_ssn";
  }
  return "unknown";
}

bool uses_multipliers(MpcSolver solver) { return !is_jn_family(solver); }

int estimate_dimension(const ParameterizedGame& pg, MpcSolver solver) {
  return pg.game.dimension() + (uses_multipliers(solver) ? pg.game.num_multipliers() : 0);
}

TdoResult tdo_step(const ParameterizedGame& pg, const Vector& v_prev, int K,
                   MpcSolver solver, const NewtonConfig& base) {
  if (K < 0) throw InputError("iteration budget must be nonnegative");
  if (v_prev.size() != estimate_dimension(pg, solver))
    throw InputError("solution estimate has the wrong length");
  if (K == 0) return {v_prev, residual_of(pg, v_prev, solver)};
  NewtonConfig cfg = base;
  cfg.max_outer = K;
  cfg.stop_on_tolerance = false;
  const IterateTrace trace = run_solver(pg, v_prev, solver, cfg);
  if (trace.status != SolverStatus::BudgetExhausted)
    throw SolverError(SolverError::Kind::NotConverged,
                      std::string(to_string(trace.status)) + " at iteration " +
                          std::to_string(trace.failed_at));
  return {trace.final_point(), trace.final_residual()};
}

ReferenceResult reference_solution(const ParameterizedGame& pg, const Vector& v_hint,
                                   MpcSolver solver, const ReferenceOptions& opt) {
  if (v_hint.size() != estimate_dimension(pg, solver))
    throw InputError("reference hint has the wrong length");
  const MpcSolver central = is_jn_family(solver) ? MpcSolver::JN : MpcSolver::SemismoothNewton;
  NewtonConfig cfg;
  cfg.tol_outer = opt.tol;
  cfg.max_outer = opt.max_iter;
  cfg.inner.tol_inner = std::min(1e-13, 0.1 * opt.tol);
  cfg.inner.max_iter = 200;

  const IterateTrace main = run_solver(pg, v_hint, central, cfg);
  if (!main.converged())
    throw SolverError(SolverError::Kind::NotConverged,
                      std::string("reference solve ended with ") + to_string(main.status) +
                          ", residual " + std::to_string(main.final_residual()));
  ReferenceResult out{main.final_point(), main.iterations(), main.final_residual()};

  std::mt19937_64 rng(opt.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<Vector> witnesses;
  const int n = pg.primal_dimension();
  for (int r = 0; r < opt.restarts; ++r) {
    Vector start = v_hint;
    for (int k = 0; k < n; ++k) start(k) += opt.restart_scale * normal(rng);
    const IterateTrace t = run_solver(pg, start, central, cfg);
    if (!t.converged()) continue;
    if ((pg.primal(t.final_point()) - pg.primal(out.v)).norm() > opt.distinct_tol)
      witnesses.push_back(t.final_point());
  }
  if (!witnesses.empty()) {
    witnesses.insert(witnesses.begin(), out.v);
    throw NonIsolatedError(std::to_string(witnesses.size()) +
                               " distinct solutions found from randomized restarts",
                           std::move(witnesses));
  }
  return out;
}

double ClosedLoopLog::sup_e() const {
  double s = 0.0;
  for (const auto& st : steps) s = std::max(s, st.e);
  return s;
}

ClosedLoopLog run_closed_loop(const MpcScenario& s, MpcSolver solver, int K,
                              std::uint64_t seed, const ClosedLoopOptions& opt) {
  s.validate();
  if (K < 0) throw InputError("iteration budget must be nonnegative");
  std::mt19937_64 rng(seed);
  ReferenceOptions ropt = opt.reference;
  ropt.seed = seed;

  ClosedLoopLog log;
  log.K = K;
  log.solver = solver;

  Vector x = s.x0;
  ParameterizedGame pg = build_parameterized_game(s, x);
  const int n = pg.primal_dimension();
  log.primal_dimension = n;
  Vector hint = Vector::Zero(estimate_dimension(pg, solver));
  if (uses_multipliers(solver))
    hint.tail(pg.game.num_multipliers()) = initial_multipliers(pg.game, Vector::Zero(n));

  ReferenceResult ref;
  try {
    ref = reference_solution(pg, hint, solver, ropt);
  } catch (const NonIsolatedError& e) {
    throw NonIsolatedError(at_step(0, e.what()), e.witnesses());
  } catch (const SolverError& e) {
    throw SolverError(e.kind(), at_step(0, e.what()));
  }

  Vector v = ref.v;
  const double e0 = opt.e0 ? *opt.e0 : s.e0;
  if (e0 > 0.0) {
    std::normal_distribution<double> normal(0.0, 1.0);
    Vector dir(n);
    for (int k = 0; k < n; ++k) dir(k) = normal(rng);
    v.head(n) += e0 * dir.normalized();
  }

  for (int t = 0; t < s.t_end; ++t) {
    if (t > 0) pg = build_parameterized_game(s, x);
    TdoResult step;
    try {
      step = tdo_step(pg, v, K, solver, opt.solver);
      if (t > 0) {
        ropt.seed = seed + static_cast<std::uint64_t>(t);
        ref = reference_solution(pg, ref.v, solver, ropt);
      }
    } catch (const NonIsolatedError& e) {
      throw NonIsolatedError(at_step(t, e.what()), e.witnesses());
    } catch (const SolverError& e) {
      throw SolverError(e.kind(), at_step(t, e.what()));
    }

    ClosedLoopStep rec;
    rec.t = t;
    rec.x = x;
    rec.u = pg.select_inputs(step.v);
    rec.v = step.v;
    rec.v_star = ref.v;
    rec.e = (pg.primal(step.v) - pg.primal(ref.v)).norm();
    rec.residual = step.residual;
    const Vector x_next = plant_step(s, x, rec.u);
    if (!x_next.allFinite()) {
      log.steps.push_back(rec);
      log.x_final = x;
      throw ClosedLoopAborted(at_step(t, "plant state is not finite"), log);
    }
    rec.dx = (x_next - x).norm();
    log.steps.push_back(std::move(rec));
    v = step.v;
    x = x_next;
  }
  log.x_final = x;
  return log;
}

ContractionFit estimate_contraction(const ClosedLoopLog& log, double slack) {
  std::vector<int> idx;
  for (std::size_t t = 0; t + 1 < log.steps.size(); ++t)
    if (log.steps[t].e > 1e-12) idx.push_back(static_cast<int>(t));
  if (idx.size() < 20)
    throw EstimationError(EstimationError::Kind::TooFewPoints,
                          "contraction fit for K=" + std::to_string(log.K) +
                              " needs 20 steps with e > 1e-12, got " +
                              std::to_string(idx.size()));
  const int m = static_cast<int>(idx.size());
  Matrix X(m, 2);
  Vector y(m);
  for (int r = 0; r < m; ++r) {
    X(r, 0) = log.steps[idx[r]].e;
    X(r, 1) = log.steps[idx[r]].dx;
    y(r) = log.steps[idx[r] + 1].e;
  }
  const Vector coef = X.colPivHouseholderQr().solve(y);
  ContractionFit fit;
  fit.K = log.K;
  fit.alpha = coef(0);
  fit.theta = coef(1);
  fit.samples = m;
  fit.slack = slack;
  fit.sup_e = log.sup_e();
  for (int r = 0; r < m; ++r) {
    const double base = X.row(r).dot(coef);
    if (y(r) > slack * base) ++fit.violations;
    fit.required_slack = std::max(fit.required_slack, slack_needed(y(r), base));
  }
  return fit;
}

ContractionTable estimate_contraction(const std::vector<ClosedLoopLog>& logs, double slack) {
  ContractionTable table;
  for (const auto& log : logs) table.fits.push_back(estimate_contraction(log, slack));
  table.alpha_nonincreasing = table.theta_nonincreasing = table.sup_e_nonincreasing = true;
  for (std::size_t k = 1; k < table.fits.size(); ++k) {
    const auto& a = table.fits[k - 1];
    const auto& b = table.fits[k];
    if (b.alpha > a.alpha) table.alpha_nonincreasing = false;
    if (b.theta > a.theta) table.theta_nonincreasing = false;
    if (b.sup_e > a.sup_e) table.sup_e_nonincreasing = false;
  }
  return table;
}

LipschitzProbe lipschitz_probe(const ClosedLoopLog& log) {
  LipschitzProbe probe;
  for (std::size_t t = 0; t + 1 < log.steps.size(); ++t) {
    const double dx = log.steps[t].dx;
    if (dx <= 1e-12) continue;
    const auto& a = log.steps[t].v_star;
    const auto& b = log.steps[t + 1].v_star;
    const int n = log.primal_dimension > 0 ? log.primal_dimension
                                           : static_cast<int>(std::min(a.size(), b.size()));
    probe.ratios.push_back((b.head(n) - a.head(n)).norm() / dx);
  }
  if (probe.ratios.empty()) return probe;
  std::vector<double> sorted = probe.ratios;
  std::sort(sorted.begin(), sorted.end());
  probe.max_ratio = sorted.back();
  probe.median_ratio = sorted[sorted.size() / 2];
  probe.flagged = !std::isfinite(probe.max_ratio) || probe.max_ratio > 100.0 * probe.median_ratio;
  return probe;
}

}  // namespace nashnewton
