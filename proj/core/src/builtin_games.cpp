#include "nashnewton/builtin_games.hpp"

#include <string>

namespace nashnewton {

namespace {

std::vector<int> offsets_of(const std::vector<int>& dims) {
  std::vector<int> off(dims.size());
  int total = 0;
  for (std::size_t i = 0; i < dims.size(); ++i) {
    off[i] = total;
    total += dims[i];
  }
  return off;
}

}  // namespace

void QuadraticGameData::validate() const {
  const std::size_t N = dims.size();
  if (N == 0) throw InputError("quadratic game needs at least one agent");
  if (Q.size() != N || c.size() != N)
    throw InputError("quadratic game needs N rows of Q blocks and N c vectors");
  for (std::size_t i = 0; i < N; ++i) {
    if (Q[i].size() != N) throw InputError("Q must have N blocks per row");
    if (c[i].size() != dims[i]) throw InputError("c_i has wrong length");
    for (std::size_t j = 0; j < N; ++j) {
      if (Q[i][j].rows() != dims[i] || Q[i][j].cols() != dims[j])
        throw InputError("Q block (" + std::to_string(i) + "," +
                         std::to_string(j) + ") has wrong shape");
      if (!Q[i][j].allFinite()) throw InputError("Q has non-finite entries");
    }
  }
}

Matrix QuadraticGameData::hessian() const {
  const auto off = offsets_of(dims);
  int n = 0;
  for (int d : dims) n += d;
  Matrix H(n, n);
  for (std::size_t i = 0; i < dims.size(); ++i)
    for (std::size_t j = 0; j < dims.size(); ++j) {
      if (i == j) {
        H.block(off[i], off[j], dims[i], dims[j]) =
            0.5 * (Q[i][i] + Q[i][i].transpose());
      } else {
        H.block(off[i], off[j], dims[i], dims[j]) = Q[i][j];
      }
    }
  return H;
}

GameProblem make_quadratic_game(const QuadraticGameData& data) {
  return make_quartic_game(data, QuarticTerms{});
}

GameProblem make_quartic_game(const QuadraticGameData& data,
                              const QuarticTerms& quartic) {
  data.validate();
  const int N = static_cast<int>(data.dims.size());
  const auto off = offsets_of(data.dims);
  const Matrix H = data.hessian();
  const int n = static_cast<int>(H.rows());

  const bool has_beta = !quartic.beta.empty();
  const bool has_gamma = !quartic.gamma.empty();
  if (has_beta && static_cast<int>(quartic.beta.size()) != N)
    throw InputError("quartic beta needs one entry per agent");
  if (has_gamma) {
    if (static_cast<int>(quartic.gamma.size()) != N)
      throw InputError("quartic gamma needs one entry per agent");
    for (int d : data.dims)
      if (d != data.dims[0])
        throw InputError("quartic cross terms need equal agent dimensions");
  }

  std::vector<AgentCost> costs(N);
  for (int i = 0; i < N; ++i) {
    const int oi = off[i];
    const int ni = data.dims[i];
    const Matrix row = H.middleRows(oi, ni);
    const Matrix Qii = H.block(oi, oi, ni, ni);
    const Vector ci = data.c[i];
    const double beta = has_beta ? quartic.beta[i] : 0.0;
    const double gamma = has_gamma ? quartic.gamma[i] : 0.0;
    const auto dims = data.dims;

    // sum over j != i of the elementwise square of a_j
    auto others_sq = [off, dims, N, i, ni](const Vector& a) {
      Vector s = Vector::Zero(ni);
      for (int j = 0; j < N; ++j)
        if (j != i) s += a.segment(off[j], dims[j]).array().square().matrix();
      return s;
    };

    costs[i].value = [=](const Vector& a) {
      const Vector ai = a.segment(oi, ni);
      double J = 0.5 * ai.dot(Qii * ai) + ci.dot(ai);
      for (int j = 0; j < N; ++j)
        if (j != i)
          J += ai.dot(row.middleCols(off[j], dims[j]) *
                      a.segment(off[j], dims[j]));
      J += 0.25 * beta * ai.array().pow(4).sum();
      if (gamma != 0.0) J += gamma * ai.dot(others_sq(a));
      return J;
    };
    costs[i].gradient = [=](const Vector& a) -> Vector {
      Vector g = row * a + ci;
      const Vector ai = a.segment(oi, ni);
      if (beta != 0.0) g += beta * ai.array().cube().matrix();
      if (gamma != 0.0) g += gamma * others_sq(a);
      return g;
    };
    costs[i].hessian_row = [=](const Vector& a) -> Matrix {
      Matrix h = row;
      const Vector ai = a.segment(oi, ni);
      if (beta != 0.0)
        h.middleCols(oi, ni).diagonal() +=
            3.0 * beta * ai.array().square().matrix();
      if (gamma != 0.0) {
        for (int j = 0; j < N; ++j)
          if (j != i)
            h.middleCols(off[j], dims[j]).diagonal() +=
                2.0 * gamma * a.segment(off[j], dims[j]);
      }
      return h;
    };
  }
  (void)n;
  return GameProblem(data.dims, std::move(costs));
}

ConstraintFunction make_constraint_function(
    const LinearRows& linear, const std::vector<QuadraticConstraintRow>& quad,
    int n) {
  if (linear.C.cols() != n && linear.count() > 0)
    throw InputError("linear constraint rows must have n columns");
  for (const auto& q : quad)
    if (q.P.rows() != n || q.P.cols() != n || q.r.size() != n)
      throw InputError("quadratic constraint row has wrong shape");
  if (quad.empty()) {
    if (linear.count() == 0) return ConstraintFunction::none(n);
    return ConstraintFunction::from_linear(linear);
  }

  const int ml = linear.count();
  const int m = ml + static_cast<int>(quad.size());
  std::vector<QuadraticConstraintRow> rows = quad;
  for (auto& q : rows) q.P = 0.5 * (q.P + q.P.transpose());
  const Matrix C = ml > 0 ? linear.C : Matrix(0, n);
  const Vector d = ml > 0 ? linear.d : Vector(0);

  ConstraintFunction g;
  g.count = m;
  g.value = [=](const Vector& a) -> Vector {
    Vector v(m);
    if (ml > 0) v.head(ml) = C * a - d;
    for (std::size_t r = 0; r < rows.size(); ++r)
      v(ml + r) = 0.5 * a.dot(rows[r].P * a) + rows[r].r.dot(a) + rows[r].s;
    return v;
  };
  g.jacobian = [=](const Vector& a) -> Matrix {
    Matrix J(m, n);
    if (ml > 0) J.topRows(ml) = C;
    for (std::size_t r = 0; r < rows.size(); ++r)
      J.row(ml + r) = (rows[r].P * a + rows[r].r).transpose();
    return J;
  };
  g.weighted_hessian = [=](const Vector&, const Vector& w) -> Matrix {
    Matrix Hs = Matrix::Zero(n, n);
    for (std::size_t r = 0; r < rows.size(); ++r) Hs += w(ml + r) * rows[r].P;
    return Hs;
  };
  return g;
}

QuadraticGameData semicopositive_game_data() {
  QuadraticGameData d;
  d.dims = {1, 1};
  d.Q = {{Matrix::Constant(1, 1, 1.0), Matrix::Constant(1, 1, -3.0)},
         {Matrix::Constant(1, 1, 1.0), Matrix::Constant(1, 1, 0.0)}};
  d.c = {Vector::Zero(1), Vector::Zero(1)};
  return d;
}

GameProblem analytic_shared_constraint_gne() {
  QuadraticGameData d;
  d.dims = {1, 1};
  d.Q = {{Matrix::Constant(1, 1, 1.0), Matrix::Zero(1, 1)},
         {Matrix::Zero(1, 1), Matrix::Constant(1, 1, 1.0)}};
  d.c = {Vector::Constant(1, -1.0), Vector::Constant(1, -1.0)};
  GameProblem game = make_quadratic_game(d);
  LinearRows shared{Matrix::Ones(1, 2), Vector::Ones(1)};
  game.with_constraints({ConstraintFunction::from_linear(shared),
                         ConstraintFunction::from_linear(shared)});
  return game;
}

GameProblem builtin_quartic_game(QuadraticGameData* data_out,
                                 QuarticTerms* quartic_out) {
  QuadraticGameData d;
  d.dims = {2, 2};
  const Matrix I = Matrix::Identity(2, 2);
  d.Q = {{1.0 * I, 0.5 * I}, {-0.5 * I, 1.0 * I}};
  d.c = {Vector(2), Vector(2)};
  d.c[0] << -1.0, 0.5;
  d.c[1] << 0.5, -1.0;
  QuarticTerms quartic{{12.0, 12.0}, {0.5, 0.5}};
  GameProblem game = make_quartic_game(d, quartic);
  game.with_region(FeasibleRegion(
      d.dims, {Box::uniform(2, -2.0, 2.0), Box::uniform(2, -2.0, 2.0)}));
  if (data_out) *data_out = d;
  if (quartic_out) *quartic_out = quartic;
  return game;
}

QuadraticGameData random_monotone_quadratic_game(const std::vector<int>& dims,
                                                 std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  const auto off = offsets_of(dims);
  int n = 0;
  for (int d : dims) n += d;

  Matrix B(n, n), K(n, n);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) {
      B(r, c) = normal(rng);
      K(r, c) = normal(rng);
    }
  Matrix S = B * B.transpose() / n + 0.5 * Matrix::Identity(n, n);
  Matrix skew = 0.5 * (K - K.transpose());
  for (std::size_t i = 0; i < dims.size(); ++i)
    skew.block(off[i], off[i], dims[i], dims[i]).setZero();
  const Matrix H = S + skew;

  QuadraticGameData data;
  data.dims = dims;
  data.Q.assign(dims.size(), std::vector<Matrix>(dims.size()));
  data.c.resize(dims.size());
  for (std::size_t i = 0; i < dims.size(); ++i) {
    for (std::size_t j = 0; j < dims.size(); ++j)
      data.Q[i][j] = H.block(off[i], off[j], dims[i], dims[j]);
    data.c[i].resize(dims[i]);
    for (int k = 0; k < dims[i]; ++k) data.c[i](k) = 1.5 * normal(rng);
  }
  return data;
}

GameProblem random_shared_constraint_game(const std::vector<int>& dims, int rows,
                                          std::mt19937_64& rng) {
  const QuadraticGameData data = random_monotone_quadratic_game(dims, rng);
  const Matrix H = data.hessian();
  const int n = static_cast<int>(H.rows());
  Vector c(n);
  int off = 0;
  for (const auto& ci : data.c) {
    c.segment(off, ci.size()) = ci;
    off += static_cast<int>(ci.size());
  }
  const Vector a_free = H.partialPivLu().solve(-c);

  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> cut(0.2, 1.0);
  LinearRows shared{Matrix(rows, n), Vector(rows)};
  // Normals are redrawn until they share a direction w with c_r'w <= -0.3,
  // so the set is a wedge of bounded aperture rather than a sliver between
  // nearly opposite rows.
  for (int attempt = 0;; ++attempt) {
    for (int r = 0; r < rows; ++r) {
      for (int k = 0; k < n; ++k) shared.C(r, k) = normal(rng);
      shared.C.row(r).normalize();
    }
    const Vector w = -shared.C.colwise().sum().transpose().normalized();
    if ((shared.C * w).maxCoeff() <= -0.3) break;
    if (attempt == 1000) throw InputError("could not place well-conditioned shared rows");
  }
  for (int r = 0; r < rows; ++r) shared.d(r) = shared.C.row(r).dot(a_free) - cut(rng);
  GameProblem game = make_quadratic_game(data);
  game.with_constraints(std::vector<ConstraintFunction>(
      dims.size(), ConstraintFunction::from_linear(shared)));
  return game;
}

}  // namespace nashnewton
