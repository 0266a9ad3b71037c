#include "nashnewton/harness/problem_io.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>

namespace nashnewton::harness {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double json_number(const Json& j, const std::string& field) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf" || s == "+inf") return kInf;
    if (s == "-inf") return -kInf;
  }
  throw InputError(field + ": expected a number, got " + j.dump());
}

const Json& require(const Json& doc, const std::string& key, const std::string& where) {
  if (!doc.is_object() || !doc.contains(key))
    throw InputError(where + ": missing field \"" + key + "\"");
  return doc.at(key);
}

std::pair<int, int> line_column(const std::string& text, std::size_t byte) {
  int line = 1, col = 1;
  for (std::size_t k = 0; k < byte && k < text.size(); ++k) {
    if (text[k] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

LinearRows json_to_rows(const Json& j, const std::string& field,
                        const char* mat = "C", const char* rhs = "d") {
  LinearRows rows{json_to_matrix(require(j, mat, field), field + "." + mat),
                  json_to_vector(require(j, rhs, field), field + "." + rhs)};
  if (rows.C.rows() != rows.d.size())
    throw InputError(field + ": row count of " + mat + " and length of " + rhs + " differ");
  return rows;
}

FeasibleSet json_to_set(const Json& j, const std::string& field) {
  if (j.contains("box")) {
    const auto& b = j.at("box");
    return Box{json_to_vector(require(b, "lower", field), field + ".box.lower"),
               json_to_vector(require(b, "upper", field), field + ".box.upper")};
  }
  if (j.contains("polyhedron")) {
    const auto rows = json_to_rows(j.at("polyhedron"), field + ".polyhedron", "A", "b");
    return Polyhedron{rows.C, rows.d};
  }
  throw InputError(field + ": expected \"box\" or \"polyhedron\"");
}

std::vector<int> json_dims(const Json& j, const std::string& field) {
  if (!j.is_array() || j.empty()) throw InputError(field + ": expected a nonempty array");
  std::vector<int> dims;
  for (const auto& d : j) {
    if (!d.is_number_integer() || d.get<int>() <= 0)
      throw InputError(field + ": dimensions must be positive integers");
    dims.push_back(d.get<int>());
  }
  return dims;
}

LoadedGame random_game(const Json& r) {
  const auto dims = json_dims(require(r, "dims", "random"), "random.dims");
  const auto seed = require(r, "seed", "random").get<std::uint64_t>();
  const int shared = r.value("shared_rows", 0);
  std::mt19937_64 rng(seed);
  if (shared > 0) {
    return LoadedGame{random_shared_constraint_game(dims, shared, rng), "random_shared", {}, {}, {}};
  }
  QuadraticGameData data = random_monotone_quadratic_game(dims, rng);
  GameProblem game = make_quadratic_game(data);
  if (r.contains("box")) {
    const auto& b = r.at("box");
    if (!b.is_array() || b.size() != 2) throw InputError("random.box: expected [lo, hi]");
    std::vector<FeasibleSet> sets;
    for (int d : dims)
      sets.emplace_back(Box::uniform(d, json_number(b[0], "random.box"),
                                     json_number(b[1], "random.box")));
    game.with_region(FeasibleRegion(dims, sets));
  }
  return LoadedGame{std::move(game), "random_quadratic", data, {}, {}};
}

LoadedGame builtin_game(const std::string& name) {
  if (name == "quartic") return {builtin_quartic_game(), name, {}, {}, {}};
  if (name == "semicopositive") {
    const auto data = semicopositive_game_data();
    return {make_quadratic_game(data), name, data, {}, {}};
  }
  if (name == "analytic_gne") {
    Vector z(4);
    z << 0.5, 0.5, 0.5, 0.5;
    return {analytic_shared_constraint_gne(), name, {}, z, {}};
  }
  throw InputError("builtin: unknown game \"" + name + "\"");
}

}  // namespace

Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    const auto [line, col] = line_column(text, e.byte == 0 ? 0 : e.byte - 1);
    std::string msg = e.what();
    if (const auto p = msg.find("parse error"); p != std::string::npos) msg = msg.substr(p);
    throw InputError(path.string() + ":" + std::to_string(line) + ":" + std::to_string(col) +
                     ": " + msg);
  }
}

Vector json_to_vector(const Json& j, const std::string& field) {
  if (!j.is_array()) throw InputError(field + ": expected an array");
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t k = 0; k < j.size(); ++k)
    v(static_cast<Eigen::Index>(k)) = json_number(j[k], field + "[" + std::to_string(k) + "]");
  return v;
}

Matrix json_to_matrix(const Json& j, const std::string& field) {
  if (!j.is_array()) throw InputError(field + ": expected an array of rows");
  if (j.empty()) return Matrix(0, 0);
  const std::size_t cols = j[0].is_array() ? j[0].size() : 0;
  Matrix m(static_cast<Eigen::Index>(j.size()), static_cast<Eigen::Index>(cols));
  for (std::size_t r = 0; r < j.size(); ++r) {
    if (!j[r].is_array() || j[r].size() != cols)
      throw InputError(field + ": rows must be arrays of equal length");
    for (std::size_t c = 0; c < cols; ++c)
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = json_number(
          j[r][c], field + "[" + std::to_string(r) + "][" + std::to_string(c) + "]");
  }
  return m;
}

Json vector_to_json(const Vector& v) {
  Json out = Json::array();
  for (Eigen::Index k = 0; k < v.size(); ++k) {
    if (std::isinf(v(k)))
      out.push_back(v(k) > 0 ? "inf" : "-inf");
    else
      out.push_back(v(k));
  }
  return out;
}

Json matrix_to_json(const Matrix& m) {
  Json out = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) out.push_back(vector_to_json(m.row(r).transpose()));
  return out;
}

LoadedGame parse_game(const Json& doc) {
  if (!doc.is_object()) throw InputError("game: expected an object");
  LoadedGame out = [&] {
    if (doc.contains("builtin")) return builtin_game(doc.at("builtin").get<std::string>());
    if (doc.contains("random")) return random_game(doc.at("random"));

    QuadraticGameData data;
    data.dims = json_dims(require(doc, "dims", "game"), "dims");
    const int N = static_cast<int>(data.dims.size());
    const auto& Q = require(doc, "Q", "game");
    const auto& c = require(doc, "c", "game");
    if (!Q.is_array() || static_cast<int>(Q.size()) != N)
      throw InputError("Q: expected one row of blocks per agent");
    if (!c.is_array() || static_cast<int>(c.size()) != N)
      throw InputError("c: expected one vector per agent");
    data.Q.resize(N);
    for (int i = 0; i < N; ++i) {
      if (!Q[i].is_array() || static_cast<int>(Q[i].size()) != N)
        throw InputError("Q[" + std::to_string(i) + "]: expected one block per agent");
      for (int j = 0; j < N; ++j)
        data.Q[i].push_back(json_to_matrix(
            Q[i][j], "Q[" + std::to_string(i) + "][" + std::to_string(j) + "]"));
      data.c.push_back(json_to_vector(c[i], "c[" + std::to_string(i) + "]"));
    }
    data.validate();

    LoadedGame g{make_quadratic_game(data), doc.value("name", "game"), data, {}, {}};
    if (doc.contains("quartic")) {
      const auto& q = doc.at("quartic");
      QuarticTerms terms;
      if (q.contains("beta"))
        for (double b : json_to_vector(q.at("beta"), "quartic.beta")) terms.beta.push_back(b);
      if (q.contains("gamma"))
        for (double b : json_to_vector(q.at("gamma"), "quartic.gamma")) terms.gamma.push_back(b);
      g.game = make_quartic_game(data, terms);
      g.quadratic.reset();
    }

    const int n = g.game.dimension();
    if (doc.contains("sets") || doc.contains("coupled")) {
      std::vector<FeasibleSet> sets;
      if (doc.contains("sets")) {
        const auto& s = doc.at("sets");
        if (!s.is_array() || static_cast<int>(s.size()) != N)
          throw InputError("sets: expected one set per agent");
        for (int i = 0; i < N; ++i) sets.push_back(json_to_set(s[i], "sets[" + std::to_string(i) + "]"));
      } else {
        for (int d : data.dims) sets.emplace_back(Box::unbounded(d));
      }
      std::optional<Polyhedron> coupled;
      if (doc.contains("coupled")) {
        const auto rows = json_to_rows(doc.at("coupled"), "coupled", "A", "b");
        coupled = Polyhedron{rows.C, rows.d};
      }
      g.game.with_region(FeasibleRegion(data.dims, sets, coupled));
    }

    if (doc.contains("constraints") && doc.contains("shared"))
      throw InputError("game: give either \"constraints\" or \"shared\", not both");
    if (doc.contains("shared")) {
      const auto rows = json_to_rows(doc.at("shared"), "shared");
      std::vector<ConstraintFunction> cons(N, ConstraintFunction::from_linear(rows));
      g.game.with_constraints(cons);
    } else if (doc.contains("constraints")) {
      const auto& cj = doc.at("constraints");
      if (!cj.is_array() || static_cast<int>(cj.size()) != N)
        throw InputError("constraints: expected one block per agent");
      std::vector<ConstraintFunction> cons;
      for (int i = 0; i < N; ++i) {
        const std::string where = "constraints[" + std::to_string(i) + "]";
        LinearRows lin{Matrix(0, n), Vector(0)};
        if (cj[i].contains("C")) lin = json_to_rows(cj[i], where);
        std::vector<QuadraticConstraintRow> quad;
        if (cj[i].contains("quadratic"))
          for (const auto& row : cj[i].at("quadratic"))
            quad.push_back({json_to_matrix(require(row, "P", where), where + ".P"),
                            json_to_vector(require(row, "r", where), where + ".r"),
                            json_number(row.value("s", Json(0.0)), where + ".s")});
        cons.push_back(make_constraint_function(lin, quad, n));
      }
      g.game.with_constraints(cons);
    }
    return g;
  }();
  if (doc.contains("solution")) out.solution = json_to_vector(doc.at("solution"), "solution");
  if (doc.contains("name")) out.name = doc.at("name").get<std::string>();
  out.canonical = doc.dump();
  return out;
}

LoadedGame load_game(const std::filesystem::path& path) {
  try {
    return parse_game(read_json_file(path));
  } catch (const Json::exception& e) {
    throw InputError(path.string() + ": " + e.what());
  } catch (const InputError& e) {
    const std::string what = e.what();
    if (what.rfind(path.string(), 0) == 0) throw;
    throw InputError(path.string() + ": " + what);
  }
}

Json quadratic_game_to_json(const QuadraticGameData& data, const FeasibleRegion& region) {
  Json doc;
  doc["dims"] = data.dims;
  Json Q = Json::array();
  for (const auto& row : data.Q) {
    Json blocks = Json::array();
    for (const auto& b : row) blocks.push_back(matrix_to_json(b));
    Q.push_back(blocks);
  }
  doc["Q"] = Q;
  Json c = Json::array();
  for (const auto& ci : data.c) c.push_back(vector_to_json(ci));
  doc["c"] = c;
  Json sets = Json::array();
  for (int i = 0; i < region.num_blocks(); ++i) {
    const auto& s = region.block_set(i);
    if (const auto* b = std::get_if<Box>(&s)) {
      sets.push_back({{"box", {{"lower", vector_to_json(b->lower)},
                               {"upper", vector_to_json(b->upper)}}}});
    } else {
      const auto& p = std::get<Polyhedron>(s);
      sets.push_back({{"polyhedron", {{"A", matrix_to_json(p.A)}, {"b", vector_to_json(p.b)}}}});
    }
  }
  doc["sets"] = sets;
  if (region.coupled())
    doc["coupled"] = {{"A", matrix_to_json(region.coupled()->A)},
                      {"b", vector_to_json(region.coupled()->b)}};
  return doc;
}

MpcScenario parse_scenario(const Json& doc) {
  if (!doc.is_object()) throw InputError("scenario: expected an object");
  MpcScenario s;
  if (doc.contains("builtin")) {
    const auto name = doc.at("builtin").get<std::string>();
    if (name != "pursuit") throw InputError("builtin: unknown scenario \"" + name + "\"");
    s = builtin_pursuit_scenario();
  }
  if (doc.contains("agents")) {
    s.agents.clear();
    int i = 0;
    for (const auto& a : doc.at("agents")) {
      const std::string where = "agents[" + std::to_string(i++) + "]";
      MpcAgent ag;
      ag.A = json_to_matrix(require(a, "A", where), where + ".A");
      ag.B = json_to_matrix(require(a, "B", where), where + ".B");
      ag.Q = json_to_matrix(require(a, "Q", where), where + ".Q");
      ag.R = json_to_matrix(require(a, "R", where), where + ".R");
      ag.P = a.contains("P") ? json_to_matrix(a.at("P"), where + ".P") : ag.Q;
      if (a.contains("u_lower")) ag.u_lower = json_to_vector(a.at("u_lower"), where + ".u_lower");
      if (a.contains("u_upper")) ag.u_upper = json_to_vector(a.at("u_upper"), where + ".u_upper");
      s.agents.push_back(std::move(ag));
    }
    if (!doc.contains("pursuit")) {
      const auto N = static_cast<Eigen::Index>(s.agents.size());
      s.pursuit = Matrix::Zero(N, N);
    }
  }
  if (doc.contains("pursuit")) s.pursuit = json_to_matrix(doc.at("pursuit"), "pursuit");
  if (doc.contains("shared_state")) s.shared_state = json_to_rows(doc.at("shared_state"), "shared_state");
  if (doc.contains("multiple_shooting")) s.multiple_shooting = doc.at("multiple_shooting").get<bool>();
  if (doc.contains("horizon")) s.horizon = doc.at("horizon").get<int>();
  if (doc.contains("x0")) s.x0 = json_to_vector(doc.at("x0"), "x0");
  if (doc.contains("K")) s.budgets = doc.at("K").get<std::vector<int>>();
  if (doc.contains("t_end")) s.t_end = doc.at("t_end").get<int>();
  if (doc.contains("e0")) s.e0 = json_number(doc.at("e0"), "e0");
  if (doc.contains("seed")) s.seed = doc.at("seed").get<std::uint64_t>();
  s.validate();
  return s;
}

MpcScenario load_scenario(const std::filesystem::path& path) {
  try {
    return parse_scenario(read_json_file(path));
  } catch (const Json::exception& e) {
    throw InputError(path.string() + ": " + e.what());
  } catch (const InputError& e) {
    const std::string what = e.what();
    if (what.rfind(path.string(), 0) == 0) throw;
    throw InputError(path.string() + ": " + what);
  }
}

}  // namespace nashnewton::harness
