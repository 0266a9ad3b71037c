#pragma once

#include "nashnewton/builtin_games.hpp"
#include "nashnewton/mpc.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <optional>
#include <string>

namespace nashnewton::harness {

using Json = nlohmann::json;

/// Reads a JSON document. Syntax errors become InputError with
/// "path:line:column: message".
Json read_json_file(const std::filesystem::path& path);

/// Matrices are arrays of rows; vectors are arrays. Entries may be numbers
/// or the strings "inf" / "-inf". `field` names the value in error messages.
Vector json_to_vector(const Json& j, const std::string& field);
Matrix json_to_matrix(const Json& j, const std::string& field);
Json vector_to_json(const Vector& v);
Json matrix_to_json(const Matrix& m);

/// A game read from a definition file.
struct LoadedGame {
  GameProblem game;
  std::string name;
  /// Present for purely quadratic games (affine pseudogradient).
  std::optional<QuadraticGameData> quadratic;
  /// Known primal (or stacked primal-dual) solution, if the file gives one.
  std::optional<Vector> solution;
  /// Canonical serialization, used for cache keys and report stamps.
  std::string canonical;

  bool affine() const { return quadratic.has_value(); }
};

/// Game document fields:
///   "builtin": "quartic" | "semicopositive" | "analytic_gne"  (other fields ignored)
///   or
///   "dims": [n_1, ...], "Q": [[Q_11, Q_12, ...], ...], "c": [c_1, ...],
///   "quartic": {"beta": [...], "gamma": [...]}            optional
///   "sets": [{"box": {"lower": v, "upper": v}}
///            | {"polyhedron": {"A": M, "b": v}}, ...]      optional
///   "coupled": {"A": M, "b": v}                            optional
///   "constraints": [{"C": M, "d": v,
///                    "quadratic": [{"P": M, "r": v, "s": x}]}, ...]  optional
///   "shared": {"C": M, "d": v}     every agent registers the same rows
///   "solution": v                  optional known solution
/// A document may also be {"random": {"dims": [...], "seed": s,
/// "box": [lo, hi], "shared_rows": m}} for a seeded random game.
LoadedGame parse_game(const Json& doc);
LoadedGame load_game(const std::filesystem::path& path);

/// Definition document for a quadratic game over per-agent boxes.
Json quadratic_game_to_json(const QuadraticGameData& data, const FeasibleRegion& region);

/// Scenario document fields: "builtin": "pursuit" (remaining fields
/// override it), "agents": [{"A","B","Q","R","P","u_lower","u_upper"}],
/// "pursuit": M, "shared_state": {"C","d"}, "multiple_shooting": bool,
/// "horizon", "x0", "K", "t_end", "e0", "seed".
MpcScenario parse_scenario(const Json& doc);
MpcScenario load_scenario(const std::filesystem::path& path);

}  // namespace nashnewton::harness
