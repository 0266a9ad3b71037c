#pragma once

#include "nashnewton/types.hpp"

#include <optional>
#include <variant>
#include <vector>

namespace nashnewton {

/// Componentwise bounds; entries may be +/-infinity.
struct Box {
  Vector lower;
  Vector upper;

  static Box unbounded(int dim);
  static Box uniform(int dim, double lower, double upper);
};

/// { x : A x <= b }.
struct Polyhedron {
  Matrix A;
  Vector b;
};

/// Per-agent strategy set. Compactness and convexity are the caller's
/// responsibility; only shape and finiteness are validated.
using FeasibleSet = std::variant<Box, Polyhedron>;

int set_dimension(const FeasibleSet& set);
void validate_set(const FeasibleSet& set);

/// Stacked inequality rows C x <= d.
struct LinearRows {
  Matrix C;
  Vector d;

  int count() const { return static_cast<int>(d.size()); }
};

/// Euclidean projection onto { x : C x <= d }.
Vector project_onto_rows(const LinearRows& rows, const Vector& y);

/// Product of per-agent sets, optionally intersected with joint linear
/// constraints over the full stacked vector.
class FeasibleRegion {
 public:
  FeasibleRegion() = default;
  FeasibleRegion(std::vector<int> dims, std::vector<FeasibleSet> blocks,
                 std::optional<Polyhedron> coupled = std::nullopt);

  /// The whole space R^n split into the given agent blocks.
  static FeasibleRegion unconstrained(std::vector<int> dims);

  int dimension() const { return total_; }
  int num_blocks() const { return static_cast<int>(blocks_.size()); }
  const std::vector<int>& dims() const { return dims_; }
  int offset(int block) const { return offsets_[block]; }
  const FeasibleSet& block_set(int block) const { return blocks_[block]; }
  const std::optional<Polyhedron>& coupled() const { return coupled_; }

  /// True when every block is a Box and there are no joint constraints.
  bool is_box() const;
  bool has_coupled() const { return coupled_.has_value(); }

  /// Stacked bounds; only meaningful when is_box().
  Vector lower() const;
  Vector upper() const;

  /// All finite constraints of the region as rows C x <= d.
  LinearRows rows() const;

  Vector project(const Vector& y) const;
  bool contains(const Vector& x, double tol) const;
  /// Largest constraint violation (0 when feasible).
  double violation(const Vector& x) const;

  /// Agent-local region. Throws InputError if the region has joint
  /// constraints, which do not decompose per agent.
  FeasibleRegion block_region(int block) const;

 private:
  std::vector<int> dims_;
  std::vector<int> offsets_;
  std::vector<FeasibleSet> blocks_;
  std::optional<Polyhedron> coupled_;
  int total_ = 0;
};

}  // namespace nashnewton
