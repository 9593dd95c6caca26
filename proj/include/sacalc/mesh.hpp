#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sacalc/smooth_map.hpp"

namespace sacalc {

using Simplex = std::vector<int>;  // ascending vertex ids

/// Relative non-degeneracy threshold: volume > kDegeneracyTolerance * diameter^p.
inline constexpr double kDegeneracyTolerance = 1e-12;

/// p-dimensional volume of the simplex spanned by `points` (p+1 of them).
double simplex_volume(std::span<const Vec> points);
double simplex_diameter(std::span<const Vec> points);
bool is_nondegenerate(std::span<const Vec> points);

/// Finite simplicial complex with vertex coordinates in R^N.
///
/// Built from a list of maximal simplices, closed under faces. Simplices of
/// each dimension are stored in lexicographic order, which fixes their ids;
/// every vertex is a 0-simplex whose id equals its vertex index. Immutable
/// after construction.
class SimplicialComplex {
 public:
  SimplicialComplex() = default;
  /// Throws DegenerateSimplex for a maximal simplex below the volume threshold.
  SimplicialComplex(std::vector<Vec> vertices, std::vector<Simplex> maximal);

  std::size_t ambient_dim() const { return ambient_; }
  int dimension() const { return static_cast<int>(by_dim_.size()) - 1; }
  const std::vector<Vec>& vertices() const { return vertices_; }
  std::size_t count(int p) const;
  const std::vector<Simplex>& simplices(int p) const;
  const Simplex& simplex(int p, int id) const { return by_dim_.at(static_cast<std::size_t>(p)).at(static_cast<std::size_t>(id)); }
  std::optional<int> find(const Simplex& s) const;
  int id(const Simplex& s) const;

  /// (p-1)-faces of simplex (p, id); entry i omits vertex i.
  const std::vector<int>& faces(int p, int id) const;
  /// (p+1)-simplices having (p, id) as a face, ascending.
  const std::vector<int>& cofaces(int p, int id) const;

  std::vector<Vec> points(int p, int id) const;
  double volume(int p, int id) const;
  /// Simplices that are not a face of any other simplex, by dimension then id.
  std::vector<std::pair<int, int>> maximal() const;

 private:
  std::size_t ambient_ = 0;
  std::vector<Vec> vertices_;
  std::vector<std::vector<Simplex>> by_dim_;
  std::vector<std::map<Simplex, int>> index_;
  std::vector<std::vector<std::vector<int>>> faces_;
  std::vector<std::vector<std::vector<int>>> cofaces_;
};

/// Integer chain on the p-simplices of one complex.
struct Chain {
  int dim = 0;
  std::map<int, long> coeffs;

  void add(int id, long c);
  Chain negated() const;
  bool is_zero() const { return coeffs.empty(); }
  friend bool operator==(const Chain&, const Chain&) = default;
};

/// Alternating-sign simplicial boundary. Requires dim >= 1.
Chain boundary_chain(const SimplicialComplex& complex, const Chain& chain);

/// ±1 coefficients on every p-simplex making interior (p-1)-faces cancel in
/// the boundary. Breadth-first over face adjacency, ascending ids; each
/// connected component is seeded by its lowest simplex, oriented by the sign
/// of its vertex determinant when p equals the ambient dimension.
/// Throws NonManifold (a face on 3+ simplices) or NonOrientable.
Chain orient_fundamental(const SimplicialComplex& complex, int p);

struct MeshFile {
  SimplicialComplex complex;
  /// Orientation signs of maximal simplices that carried one, keyed by
  /// (dimension, id).
  std::map<std::pair<int, int>, int> orientation;

  /// Orientation signs of dimension p as a chain (missing signs count as +1).
  Chain orientation_chain(int p) const;
};

/// Text mesh format: `dim N`, then `v x1 .. xN` lines, then `s p i0 .. ip [+|-]`.
/// Coordinates use shortest round-trip formatting, so write(read(write(x)))
/// reproduces write(x) byte for byte.
std::string write_mesh(const SimplicialComplex& complex, const Chain* orientation = nullptr);
MeshFile read_mesh(std::string_view text);

}  // namespace sacalc
