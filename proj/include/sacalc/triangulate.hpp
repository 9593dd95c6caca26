#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "sacalc/mesh.hpp"
#include "sacalc/saset.hpp"
#include "sacalc/smooth_map.hpp"

namespace sacalc {

/// f restricted to one simplex: a map from the standard simplex
/// {t in R^p : t_i >= 0, sum t_i <= 1} whose vertex k (origin, then unit
/// vectors) goes to the k-th vertex of the sorted simplex.
struct RealizationChart {
  int simplex_id = -1;
  SmoothMap map;
  /// Per facet (entry i omits vertex i): index into the bundle's boundary
  /// conditions the facet is snapped to, or -1.
  std::vector<int> facet_tags;
  bool affine = true;
};

struct TriangulationReport {
  int depth = 0;
  int refinement_depth = 0;
  std::size_t grid_simplices = 0;
  std::size_t kept = 0;
  std::size_t snapped_vertices = 0;
  int max_snap_iterations = 0;
  long total_snap_iterations = 0;
  std::vector<int> snap_failures;     // grid simplex ids
  std::vector<int> dropped_degenerate;  // grid simplex ids (or child ids after refine)
  std::size_t family_straddling = 0;
  std::size_t resnapped = 0;
  double mesh_size = 0.0;
  double volume_before = 0.0;  // refine only
  double volume_after = 0.0;
  std::size_t slivers = 0;  // common refinement only
  bool jittered = false;
};

/// The pair (K, f): a complex plus one realization chart per top simplex.
struct TriangulationBundle {
  SimplicialComplex complex;
  std::vector<RealizationChart> charts;  // indexed by top simplex id
  SAFormula formula;
  /// Leaves of the negation normal form of the formula, then of each family
  /// member. Snapping targets their zero sets.
  std::vector<SignCondition> boundary_conditions;
  std::size_t family_offset = 0;  // first family condition
  /// Conditions whose zero set contains the vertex (|p| <= kOnBoundaryTol).
  std::vector<std::vector<int>> vertex_tags;
  /// Per family member: top simplex ids whose barycenter lies in it.
  std::vector<std::vector<int>> strata;
  TriangulationReport report;

  int top_dim() const { return complex.dimension(); }
  /// Chart of any simplex, restricted from its lowest-id top coface.
  SmoothMap face_chart(int p, int id) const;
  double total_volume() const;
};

inline constexpr double kOnBoundaryTol = 1e-10;

struct TriangulateOptions {
  /// Grid shift as a fraction of one cell along each axis (empty: none).
  std::vector<double> grid_offset;
  /// Extra formulas whose boundaries are snapped too (compatibility family).
  std::vector<SAFormula> family;
  /// Throw SnapFailure instead of reporting non-converged snaps.
  bool strict = false;
};

SmoothMap affine_chart(std::span<const Vec> vertices);

/// Grid-and-snap triangulation of a boxed, full-dimensional set: a Kuhn
/// grid at resolution 2^depth, snapping of outside vertices of boundary
/// simplices onto the active boundary polynomial, and a barycenter
/// membership filter.
TriangulationBundle triangulate(const SAFormula& formula, int depth, const TriangulateOptions& options = {});

/// Edge-midpoint subdivision (p = 1, 2, 3); midpoints of boundary edges are
/// re-snapped onto the boundary condition their endpoints share.
TriangulationBundle refine(const TriangulationBundle& bundle);

struct OverlayOptions {
  double coincidence_tol = 1e-8;
  std::uint64_t seed = 0;
};

/// Overlay of two affine-chart bundles of the same formula: every pairwise
/// intersection of top simplices, triangulated by pulling from its lowest
/// vertex. `parents[i]` gives the (b1, b2) top simplex ids containing child i.
struct CommonRefinement {
  TriangulationBundle bundle;
  std::vector<std::pair<int, int>> parents;
};
CommonRefinement common_refinement(const TriangulationBundle& b1, const TriangulationBundle& b2,
                                   const OverlayOptions& options = {});

/// Largest disagreement between the two chart restrictions onto a shared
/// facet, over a deterministic sample of facet points.
double shared_face_mismatch(const TriangulationBundle& bundle, int samples_per_axis = 4);

/// Vertex tags from scratch (which boundary conditions vanish at each vertex).
std::vector<std::vector<int>> compute_vertex_tags(const SimplicialComplex& complex,
                                                  const std::vector<SignCondition>& conditions);

/// Moves x onto the common zero set of the given conditions: damped Newton for
/// one, alternating projection for several. Returns iterations, or -1 when it
/// fails to reach |p| < 1e-12 within the caps (50 / 200).
int snap_to_boundary(Vec& x, const std::vector<const Polynomial*>& polys);

}  // namespace sacalc
