#pragma once

#include <vector>

#include "sacalc/mesh.hpp"
#include "sacalc/panelbeat.hpp"

namespace sacalc {

/// Certifies per-simplex charts of a mesh (maps from the standard simplex).
///
/// Every top simplex gets one probe per facet, at the facet barycenter of the
/// standard simplex, pointing inward, with the facet edges as tangential
/// directions. When the complex is full-dimensional, each interior facet also
/// gets a jump series ‖J_σ − J_τ‖ between the two realization maps written in
/// mesh coordinates, sampled at the same offsets on either side.
/// `charts[i]` belongs to top simplex i.
C1Report certify_charts(const SimplicialComplex& complex, const std::vector<SmoothMap>& charts,
                        const std::vector<double>& offsets, double tolerance);

}  // namespace sacalc
