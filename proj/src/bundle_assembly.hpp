#pragma once

#include <vector>

#include "sacalc/triangulate.hpp"

namespace sacalc::detail {

/// Complex, affine charts, tags and strata from kept simplices over a vertex
/// pool. Unused pool vertices are dropped; the survivors keep their relative
/// order. `source_index`, when given, receives for each top simplex id the
/// index of the kept entry it came from.
TriangulationBundle assemble(const std::vector<Vec>& pool, const std::vector<Simplex>& kept,
                             const SAFormula& formula, std::vector<SignCondition> conditions,
                             std::size_t family_offset, const std::vector<SAFormula>& family,
                             TriangulationReport report, std::vector<int>* source_index);

}  // namespace sacalc::detail
