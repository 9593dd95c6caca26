#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "sacalc/form.hpp"
#include "sacalc/mesh.hpp"
#include "sacalc/saset.hpp"

namespace sacalc {

/// A set document: formula with its declared box, plus optional extra
/// formulas whose boundaries triangulation should respect.
struct SetInput {
  SAFormula formula;
  std::vector<SAFormula> family;
};

/// {"dim": m, "box": [[lo, hi], ...], "formula": node, "family": [node, ...],
///  "truncate": false}
/// Nodes are {"and": [...]}, {"or": [...]}, {"not": node} or
/// {"poly": "x^2 + y^2 - 1", "rel": "<=0"}. "dim" defaults to the box size.
/// With "truncate": true the set is intersected with the box instead of the
/// box being checked against the set. Unknown keys are rejected; errors name
/// the offending field.
SetInput parse_set(std::string_view text);

/// {"degree": p, "dim": m, "terms": [["poly", [i0, .., ip-1]], ...]} with
/// 0-based coordinate indices; "dim" is optional and must equal `ambient`.
DifferentialForm parse_form(std::string_view text, std::size_t ambient);

/// {"schema": 1, "charts": [{"simplex": id, "map": ["poly", ...]}, ...]}:
/// polynomial maps in x1..xp (coordinates on the standard simplex) for top
/// simplices of `complex`. Simplices without an entry get the affine chart of
/// their mesh vertices.
std::vector<SmoothMap> parse_charts(std::string_view text, const SimplicialComplex& complex);

/// Whole file as a string; throws ParseError naming the path when unreadable.
std::string read_file(const std::string& path);

}  // namespace sacalc
