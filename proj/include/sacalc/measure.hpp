#pragma once

#include <cstddef>
#include <vector>

#include "sacalc/saset.hpp"

namespace sacalc {

/// Cube [origin, origin + side]^m cut into n^m closed cells of side side/n.
struct GridFrame {
  std::vector<double> origin;
  double side = 0.0;
};

/// Origin at the low corner of the declared box, side = its longest edge.
GridFrame grid_frame(const SAFormula& formula);

struct GridEntry {
  int n = 0;
  double delta = 0.0;  // √m · side / n
  long long optimistic = 0;   // cells with a confirmed intersection
  long long pessimistic = 0;  // every cell not excluded
  double v_optimistic = 0.0;  // count · delta^d
  double v_pessimistic = 0.0;
  /// count · (side / n)^d, i.e. v divided by m^(d/2).
  double normalized_optimistic = 0.0;
  double normalized_pessimistic = 0.0;
};

/// count · (√m · side / n)^d evaluated as m^(d/2) times the exact rational
/// count · side^d / n^d, so grid-aligned sets give exact values.
double grid_volume(long long count, std::size_t m, int d, double side, int n);

/// Counts cells meeting the set. A cell classified all-in counts for both
/// counts; a mixed cell counts as pessimistic, and as optimistic once two
/// levels of subdivision find an all-in part or an exact member sample on a
/// 5^m lattice (corners included) is found.
GridEntry grid_measure(const SAFormula& formula, const GridFrame& frame, int d, int n);

struct GridReport {
  std::size_t m = 0;
  int d = 0;
  double side = 0.0;
  std::vector<GridEntry> entries;
  double sup_pessimistic = 0.0;
  double sup_optimistic = 0.0;
  /// n values whose pessimistic v exceeds 1.5 times the supremum before it.
  std::vector<int> violations;
  bool bounded = true;
};

/// Requires a strictly increasing n list with n >= 1 and 0 <= d <= m.
GridReport grid_measure_sequence(const SAFormula& formula, const GridFrame& frame, int d, const std::vector<int>& ns);

}  // namespace sacalc
