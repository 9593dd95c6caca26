#include "sacalc/measure.hpp"

#include <gmpxx.h>

#include <algorithm>
#include <cmath>

#include "sacalc/errors.hpp"

namespace sacalc {

GridFrame grid_frame(const SAFormula& formula) {
  if (!formula.box()) throw InvalidArgument("grid measure needs a declared bounding box");
  GridFrame f;
  for (const auto& iv : *formula.box()) {
    f.origin.push_back(iv.lo);
    f.side = std::max(f.side, iv.hi - iv.lo);
  }
  if (!(f.side > 0.0)) throw InvalidArgument("grid measure needs a box of positive size");
  return f;
}

double grid_volume(long long count, std::size_t m, int d, double side, int n) {
  mpq_class scaled(static_cast<long>(count));
  const mpq_class ratio = mpq_class(side) / n;
  for (int i = 0; i < d; ++i) scaled *= ratio;
  // m^(d/2): exact integer power times one square root when d is odd.
  double factor = 1.0;
  for (int i = 0; i < d / 2; ++i) factor *= static_cast<double>(m);
  if (d % 2 == 1) factor *= std::sqrt(static_cast<double>(m));
  return factor * scaled.get_d();
}

namespace {

bool confirm(const SAFormula& f, const Box& cell, int levels) {
  const std::size_t m = cell.size();
  if (levels > 0) {
    for (std::size_t mask = 0; mask < (std::size_t{1} << m); ++mask) {
      Box child(m);
      for (std::size_t i = 0; i < m; ++i) {
        const double mid = 0.5 * (cell[i].lo + cell[i].hi);
        child[i] = (mask >> i) & 1U ? Interval{mid, cell[i].hi} : Interval{cell[i].lo, mid};
      }
      const BoxClass c = f.classify_box(child);
      if (c == BoxClass::AllIn) return true;
      if (c == BoxClass::Mixed && confirm(f, child, levels - 1)) return true;
    }
    return false;
  }
  std::vector<int> idx(m, 0);
  std::vector<double> x(m);
  while (true) {
    for (std::size_t i = 0; i < m; ++i) x[i] = cell[i].lo + (cell[i].hi - cell[i].lo) * idx[i] / 4.0;
    if (f.contains(x)) return true;
    std::size_t k = 0;
    while (k < m && ++idx[k] == 5) idx[k++] = 0;
    if (k == m) return false;
  }
}

}  // namespace

GridEntry grid_measure(const SAFormula& formula, const GridFrame& frame, int d, int n) {
  const std::size_t m = formula.dim();
  if (frame.origin.size() != m) throw DimensionMismatch("grid measure: frame and formula dimensions differ");
  if (d < 0 || static_cast<std::size_t>(d) > m) throw InvalidArgument("grid measure: need 0 <= d <= m");
  if (n < 1) throw InvalidArgument("grid measure: need n >= 1");
  if (formula.box()) {
    for (std::size_t i = 0; i < m; ++i) {
      const auto& iv = (*formula.box())[i];
      if (iv.lo < frame.origin[i] || iv.hi > frame.origin[i] + frame.side) {
        throw InvalidArgument("grid measure: declared box leaves the grid cube");
      }
    }
  }
  GridEntry e;
  e.n = n;
  e.delta = std::sqrt(static_cast<double>(m)) * frame.side / n;
  std::vector<int> idx(m, 0);
  Box cell(m);
  if (m == 0) return e;
  while (true) {
    for (std::size_t i = 0; i < m; ++i) {
      cell[i] = {frame.origin[i] + frame.side * idx[i] / n, frame.origin[i] + frame.side * (idx[i] + 1) / n};
    }
    const BoxClass c = formula.classify_box(cell);
    if (c == BoxClass::AllIn) {
      ++e.optimistic;
      ++e.pessimistic;
    } else if (c == BoxClass::Mixed) {
      ++e.pessimistic;
      if (confirm(formula, cell, 2)) ++e.optimistic;
    }
    std::size_t k = 0;
    while (k < m && ++idx[k] == n) idx[k++] = 0;
    if (k == m) break;
  }
  e.v_optimistic = grid_volume(e.optimistic, m, d, frame.side, n);
  e.v_pessimistic = grid_volume(e.pessimistic, m, d, frame.side, n);
  e.normalized_optimistic = grid_volume(e.optimistic, 1, d, frame.side, n);
  e.normalized_pessimistic = grid_volume(e.pessimistic, 1, d, frame.side, n);
  return e;
}

GridReport grid_measure_sequence(const SAFormula& formula, const GridFrame& frame, int d, const std::vector<int>& ns) {
  if (ns.empty()) throw InvalidArgument("grid measure: empty n list");
  for (std::size_t i = 0; i < ns.size(); ++i) {
    if (ns[i] < 1 || (i > 0 && ns[i] <= ns[i - 1])) throw InvalidArgument("grid measure: n list must increase from 1");
  }
  GridReport r;
  r.m = formula.dim();
  r.d = d;
  r.side = frame.side;
  for (int n : ns) {
    GridEntry e = grid_measure(formula, frame, d, n);
    if (!r.entries.empty() && e.v_pessimistic > 1.5 * r.sup_pessimistic) {
      r.violations.push_back(n);
      r.bounded = false;
    }
    r.sup_pessimistic = std::max(r.sup_pessimistic, e.v_pessimistic);
    r.sup_optimistic = std::max(r.sup_optimistic, e.v_optimistic);
    r.entries.push_back(e);
  }
  return r;
}

}  // namespace sacalc
