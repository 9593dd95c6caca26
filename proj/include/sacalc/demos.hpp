#pragma once

#include <string>
#include <vector>

#include "sacalc/panelbeat.hpp"

namespace sacalc {

/// A map with a singular stratum, the tube around that stratum and the
/// growth exponent the map has there.
struct DemoProblem {
  std::string name;
  SmoothMap map;
  TubeChart tube;
  double alpha = 0.0;
  double margin = 0.5;
};

/// "sqrt": t ↦ √t on t >= 0 at the point 0 (α = 1/2).
/// "cusp": t ↦ (|t|^(2/3), t) at 0, two-sided (α = 2/3).
/// "abs":  (x, u) ↦ (x, |u|) along the x-axis, x in [-2, 2] (α = 1).
/// Throws InvalidArgument for any other name.
DemoProblem demo_problem(const std::string& name);
std::vector<std::string> demo_names();

/// (x, u) ↦ (x, √|u|), (x, u) and (x, u²) along the x-axis: α = 1/2, 1, 2.
std::vector<DemoProblem> growth_examples();

/// Offsets 1e-1 .. 1e-6, four per decade, used to estimate growth.
std::vector<double> demo_schedule();

}  // namespace sacalc
