#include "sacalc/demos.hpp"

#include <cmath>
#include <limits>

#include "sacalc/errors.hpp"

namespace sacalc {

namespace {

TubeChart point_tube() {
  SmoothMap origin(0, 1, [](const Vec&) { return Vec::Zero(1).eval(); });
  return TubeChart(std::move(origin), Box{}, 1.0);
}

TubeChart axis_tube() {
  Mat linear = Mat::Zero(2, 1);
  linear(0, 0) = 1.0;
  return TubeChart(SmoothMap::affine(Vec::Zero(2), linear), Box{Interval{-2.0, 2.0}}, 1.0);
}

// (x, u) ↦ (x, h(u)) with h' given in closed form away from u = 0.
SmoothMap vertical(double (*h)(double), double (*dh)(double)) {
  auto eval = [h](const Vec& y) {
    Vec out(2);
    out << y[0], h(y[1]);
    return out;
  };
  auto jac = [dh](const Vec& y) -> std::optional<Mat> {
    const double s = dh(y[1]);
    if (!std::isfinite(s)) return std::nullopt;
    Mat j = Mat::Zero(2, 2);
    j(0, 0) = 1.0;
    j(1, 1) = s;
    return j;
  };
  return SmoothMap(2, 2, eval, jac);
}

double root_abs(double u) { return std::sqrt(std::abs(u)); }
double root_abs_slope(double u) {
  return u == 0.0 ? std::numeric_limits<double>::quiet_NaN() : std::copysign(0.5 / std::sqrt(std::abs(u)), u);
}
double same(double u) { return u; }
double one(double) { return 1.0; }
double square(double u) { return u * u; }
double twice(double u) { return 2.0 * u; }
double absolute(double u) { return std::abs(u); }
double sign(double u) { return u == 0.0 ? std::numeric_limits<double>::quiet_NaN() : std::copysign(1.0, u); }

}  // namespace

std::vector<std::string> demo_names() { return {"sqrt", "cusp", "abs"}; }

std::vector<double> demo_schedule() { return geometric_schedule(1e-1, 1e-6, 4); }

DemoProblem demo_problem(const std::string& name) {
  if (name == "sqrt") {
    SmoothMap f(
        1, 1, [](const Vec& t) { return Vec::Constant(1, std::sqrt(t[0])).eval(); },
        [](const Vec& t) -> std::optional<Mat> {
          if (!(t[0] > 0.0)) return std::nullopt;
          return Mat::Constant(1, 1, 0.5 / std::sqrt(t[0]));
        },
        [](const Vec& t) { return t[0] >= 0.0; });
    return {"sqrt", std::move(f), point_tube(), 0.5, 0.5};
  }
  if (name == "cusp") {
    SmoothMap f(
        1, 2,
        [](const Vec& t) {
          Vec out(2);
          out << std::cbrt(t[0] * t[0]), t[0];
          return out;
        },
        [](const Vec& t) -> std::optional<Mat> {
          if (t[0] == 0.0) return std::nullopt;
          Mat j(2, 1);
          j << 2.0 / (3.0 * std::cbrt(t[0])), 1.0;
          return j;
        });
    return {"cusp", std::move(f), point_tube(), 2.0 / 3.0, 0.5};
  }
  if (name == "abs") return {"abs", vertical(absolute, sign), axis_tube(), 1.0, 0.5};
  throw InvalidArgument("unknown demo \"" + name + "\" (expected sqrt, cusp or abs)");
}

std::vector<DemoProblem> growth_examples() {
  return {
      {"root", vertical(root_abs, root_abs_slope), axis_tube(), 0.5, 0.5},
      {"linear", vertical(same, one), axis_tube(), 1.0, 0.25},
      {"square", vertical(square, twice), axis_tube(), 2.0, 0.5},
  };
}

}  // namespace sacalc
