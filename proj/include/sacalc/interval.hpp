#pragma once

#include <algorithm>
#include <cmath>

namespace sacalc {

// Closed interval with outward rounding. Each arithmetic result is widened by
// one ulp only when the floating-point operation was inexact (detected with
// error-free transformations), so exactly representable results stay tight.
struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  Interval() = default;
  Interval(double v) : lo(v), hi(v) {}  // NOLINT(google-explicit-constructor)
  Interval(double l, double h) : lo(l), hi(h) {}

  bool contains(double v) const { return lo <= v && v <= hi; }
  double width() const { return hi - lo; }
  double mid() const { return 0.5 * (lo + hi); }
};

double add_down(double a, double b);
double add_up(double a, double b);
double mul_down(double a, double b);
double mul_up(double a, double b);

Interval operator+(const Interval& a, const Interval& b);
Interval operator-(const Interval& a, const Interval& b);
Interval operator-(const Interval& a);
Interval operator*(const Interval& a, const Interval& b);
Interval pow(const Interval& x, unsigned n);
Interval hull(const Interval& a, const Interval& b);

}  // namespace sacalc
