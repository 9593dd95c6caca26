#include "sacalc/interval.hpp"

#include <limits>

namespace sacalc {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Knuth TwoSum: a + b == s + err exactly.
double two_sum_err(double a, double b, double s) {
  const double bb = s - a;
  return (a - (s - bb)) + (b - bb);
}

}  // namespace

double add_down(double a, double b) {
  const double s = a + b;
  if (!std::isfinite(s)) return std::isnan(s) ? -kInf : s;
  return two_sum_err(a, b, s) < 0.0 ? std::nextafter(s, -kInf) : s;
}

double add_up(double a, double b) {
  const double s = a + b;
  if (!std::isfinite(s)) return std::isnan(s) ? kInf : s;
  return two_sum_err(a, b, s) > 0.0 ? std::nextafter(s, kInf) : s;
}

double mul_down(double a, double b) {
  if (a == 0.0 || b == 0.0) return 0.0;
  const double p = a * b;
  if (!std::isfinite(p)) return std::isnan(p) ? -kInf : p;
  const double e = std::fma(a, b, -p);
  // Subnormal products may lose bits that fma cannot report.
  if (std::abs(p) < std::numeric_limits<double>::min()) return std::nextafter(p, -kInf);
  return e < 0.0 ? std::nextafter(p, -kInf) : p;
}

double mul_up(double a, double b) {
  if (a == 0.0 || b == 0.0) return 0.0;
  const double p = a * b;
  if (!std::isfinite(p)) return std::isnan(p) ? kInf : p;
  const double e = std::fma(a, b, -p);
  if (std::abs(p) < std::numeric_limits<double>::min()) return std::nextafter(p, kInf);
  return e > 0.0 ? std::nextafter(p, kInf) : p;
}

Interval operator+(const Interval& a, const Interval& b) {
  return {add_down(a.lo, b.lo), add_up(a.hi, b.hi)};
}

Interval operator-(const Interval& a) { return {-a.hi, -a.lo}; }

Interval operator-(const Interval& a, const Interval& b) { return a + (-b); }

Interval operator*(const Interval& a, const Interval& b) {
  const double c[4][2] = {{a.lo, b.lo}, {a.lo, b.hi}, {a.hi, b.lo}, {a.hi, b.hi}};
  double lo = kInf;
  double hi = -kInf;
  for (const auto& p : c) {
    lo = std::min(lo, mul_down(p[0], p[1]));
    hi = std::max(hi, mul_up(p[0], p[1]));
  }
  return {lo, hi};
}

namespace {

double pow_down(double a, unsigned n) {
  double r = 1.0;
  for (unsigned i = 0; i < n; ++i) r = mul_down(r, a);
  return r;
}

double pow_up(double a, unsigned n) {
  double r = 1.0;
  for (unsigned i = 0; i < n; ++i) r = mul_up(r, a);
  return r;
}

}  // namespace

Interval pow(const Interval& x, unsigned n) {
  if (n == 0) return {1.0, 1.0};
  if (n == 1) return x;
  const bool even = n % 2 == 0;
  if (x.lo >= 0.0) return {pow_down(x.lo, n), pow_up(x.hi, n)};
  if (x.hi <= 0.0) {
    if (even) return {pow_down(-x.hi, n), pow_up(-x.lo, n)};
    return {-pow_up(-x.lo, n), -pow_down(-x.hi, n)};
  }
  if (even) return {0.0, pow_up(std::max(-x.lo, x.hi), n)};
  return {-pow_up(-x.lo, n), pow_up(x.hi, n)};
}

Interval hull(const Interval& a, const Interval& b) {
  return {std::min(a.lo, b.lo), std::max(a.hi, b.hi)};
}

}  // namespace sacalc
