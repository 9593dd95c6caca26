#pragma once

// Reference computations that share no code with the library. Tests compute
// expected values here, compare, and freeze the results as literals.

#include <gmpxx.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "sacalc/mesh.hpp"

namespace oracle {

inline mpz_class factorial(unsigned n) {
  mpz_class f = 1;
  for (unsigned k = 2; k <= n; ++k) f *= k;
  return f;
}

// ∫ t^a over the standard simplex = Π a_i! / (|a| + p)!, in exact rationals.
inline mpq_class simplex_monomial(const std::vector<unsigned>& a) {
  mpz_class num = 1;
  unsigned total = 0;
  for (unsigned e : a) {
    num *= factorial(e);
    total += e;
  }
  mpq_class q(num, factorial(total + static_cast<unsigned>(a.size())));
  q.canonicalize();
  return q;
}

// Area enclosed by an oriented 1-chain in the plane (shoelace formula).
inline double enclosed_area(const sacalc::SimplicialComplex& k, const sacalc::Chain& boundary) {
  double twice = 0.0;
  for (const auto& [id, c] : boundary.coeffs) {
    const auto& e = k.simplex(1, id);
    const auto& a = k.vertices()[static_cast<std::size_t>(e[0])];
    const auto& b = k.vertices()[static_cast<std::size_t>(e[1])];
    twice += static_cast<double>(c) * (a[0] * b[1] - b[0] * a[1]);
  }
  return 0.5 * twice;
}

// True when some ±1 assignment on the p-simplices cancels every (p-1)-face
// shared by two of them. Exhaustive, so only for small complexes.
inline bool orientable_by_search(const sacalc::SimplicialComplex& k, int p) {
  const std::size_t n = k.count(p);
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
    std::vector<long> face_sum(k.count(p - 1), 0);
    std::vector<int> face_hits(k.count(p - 1), 0);
    for (std::size_t s = 0; s < n; ++s) {
      const long sign = (mask >> s) & 1U ? -1 : 1;
      const auto& simplex = k.simplex(p, static_cast<int>(s));
      for (std::size_t i = 0; i < simplex.size(); ++i) {
        auto face = simplex;
        face.erase(face.begin() + static_cast<long>(i));
        const int f = k.id(face);
        face_sum[static_cast<std::size_t>(f)] += (i % 2 == 0 ? 1 : -1) * sign;
        ++face_hits[static_cast<std::size_t>(f)];
      }
    }
    bool ok = true;
    for (std::size_t f = 0; f < face_sum.size(); ++f) ok = ok && (face_hits[f] != 2 || face_sum[f] == 0);
    if (ok) return true;
  }
  return false;
}

// Closed cells of [-1, 1]^2 cut n x n meeting the closed unit disk: the
// nearest point of the cell to the origin is within distance 1. Exact.
inline long long disk_cells(int n) {
  long long hits = 0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      auto nearest = [n](int k) {
        const mpq_class lo = mpq_class(2 * k, n) - 1;
        const mpq_class hi = mpq_class(2 * (k + 1), n) - 1;
        if (lo > 0) return lo;
        if (hi < 0) return mpq_class(-hi);
        return mpq_class(0);
      };
      const mpq_class x = nearest(i);
      const mpq_class y = nearest(j);
      if (x * x + y * y <= 1) ++hits;
    }
  }
  return hits;
}

// Uniform point of the standard simplex as barycentric weights.
inline std::vector<double> dirichlet(std::mt19937_64& rng, std::size_t parts) {
  std::exponential_distribution<double> e(1.0);
  std::vector<double> w(parts);
  double s = 0.0;
  for (auto& x : w) s += (x = e(rng));
  for (auto& x : w) x /= s;
  return w;
}

// Barycentric coordinates of y in the simplex `pts` (full-dimensional).
inline std::vector<double> barycentric(const std::vector<sacalc::Vec>& pts, const sacalc::Vec& y) {
  const auto p = static_cast<Eigen::Index>(pts.size()) - 1;
  sacalc::Mat edges(pts[0].size(), p);
  for (Eigen::Index i = 0; i < p; ++i) edges.col(i) = pts[static_cast<std::size_t>(i) + 1] - pts[0];
  const sacalc::Vec t = edges.colPivHouseholderQr().solve(y - pts[0]);
  std::vector<double> b(static_cast<std::size_t>(p) + 1);
  b[0] = 1.0 - t.sum();
  for (Eigen::Index i = 0; i < p; ++i) b[static_cast<std::size_t>(i) + 1] = t[i];
  return b;
}

// Area of the intersection of two counterclockwise convex polygons
// (Sutherland-Hodgman clipping).
inline double convex_overlap(std::vector<sacalc::Vec> subject, const std::vector<sacalc::Vec>& clip) {
  auto cross = [](const sacalc::Vec& o, const sacalc::Vec& a, const sacalc::Vec& b) {
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
  };
  for (std::size_t i = 0; i < clip.size() && !subject.empty(); ++i) {
    const sacalc::Vec& a = clip[i];
    const sacalc::Vec& b = clip[(i + 1) % clip.size()];
    std::vector<sacalc::Vec> kept;
    for (std::size_t j = 0; j < subject.size(); ++j) {
      const sacalc::Vec& p = subject[j];
      const sacalc::Vec& q = subject[(j + 1) % subject.size()];
      const double sp = cross(a, b, p);
      const double sq = cross(a, b, q);
      if (sp >= 0) kept.push_back(p);
      if ((sp >= 0) != (sq >= 0)) kept.push_back(p + (q - p) * (sp / (sp - sq)));
    }
    subject = std::move(kept);
  }
  double twice = 0.0;
  for (std::size_t j = 0; j < subject.size(); ++j) {
    const auto& p = subject[j];
    const auto& q = subject[(j + 1) % subject.size()];
    twice += p[0] * q[1] - q[0] * p[1];
  }
  return 0.5 * std::abs(twice);
}

// Triangle vertices reordered counterclockwise.
inline std::vector<sacalc::Vec> ccw(std::vector<sacalc::Vec> t) {
  const double s = (t[1][0] - t[0][0]) * (t[2][1] - t[0][1]) - (t[1][1] - t[0][1]) * (t[2][0] - t[0][0]);
  if (s < 0) std::swap(t[1], t[2]);
  return t;
}

}  // namespace oracle
