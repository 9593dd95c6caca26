#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <set>

#include "bundle_assembly.hpp"
#include "sacalc/errors.hpp"
#include "sacalc/triangulate.hpp"

namespace sacalc {

namespace {

constexpr double kFeasibleTol = 1e-10;
constexpr double kOnPlaneTol = 1e-9;

// Barycentric coordinates as affine functions: lambda(x) = coeffs * x + offset.
struct HalfSpaces {
  Mat coeffs;  // (p+1) x p
  Vec offset;
};

HalfSpaces barycentric_halfspaces(const std::vector<Vec>& pts) {
  const auto p = static_cast<Eigen::Index>(pts.size()) - 1;
  Mat edges(p, p);
  for (Eigen::Index i = 0; i < p; ++i) edges.col(i) = pts[static_cast<std::size_t>(i) + 1] - pts[0];
  const Mat inv = edges.inverse();
  HalfSpaces h{Mat(p + 1, p), Vec(p + 1)};
  h.coeffs.bottomRows(p) = inv;
  h.offset.tail(p) = -inv * pts[0];
  h.coeffs.row(0) = -inv.colwise().sum();
  h.offset[0] = 1.0 - h.offset.tail(p).sum();
  return h;
}

struct Bounds {
  Vec lo;
  Vec hi;
};

Bounds bounds_of(const std::vector<Vec>& pts) {
  Bounds b{pts[0], pts[0]};
  for (const auto& p : pts) {
    b.lo = b.lo.cwiseMin(p);
    b.hi = b.hi.cwiseMax(p);
  }
  return b;
}

bool overlaps(const Bounds& a, const Bounds& b) {
  return (a.lo.array() <= b.hi.array() + 1e-12).all() && (b.lo.array() <= a.hi.array() + 1e-12).all();
}

// Deduplicating vertex store: points within the tolerance share one id.
class VertexPool {
 public:
  explicit VertexPool(double tol) : tol_(tol), cell_(std::max(tol * 16.0, 1e-9)) {}

  int insert(const Vec& x) {
    const Key k = key(x);
    std::vector<long long> probe(k.size());
    const auto dim = k.size();
    std::size_t combos = 1;
    for (std::size_t i = 0; i < dim; ++i) combos *= 3;
    for (std::size_t c = 0; c < combos; ++c) {
      std::size_t r = c;
      for (std::size_t i = 0; i < dim; ++i) {
        probe[i] = k[i] + static_cast<long long>(r % 3) - 1;
        r /= 3;
      }
      auto it = buckets_.find(probe);
      if (it == buckets_.end()) continue;
      for (int id : it->second) {
        if ((points_[static_cast<std::size_t>(id)] - x).norm() <= tol_) return id;
      }
    }
    const int id = static_cast<int>(points_.size());
    points_.push_back(x);
    buckets_[k].push_back(id);
    return id;
  }

  const std::vector<Vec>& points() const { return points_; }

 private:
  using Key = std::vector<long long>;
  Key key(const Vec& x) const {
    Key k(static_cast<std::size_t>(x.size()));
    for (Eigen::Index i = 0; i < x.size(); ++i) k[static_cast<std::size_t>(i)] = static_cast<long long>(std::floor(x[i] / cell_));
    return k;
  }

  double tol_;
  double cell_;
  std::vector<Vec> points_;
  std::map<Key, std::vector<int>> buckets_;
};

int affine_rank(const std::vector<Vec>& pool, const std::vector<int>& ids) {
  if (ids.size() <= 1) return 0;
  const Vec& base = pool[static_cast<std::size_t>(ids[0])];
  Mat d(base.size(), static_cast<Eigen::Index>(ids.size()) - 1);
  double scale = 0.0;
  for (std::size_t i = 1; i < ids.size(); ++i) {
    d.col(static_cast<Eigen::Index>(i) - 1) = pool[static_cast<std::size_t>(ids[i])] - base;
    scale = std::max(scale, d.col(static_cast<Eigen::Index>(i) - 1).norm());
  }
  if (scale == 0.0) return 0;
  Eigen::JacobiSVD<Mat> svd(d / scale);
  const auto& sv = svd.singularValues();
  int r = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv[i] > 1e-9) ++r;
  }
  return r;
}

// Pulling triangulation of a convex polytope of affine dimension k given by
// its vertex ids and the affine functions whose zero sets carry its faces.
void pull(const std::vector<Vec>& pool, std::vector<int> ids, int k, const std::vector<std::pair<Vec, double>>& planes,
          std::vector<Simplex>& out) {
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  if (k == 0) {
    out.push_back({ids.front()});
    return;
  }
  if (k == 1) {
    // Endpoints: the two vertices farthest apart.
    int a = ids[0];
    int b = ids[0];
    double best = -1.0;
    for (int i : ids) {
      for (int j : ids) {
        const double dist = (pool[static_cast<std::size_t>(i)] - pool[static_cast<std::size_t>(j)]).norm();
        if (dist > best) {
          best = dist;
          a = std::min(i, j);
          b = std::max(i, j);
        }
      }
    }
    out.push_back({a, b});
    return;
  }
  const int apex = ids.front();
  std::set<std::vector<int>> facets;
  for (const auto& [normal, shift] : planes) {
    std::vector<int> on;
    for (int v : ids) {
      if (std::abs(normal.dot(pool[static_cast<std::size_t>(v)]) + shift) <= kOnPlaneTol) on.push_back(v);
    }
    if (std::find(on.begin(), on.end(), apex) != on.end()) continue;
    if (static_cast<int>(on.size()) < k || affine_rank(pool, on) != k - 1) continue;
    facets.insert(on);
  }
  for (const auto& f : facets) {
    std::vector<Simplex> sub;
    pull(pool, f, k - 1, planes, sub);
    for (auto& s : sub) {
      s.push_back(apex);
      std::sort(s.begin(), s.end());
      out.push_back(std::move(s));
    }
  }
}

struct Piece {
  std::vector<Simplex> simplices;
  std::size_t slivers = 0;
};

// Triangulates the intersection of two full-dimensional simplices.
Piece intersect(const std::vector<Vec>& a, const std::vector<Vec>& b, VertexPool& pool) {
  const auto p = static_cast<Eigen::Index>(a.size()) - 1;
  const HalfSpaces ha = barycentric_halfspaces(a);
  const HalfSpaces hb = barycentric_halfspaces(b);
  std::vector<std::pair<Vec, double>> planes;
  for (Eigen::Index i = 0; i <= p; ++i) planes.emplace_back(ha.coeffs.row(i).transpose(), ha.offset[i]);
  for (Eigen::Index i = 0; i <= p; ++i) planes.emplace_back(hb.coeffs.row(i).transpose(), hb.offset[i]);
  const auto nplanes = planes.size();

  std::vector<int> ids;
  std::vector<int> pick(static_cast<std::size_t>(p));
  for (std::size_t i = 0; i < pick.size(); ++i) pick[i] = static_cast<int>(i);
  while (true) {
    Mat m(p, p);
    Vec rhs(p);
    for (Eigen::Index r = 0; r < p; ++r) {
      m.row(r) = planes[static_cast<std::size_t>(pick[static_cast<std::size_t>(r)])].first.transpose();
      rhs[r] = -planes[static_cast<std::size_t>(pick[static_cast<std::size_t>(r)])].second;
    }
    Eigen::FullPivLU<Mat> lu(m);
    if (lu.isInvertible()) {
      const Vec x = lu.solve(rhs);
      bool feasible = x.allFinite();
      for (std::size_t c = 0; feasible && c < nplanes; ++c) {
        if (planes[c].first.dot(x) + planes[c].second < -kFeasibleTol) feasible = false;
      }
      if (feasible) ids.push_back(pool.insert(x));
    }
    // Next combination of p planes out of nplanes.
    int i = static_cast<int>(p) - 1;
    while (i >= 0 && pick[static_cast<std::size_t>(i)] == static_cast<int>(nplanes) - static_cast<int>(p) + i) --i;
    if (i < 0) break;
    ++pick[static_cast<std::size_t>(i)];
    for (auto j = static_cast<std::size_t>(i) + 1; j < pick.size(); ++j) pick[j] = pick[j - 1] + 1;
  }
  Piece piece;
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  if (static_cast<Eigen::Index>(ids.size()) < p + 1 || affine_rank(pool.points(), ids) < p) return piece;
  std::vector<Simplex> raw;
  pull(pool.points(), ids, static_cast<int>(p), planes, raw);
  for (auto& s : raw) {
    std::vector<Vec> pts;
    for (int v : s) pts.push_back(pool.points()[static_cast<std::size_t>(v)]);
    if (!is_nondegenerate(pts)) {
      ++piece.slivers;
      continue;
    }
    piece.simplices.push_back(std::move(s));
  }
  return piece;
}

struct Overlay {
  std::vector<Vec> vertices;
  std::vector<Simplex> simplices;
  std::vector<std::pair<int, int>> parents;
  std::size_t slivers = 0;
};

Overlay overlay(const std::vector<std::vector<Vec>>& s1, const std::vector<std::vector<Vec>>& s2, double tol) {
  VertexPool pool(tol);
  Overlay out;
  std::vector<Bounds> b2;
  b2.reserve(s2.size());
  for (const auto& s : s2) b2.push_back(bounds_of(s));
  for (std::size_t i = 0; i < s1.size(); ++i) {
    const Bounds bi = bounds_of(s1[i]);
    for (std::size_t j = 0; j < s2.size(); ++j) {
      if (!overlaps(bi, b2[j])) continue;
      Piece piece = intersect(s1[i], s2[j], pool);
      out.slivers += piece.slivers;
      for (auto& s : piece.simplices) {
        out.simplices.push_back(std::move(s));
        out.parents.emplace_back(static_cast<int>(i), static_cast<int>(j));
      }
    }
  }
  out.vertices = pool.points();
  return out;
}

std::vector<std::vector<Vec>> top_points(const TriangulationBundle& b) {
  std::vector<std::vector<Vec>> pts;
  const int top = b.top_dim();
  for (std::size_t i = 0; i < b.complex.count(top); ++i) pts.push_back(b.complex.points(top, static_cast<int>(i)));
  return pts;
}

}  // namespace

CommonRefinement common_refinement(const TriangulationBundle& b1, const TriangulationBundle& b2,
                                   const OverlayOptions& options) {
  const int top = b1.top_dim();
  if (b2.top_dim() != top || b1.complex.ambient_dim() != b2.complex.ambient_dim()) {
    throw DimensionMismatch("common refinement needs bundles of equal dimension");
  }
  if (static_cast<std::size_t>(top) != b1.complex.ambient_dim() || top < 1 || top > 3) {
    throw InvalidArgument("common refinement supports full-dimensional bundles in dimensions 1 to 3");
  }
  if (b1.formula.dim() != b2.formula.dim()) throw DimensionMismatch("bundles triangulate different formulas");
  for (const auto* b : {&b1, &b2}) {
    for (const auto& c : b->charts) {
      if (!c.affine) throw InvalidArgument("common refinement needs affine charts");
    }
  }

  const auto s1 = top_points(b1);
  auto s2 = top_points(b2);
  Overlay ov = overlay(s1, s2, options.coincidence_tol);
  TriangulationReport report;
  report.depth = std::max(b1.report.depth, b2.report.depth);
  report.refinement_depth = std::max(b1.report.refinement_depth, b2.report.refinement_depth);
  report.slivers = ov.slivers;
  if (ov.slivers > 0) {
    // One deterministic re-perturbation of the second bundle's vertices.
    std::mt19937_64 rng(options.seed);
    std::uniform_real_distribution<double> jitter(-1e-7, 1e-7);
    std::vector<Vec> moved = b2.complex.vertices();
    for (auto& v : moved) {
      for (Eigen::Index i = 0; i < v.size(); ++i) v[i] += jitter(rng);
    }
    for (std::size_t i = 0; i < s2.size(); ++i) {
      const Simplex& s = b2.complex.simplex(top, static_cast<int>(i));
      for (std::size_t k = 0; k < s.size(); ++k) s2[i][k] = moved[static_cast<std::size_t>(s[k])];
    }
    ov = overlay(s1, s2, options.coincidence_tol);
    report.jittered = true;
    report.slivers += ov.slivers;
  }

  std::vector<SignCondition> conditions = b1.boundary_conditions;
  std::vector<int> source;
  TriangulationBundle bundle = detail::assemble(ov.vertices, ov.simplices, b1.formula, std::move(conditions),
                                                b1.family_offset, {}, std::move(report), &source);
  CommonRefinement out{std::move(bundle), {}};
  out.parents.reserve(source.size());
  for (int s : source) out.parents.push_back(ov.parents[static_cast<std::size_t>(s)]);
  out.bundle.strata.assign(b1.strata.size(), {});
  for (std::size_t j = 0; j < b1.strata.size(); ++j) {
    const std::set<int> members(b1.strata[j].begin(), b1.strata[j].end());
    for (std::size_t i = 0; i < out.parents.size(); ++i) {
      if (members.count(out.parents[i].first) != 0) out.bundle.strata[j].push_back(static_cast<int>(i));
    }
  }
  return out;
}

}  // namespace sacalc
