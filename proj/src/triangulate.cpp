#include "sacalc/triangulate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <set>

#include "bundle_assembly.hpp"
#include "sacalc/errors.hpp"

namespace sacalc {

SmoothMap affine_chart(std::span<const Vec> vertices) {
  if (vertices.empty()) throw InvalidArgument("affine chart of an empty simplex");
  const auto p = static_cast<Eigen::Index>(vertices.size() - 1);
  Mat linear(vertices.front().size(), p);
  for (Eigen::Index i = 0; i < p; ++i) {
    linear.col(i) = vertices[static_cast<std::size_t>(i) + 1] - vertices.front();
  }
  return SmoothMap::affine(vertices.front(), std::move(linear));
}

namespace {

// Affine inclusion of the standard p-simplex onto the face of the standard
// P-simplex spanned by reference vertices `positions` (0 = origin, k = e_k).
SmoothMap face_inclusion(const std::vector<int>& positions, int top) {
  auto corner = [top](int k) {
    Vec e = Vec::Zero(top);
    if (k > 0) e[k - 1] = 1.0;
    return e;
  };
  const auto p = static_cast<Eigen::Index>(positions.size()) - 1;
  Mat linear(top, p);
  const Vec base = corner(positions.front());
  for (Eigen::Index j = 0; j < p; ++j) linear.col(j) = corner(positions[static_cast<std::size_t>(j) + 1]) - base;
  return SmoothMap::affine(base, std::move(linear));
}

int top_coface(const SimplicialComplex& k, int p, int id) {
  while (p < k.dimension()) {
    const auto& cf = k.cofaces(p, id);
    if (cf.empty()) return -1;
    id = cf.front();
    ++p;
  }
  return id;
}

std::vector<int> positions_in(const Simplex& face, const Simplex& top) {
  std::vector<int> pos;
  for (int v : face) pos.push_back(static_cast<int>(std::find(top.begin(), top.end(), v) - top.begin()));
  return pos;
}

double signed_volume(const std::vector<Vec>& pts) {
  const auto p = static_cast<Eigen::Index>(pts.size()) - 1;
  if (p == 0 || pts.front().size() != p) return simplex_volume(pts);
  Mat m(p, p);
  for (Eigen::Index i = 0; i < p; ++i) m.col(i) = pts[static_cast<std::size_t>(i) + 1] - pts[0];
  return m.determinant();
}

bool same_orientation(const std::vector<Vec>& before, const std::vector<Vec>& after) {
  const auto p = static_cast<Eigen::Index>(before.size()) - 1;
  if (p == 0 || before.front().size() != p) return true;
  return (signed_volume(before) > 0.0) == (signed_volume(after) > 0.0);
}

Vec barycenter(const std::vector<Vec>& pts) {
  Vec c = Vec::Zero(pts.front().size());
  for (const auto& p : pts) c += p;
  return c / static_cast<double>(pts.size());
}

std::span<const double> as_span(const Vec& v) { return {v.data(), static_cast<std::size_t>(v.size())}; }

double rounding_floor(const Polynomial& p, const Vec& x) {
  double mag = 0.0;
  for (const auto& [e, c] : p.terms()) {
    double t = std::abs(c.get_d());
    for (std::size_t i = 0; i < e.size(); ++i) t *= std::pow(std::abs(x[static_cast<Eigen::Index>(i)]), e[i]);
    mag += t;
  }
  return 16.0 * std::numeric_limits<double>::epsilon() * mag;
}

bool on_zero_set(const Polynomial& p, const Vec& x) {
  return std::abs(p.eval(as_span(x))) < std::max(1e-12, rounding_floor(p, x));
}

// One damped Newton step toward p = 0 along the gradient. False on stall.
bool newton_step(Vec& x, const Polynomial& p) {
  const double v = p.eval(as_span(x));
  const auto g = p.gradient(as_span(x));
  Vec grad = Eigen::Map<const Vec>(g.data(), static_cast<Eigen::Index>(g.size()));
  const double gg = grad.squaredNorm();
  if (gg == 0.0 || !std::isfinite(gg)) return false;
  const Vec step = (v / gg) * grad;
  double lambda = 1.0;
  for (int k = 0; k < 30; ++k) {
    Vec y = x - lambda * step;
    if (std::abs(p.eval(as_span(y))) < std::abs(v)) {
      x = std::move(y);
      return true;
    }
    lambda *= 0.5;
  }
  return false;
}

}  // namespace

int snap_to_boundary(Vec& x, const std::vector<const Polynomial*>& polys) {
  if (polys.empty()) return 0;
  auto done = [&] {
    return std::all_of(polys.begin(), polys.end(), [&](const Polynomial* p) { return on_zero_set(*p, x); });
  };
  if (polys.size() == 1) {
    for (int it = 0; it < 50; ++it) {
      if (done()) return it;
      if (!newton_step(x, *polys.front())) return done() ? it : -1;
    }
    return done() ? 50 : -1;
  }
  for (int sweep = 0; sweep < 200; ++sweep) {
    if (done()) return sweep;
    for (const Polynomial* p : polys) {
      if (!on_zero_set(*p, x)) newton_step(x, *p);
    }
  }
  return done() ? 200 : -1;
}

SmoothMap TriangulationBundle::face_chart(int p, int id) const {
  const int top = top_dim();
  if (p == top) return charts.at(static_cast<std::size_t>(id)).map;
  const int t = top_coface(complex, p, id);
  if (t < 0) throw InvalidArgument("simplex has no top-dimensional coface");
  const auto pos = positions_in(complex.simplex(p, id), complex.simplex(top, t));
  return charts.at(static_cast<std::size_t>(t)).map.compose(face_inclusion(pos, top));
}

double TriangulationBundle::total_volume() const {
  double v = 0.0;
  const int top = top_dim();
  for (std::size_t i = 0; i < complex.count(top); ++i) v += complex.volume(top, static_cast<int>(i));
  return v;
}

std::vector<std::vector<int>> compute_vertex_tags(const SimplicialComplex& complex,
                                                  const std::vector<SignCondition>& conditions) {
  std::vector<std::vector<int>> tags(complex.vertices().size());
  for (std::size_t v = 0; v < tags.size(); ++v) {
    const Vec& x = complex.vertices()[v];
    for (std::size_t k = 0; k < conditions.size(); ++k) {
      if (std::abs(conditions[k].poly.eval(as_span(x))) <= kOnBoundaryTol) tags[v].push_back(static_cast<int>(k));
    }
  }
  return tags;
}

namespace {

std::vector<int> common_tags(const std::vector<std::vector<int>>& tags, const Simplex& s) {
  std::vector<int> common = tags[static_cast<std::size_t>(s.front())];
  for (std::size_t i = 1; i < s.size(); ++i) {
    std::vector<int> next;
    const auto& t = tags[static_cast<std::size_t>(s[i])];
    std::set_intersection(common.begin(), common.end(), t.begin(), t.end(), std::back_inserter(next));
    common = std::move(next);
  }
  return common;
}

}  // namespace

namespace detail {

TriangulationBundle assemble(const std::vector<Vec>& pool, const std::vector<Simplex>& kept,
                             const SAFormula& formula, std::vector<SignCondition> conditions,
                             std::size_t family_offset, const std::vector<SAFormula>& family,
                             TriangulationReport report, std::vector<int>* source_index) {
  std::vector<int> remap(pool.size(), -1);
  std::vector<char> used(pool.size(), 0);
  for (const auto& s : kept) {
    for (int v : s) used[static_cast<std::size_t>(v)] = 1;
  }
  std::vector<Vec> vertices;
  for (std::size_t v = 0; v < pool.size(); ++v) {
    if (used[v]) {
      remap[v] = static_cast<int>(vertices.size());
      vertices.push_back(pool[v]);
    }
  }
  std::vector<Simplex> maximal;
  maximal.reserve(kept.size());
  for (const auto& s : kept) {
    Simplex t;
    for (int v : s) t.push_back(remap[static_cast<std::size_t>(v)]);
    std::sort(t.begin(), t.end());
    maximal.push_back(std::move(t));
  }
  TriangulationBundle b{SimplicialComplex(std::move(vertices), std::move(maximal)),
                        {},
                        formula,
                        std::move(conditions),
                        family_offset,
                        {},
                        {},
                        std::move(report)};
  b.vertex_tags = compute_vertex_tags(b.complex, b.boundary_conditions);
  const int top = b.top_dim();
  if (source_index != nullptr) {
    source_index->assign(kept.size(), -1);
    for (std::size_t i = 0; i < kept.size(); ++i) {
      Simplex t;
      for (int v : kept[i]) t.push_back(remap[static_cast<std::size_t>(v)]);
      std::sort(t.begin(), t.end());
      (*source_index)[static_cast<std::size_t>(b.complex.id(t))] = static_cast<int>(i);
    }
  }
  double diam = 0.0;
  for (std::size_t i = 0; i < b.complex.count(top); ++i) {
    const int id = static_cast<int>(i);
    const auto pts = b.complex.points(top, id);
    diam = std::max(diam, simplex_diameter(pts));
    RealizationChart chart{id, affine_chart(pts), {}, true};
    const Simplex& s = b.complex.simplex(top, id);
    for (std::size_t omit = 0; omit < s.size(); ++omit) {
      Simplex f;
      for (std::size_t j = 0; j < s.size(); ++j) {
        if (j != omit) f.push_back(s[j]);
      }
      const auto c = f.empty() ? std::vector<int>{} : common_tags(b.vertex_tags, f);
      chart.facet_tags.push_back(c.empty() ? -1 : c.front());
    }
    b.charts.push_back(std::move(chart));
  }
  b.report.kept = b.charts.size();
  b.report.mesh_size = diam;
  b.strata.assign(family.size(), {});
  for (std::size_t j = 0; j < family.size(); ++j) {
    for (std::size_t i = 0; i < b.complex.count(top); ++i) {
      const Vec c = barycenter(b.complex.points(top, static_cast<int>(i)));
      if (family[j].contains(as_span(c))) b.strata[j].push_back(static_cast<int>(i));
    }
  }
  b.report.family_straddling = 0;
  for (std::size_t i = 0; i < b.complex.count(top); ++i) {
    const Simplex& s = b.complex.simplex(top, static_cast<int>(i));
    for (std::size_t k = family_offset; k < b.boundary_conditions.size(); ++k) {
      bool pos = false;
      bool neg = false;
      for (int v : s) {
        const double val = b.boundary_conditions[k].poly.eval(as_span(b.complex.vertices()[static_cast<std::size_t>(v)]));
        if (val > kOnBoundaryTol) pos = true;
        if (val < -kOnBoundaryTol) neg = true;
      }
      if (pos && neg) {
        ++b.report.family_straddling;
        break;
      }
    }
  }
  return b;
}

}  // namespace detail

namespace {

// First-order distance |p| / |∇p| to the zero set; infinite at critical points.
double family_distance(const Polynomial& p, const Vec& x) {
  const auto g = p.gradient(as_span(x));
  double gn = 0.0;
  for (double gi : g) gn += gi * gi;
  gn = std::sqrt(gn);
  if (gn == 0.0) return std::numeric_limits<double>::infinity();
  return std::abs(p.eval(as_span(x))) / gn;
}

std::vector<SignCondition> collect_conditions(const SAFormula& formula, const std::vector<SAFormula>& family,
                                              std::size_t& family_offset) {
  std::vector<SignCondition> conds = formula.negation_normal_form().leaves();
  family_offset = conds.size();
  for (const auto& f : family) {
    auto l = f.negation_normal_form().leaves();
    conds.insert(conds.end(), l.begin(), l.end());
  }
  return conds;
}

}  // namespace

TriangulationBundle triangulate(const SAFormula& formula, int depth, const TriangulateOptions& options) {
  if (depth < 0) throw InvalidArgument("depth must be >= 0");
  if (!formula.box()) throw InvalidArgument("triangulate needs a declared bounding box");
  if (depth > 12) throw InvalidArgument("depth above 12 is not supported");
  const std::size_t m = formula.dim();
  if (m == 0) throw InvalidArgument("triangulate needs ambient dimension >= 1");
  for (const auto& f : options.family) {
    if (f.dim() != m) throw DimensionMismatch("family member in a different dimension");
  }
  const Box& box = *formula.box();
  const int n = 1 << depth;
  std::vector<double> offset(m, 0.0);
  if (!options.grid_offset.empty()) {
    if (options.grid_offset.size() != m) throw DimensionMismatch("grid offset dimension mismatch");
    for (std::size_t i = 0; i < m; ++i) {
      offset[i] = options.grid_offset[i];
      if (!(offset[i] >= 0.0 && offset[i] < 1.0)) throw InvalidArgument("grid offset must lie in [0, 1)");
    }
  }
  const bool shifted = std::any_of(offset.begin(), offset.end(), [](double o) { return o != 0.0; });
  const int cells = shifted ? n + 1 : n;
  const int per_axis = cells + 1;

  // Grid vertices, index k along axis i at lo + (k - offset) * width / n.
  std::size_t nverts = 1;
  for (std::size_t i = 0; i < m; ++i) nverts *= static_cast<std::size_t>(per_axis);
  std::vector<Vec> pos(nverts, Vec(static_cast<Eigen::Index>(m)));
  double hmin = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < m; ++i) hmin = std::min(hmin, (box[i].hi - box[i].lo) / n);
  for (std::size_t v = 0; v < nverts; ++v) {
    std::size_t r = v;
    for (std::size_t i = 0; i < m; ++i) {
      const auto k = static_cast<double>(r % static_cast<std::size_t>(per_axis));
      r /= static_cast<std::size_t>(per_axis);
      const double w = box[i].hi - box[i].lo;
      pos[v][static_cast<Eigen::Index>(i)] = box[i].lo + ((k - offset[i]) * w) / n;
    }
  }
  auto flat = [&](const std::vector<int>& idx) {
    int f = 0;
    for (std::size_t i = m; i-- > 0;) f = f * per_axis + idx[i];
    return f;
  };

  // Kuhn triangulation, reflected along axis 0 so that each cell's main
  // diagonal joins (hi, lo, ..) to (lo, hi, ..).
  std::vector<Simplex> grid;
  {
    std::vector<int> cell(m, 0);
    std::vector<int> perm(m);
    while (true) {
      std::iota(perm.begin(), perm.end(), 0);
      do {
        std::vector<int> idx = cell;
        idx[0] += 1;
        Simplex s{flat(idx)};
        for (std::size_t k = 0; k < m; ++k) {
          const auto a = static_cast<std::size_t>(perm[k]);
          idx[a] += a == 0 ? -1 : 1;
          s.push_back(flat(idx));
        }
        std::sort(s.begin(), s.end());
        grid.push_back(std::move(s));
      } while (std::next_permutation(perm.begin(), perm.end()));
      std::size_t k = 0;
      while (k < m && ++cell[k] == cells) cell[k++] = 0;
      if (k == m) break;
    }
  }

  std::size_t family_offset = 0;
  std::vector<SignCondition> conds = collect_conditions(formula, options.family, family_offset);
  TriangulationReport report;
  report.depth = depth;
  report.grid_simplices = grid.size();

  // Family boundaries: pull nearby vertices onto them first.
  for (std::size_t k = family_offset; k < conds.size(); ++k) {
    const Polynomial& p = conds[k].poly;
    for (auto& x : pos) {
      if (family_distance(p, x) >= 0.3 * hmin) continue;
      Vec y = x;
      const int it = snap_to_boundary(y, {&p});
      if (it >= 0) {
        x = y;
        report.total_snap_iterations += it;
        report.max_snap_iterations = std::max(report.max_snap_iterations, it);
      }
    }
  }

  std::vector<signed char> member(nverts, -1);
  auto is_member = [&](int v) {
    auto& mflag = member[static_cast<std::size_t>(v)];
    if (mflag < 0) mflag = formula.contains(as_span(pos[static_cast<std::size_t>(v)])) ? 1 : 0;
    return mflag == 1;
  };

  std::vector<char> keep(grid.size(), 0);
  std::vector<int> candidates;
  std::map<int, std::set<int>> active;  // outside vertex -> active conditions
  const std::size_t nf = family_offset;
  for (std::size_t gs = 0; gs < grid.size(); ++gs) {
    const Simplex& s = grid[gs];
    Box bb(m);
    for (std::size_t i = 0; i < m; ++i) {
      double lo = std::numeric_limits<double>::infinity();
      double hi = -lo;
      for (int v : s) {
        lo = std::min(lo, pos[static_cast<std::size_t>(v)][static_cast<Eigen::Index>(i)]);
        hi = std::max(hi, pos[static_cast<std::size_t>(v)][static_cast<Eigen::Index>(i)]);
      }
      bb[i] = {lo, hi};
    }
    const BoxClass cls = formula.classify_box(bb);
    if (cls == BoxClass::AllOut) continue;
    if (cls == BoxClass::AllIn) {
      keep[gs] = 1;
      continue;
    }
    std::vector<int> inside;
    std::vector<int> outside;
    for (int v : s) (is_member(v) ? inside : outside).push_back(v);
    if (inside.empty()) continue;
    candidates.push_back(static_cast<int>(gs));
    for (int v : outside) {
      auto& act = active[v];
      const auto& xv = pos[static_cast<std::size_t>(v)];
      for (std::size_t k = 0; k < nf; ++k) {
        if (conds[k].holds(as_span(xv))) continue;
        for (int u : inside) {
          if (conds[k].holds(as_span(pos[static_cast<std::size_t>(u)]))) {
            act.insert(static_cast<int>(k));
            break;
          }
        }
      }
    }
  }

  std::vector<char> failed(nverts, 0);
  const std::vector<Vec> original = pos;
  for (auto& [v, act] : active) {
    std::vector<const Polynomial*> polys;
    if (act.empty()) {
      // No condition flips against an inside neighbour: use every violated one.
      for (std::size_t k = 0; k < nf; ++k) {
        if (!conds[k].holds(as_span(pos[static_cast<std::size_t>(v)]))) polys.push_back(&conds[k].poly);
      }
    } else {
      for (int k : act) polys.push_back(&conds[static_cast<std::size_t>(k)].poly);
    }
    const Vec start = pos[static_cast<std::size_t>(v)];
    Vec x = start;
    int it = snap_to_boundary(x, polys);
    if (it < 0) {
      failed[static_cast<std::size_t>(v)] = 1;
      continue;
    }
    // Conditions that held before the move but not after join the system,
    // so the vertex lands on the edge or corner instead of crossing it.
    for (std::size_t round = 0; round < m; ++round) {
      const std::size_t before = polys.size();
      for (std::size_t k = 0; k < nf; ++k) {
        const Polynomial* q = &conds[k].poly;
        if (std::find(polys.begin(), polys.end(), q) != polys.end()) continue;
        if (conds[k].holds(as_span(start)) && !conds[k].holds(as_span(x)) && family_distance(*q, x) > 1e-9) {
          polys.push_back(q);
        }
      }
      if (polys.size() == before) break;
      Vec y = start;
      const int again = snap_to_boundary(y, polys);
      if (again < 0) break;
      x = y;
      it += again;
    }
    // A family boundary now within reach joins the system, so the vertex
    // lands on the corner rather than beside it.
    std::vector<const Polynomial*> joint = polys;
    for (std::size_t k = family_offset; k < conds.size(); ++k) {
      if (family_distance(conds[k].poly, x) < 0.3 * hmin) joint.push_back(&conds[k].poly);
    }
    if (joint.size() > polys.size()) {
      Vec y = x;
      if (snap_to_boundary(y, joint) >= 0) x = y;
    }
    pos[static_cast<std::size_t>(v)] = x;
    ++report.snapped_vertices;
    report.total_snap_iterations += it;
    report.max_snap_iterations = std::max(report.max_snap_iterations, it);
  }

  for (int gs : candidates) {
    const Simplex& s = grid[static_cast<std::size_t>(gs)];
    if (std::any_of(s.begin(), s.end(), [&](int v) { return failed[static_cast<std::size_t>(v)] != 0; })) {
      report.snap_failures.push_back(gs);
      continue;
    }
    std::vector<Vec> before;
    std::vector<Vec> after;
    for (int v : s) {
      before.push_back(original[static_cast<std::size_t>(v)]);
      after.push_back(pos[static_cast<std::size_t>(v)]);
    }
    if (!is_nondegenerate(after) || !same_orientation(before, after)) {
      report.dropped_degenerate.push_back(gs);
      continue;
    }
    if (formula.contains(as_span(barycenter(after)))) keep[static_cast<std::size_t>(gs)] = 1;
  }
  if (options.strict && !report.snap_failures.empty()) {
    throw SnapFailure("snapping did not converge", report.snap_failures);
  }

  std::vector<Simplex> kept;
  for (std::size_t gs = 0; gs < grid.size(); ++gs) {
    if (!keep[gs]) continue;
    std::vector<Vec> pts;
    for (int v : grid[gs]) pts.push_back(pos[static_cast<std::size_t>(v)]);
    if (!is_nondegenerate(pts)) {
      report.dropped_degenerate.push_back(static_cast<int>(gs));
      continue;
    }
    kept.push_back(grid[gs]);
  }
  std::sort(report.dropped_degenerate.begin(), report.dropped_degenerate.end());
  return detail::assemble(pos, kept, formula, std::move(conds), family_offset, options.family, std::move(report), nullptr);
}

TriangulationBundle refine(const TriangulationBundle& bundle) {
  const int top = bundle.top_dim();
  if (top < 1 || top > 3) throw InvalidArgument("refine supports simplices of dimension 1 to 3");
  for (const auto& c : bundle.charts) {
    if (!c.affine) throw InvalidArgument("refine needs affine charts");
  }
  const SimplicialComplex& k = bundle.complex;
  std::vector<Vec> pool = k.vertices();
  std::map<std::pair<int, int>, int> midpoint;
  auto mid = [&](int a, int b) {
    if (a > b) std::swap(a, b);
    auto [it, inserted] = midpoint.try_emplace({a, b}, static_cast<int>(pool.size()));
    if (inserted) pool.push_back(0.5 * (pool[static_cast<std::size_t>(a)] + pool[static_cast<std::size_t>(b)]));
    return it->second;
  };

  struct Child {
    Simplex listed;  // orientation-carrying order
    int parent;
  };
  std::vector<Child> children;
  for (std::size_t i = 0; i < k.count(top); ++i) {
    const Simplex& s = k.simplex(top, static_cast<int>(i));
    const int pid = static_cast<int>(i);
    if (top == 1) {
      const int ab = mid(s[0], s[1]);
      children.push_back({{s[0], ab}, pid});
      children.push_back({{ab, s[1]}, pid});
    } else if (top == 2) {
      const int a = s[0], b = s[1], c = s[2];
      const int ab = mid(a, b), ac = mid(a, c), bc = mid(b, c);
      children.push_back({{a, ab, ac}, pid});
      children.push_back({{ab, b, bc}, pid});
      children.push_back({{ac, bc, c}, pid});
      children.push_back({{bc, ac, ab}, pid});
    } else {
      const int a = s[0], b = s[1], c = s[2], d = s[3];
      const int ab = mid(a, b), ac = mid(a, c), ad = mid(a, d);
      const int bc = mid(b, c), bd = mid(b, d), cd = mid(c, d);
      children.push_back({{a, ab, ac, ad}, pid});
      children.push_back({{ab, b, bc, bd}, pid});
      children.push_back({{ac, bc, c, cd}, pid});
      children.push_back({{ad, bd, cd, d}, pid});
      // Octahedron split along the ac-bd diagonal.
      children.push_back({{ab, ac, ad, bd}, pid});
      children.push_back({{ab, ac, bd, bc}, pid});
      children.push_back({{ac, ad, bd, cd}, pid});
      children.push_back({{ac, bc, cd, bd}, pid});
    }
  }

  // Edges lying in boundary facets get their midpoints re-snapped.
  std::set<std::pair<int, int>> boundary_edges;
  for (std::size_t f = 0; f < k.count(top - 1); ++f) {
    if (k.cofaces(top - 1, static_cast<int>(f)).size() != 1) continue;
    const Simplex& s = k.simplex(top - 1, static_cast<int>(f));
    for (std::size_t i = 0; i < s.size(); ++i) {
      for (std::size_t j = i + 1; j < s.size(); ++j) boundary_edges.insert({s[i], s[j]});
    }
  }
  const std::vector<Vec> unsnapped = pool;
  TriangulationReport report = bundle.report;
  report.refinement_depth += 1;
  report.resnapped = 0;
  report.volume_before = bundle.total_volume();
  report.dropped_degenerate.clear();
  for (const auto& [edge, id] : midpoint) {
    const auto& ta = bundle.vertex_tags[static_cast<std::size_t>(edge.first)];
    const auto& tb = bundle.vertex_tags[static_cast<std::size_t>(edge.second)];
    std::vector<int> shared;
    std::set_intersection(ta.begin(), ta.end(), tb.begin(), tb.end(), std::back_inserter(shared));
    std::vector<const Polynomial*> polys;
    const bool on_boundary = boundary_edges.count(edge) != 0;
    for (int c : shared) {
      const bool family = static_cast<std::size_t>(c) >= bundle.family_offset;
      if (family || on_boundary) polys.push_back(&bundle.boundary_conditions[static_cast<std::size_t>(c)].poly);
    }
    if (polys.empty()) continue;
    Vec x = pool[static_cast<std::size_t>(id)];
    const int it = snap_to_boundary(x, polys);
    if (it < 0) {
      report.snap_failures.push_back(id);
      continue;
    }
    pool[static_cast<std::size_t>(id)] = x;
    ++report.resnapped;
  }

  std::vector<Simplex> kept;
  std::vector<int> kept_parent;
  for (std::size_t c = 0; c < children.size(); ++c) {
    std::vector<Vec> before;
    std::vector<Vec> after;
    for (int v : children[c].listed) {
      before.push_back(unsnapped[static_cast<std::size_t>(v)]);
      after.push_back(pool[static_cast<std::size_t>(v)]);
    }
    if (!is_nondegenerate(after) || !same_orientation(before, after)) {
      report.dropped_degenerate.push_back(static_cast<int>(c));
      continue;
    }
    kept.push_back(children[c].listed);
    kept_parent.push_back(children[c].parent);
  }
  const std::vector<SAFormula> family;
  std::vector<int> source;
  TriangulationBundle out = detail::assemble(pool, kept, bundle.formula, bundle.boundary_conditions,
                                             bundle.family_offset, family, std::move(report), &source);
  out.report.volume_after = out.total_volume();
  // A child inherits the strata of its parent.
  out.strata.assign(bundle.strata.size(), {});
  for (std::size_t j = 0; j < bundle.strata.size(); ++j) {
    const std::set<int> parents(bundle.strata[j].begin(), bundle.strata[j].end());
    for (std::size_t i = 0; i < source.size(); ++i) {
      if (parents.count(kept_parent[static_cast<std::size_t>(source[i])]) != 0) out.strata[j].push_back(static_cast<int>(i));
    }
  }
  return out;
}

double shared_face_mismatch(const TriangulationBundle& bundle, int samples_per_axis) {
  const int top = bundle.top_dim();
  if (top < 1) return 0.0;
  const SimplicialComplex& k = bundle.complex;
  // Barycentric lattice on the reference (top-1)-simplex.
  std::vector<Vec> samples;
  const int q = top - 1;
  std::vector<int> idx(static_cast<std::size_t>(q), 0);
  if (q == 0) {
    samples.emplace_back(0);
  } else {
    while (true) {
      const int s = std::accumulate(idx.begin(), idx.end(), 0);
      if (s <= samples_per_axis) {
        Vec t(q);
        for (int i = 0; i < q; ++i) t[i] = static_cast<double>(idx[static_cast<std::size_t>(i)]) / samples_per_axis;
        samples.push_back(t);
      }
      std::size_t a = 0;
      while (a < idx.size() && ++idx[a] > samples_per_axis) idx[a++] = 0;
      if (a == idx.size()) break;
    }
  }
  double worst = 0.0;
  for (std::size_t f = 0; f < k.count(q); ++f) {
    const auto& cf = k.cofaces(q, static_cast<int>(f));
    if (cf.size() < 2) continue;
    const Simplex& face = k.simplex(q, static_cast<int>(f));
    std::vector<SmoothMap> restrictions;
    for (int t : cf) {
      const auto pos = positions_in(face, k.simplex(top, t));
      restrictions.push_back(bundle.charts[static_cast<std::size_t>(t)].map.compose(face_inclusion(pos, top)));
    }
    for (const auto& t : samples) {
      const Vec ref = restrictions.front()(t);
      for (std::size_t r = 1; r < restrictions.size(); ++r) worst = std::max(worst, (restrictions[r](t) - ref).norm());
    }
  }
  return worst;
}

}  // namespace sacalc
