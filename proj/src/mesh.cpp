#include "sacalc/mesh.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <deque>
#include <set>
#include <sstream>

#include "sacalc/errors.hpp"

namespace sacalc {

double simplex_volume(std::span<const Vec> points) {
  if (points.size() <= 1) return 1.0;
  // Lexicographic vertex order, so the rounded value ignores the listing order.
  std::vector<const Vec*> sorted;
  for (const auto& q : points) sorted.push_back(&q);
  std::sort(sorted.begin(), sorted.end(), [](const Vec* a, const Vec* b) {
    return std::lexicographical_compare(a->begin(), a->end(), b->begin(), b->end());
  });
  const auto p = static_cast<Eigen::Index>(points.size() - 1);
  Mat e(points.front().size(), p);
  for (Eigen::Index i = 0; i < p; ++i) e.col(i) = *sorted[static_cast<std::size_t>(i) + 1] - *sorted.front();
  const double gram = (e.transpose() * e).determinant();
  double fact = 1.0;
  for (Eigen::Index i = 2; i <= p; ++i) fact *= static_cast<double>(i);
  return std::sqrt(std::max(gram, 0.0)) / fact;
}

double simplex_diameter(std::span<const Vec> points) {
  double d = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    for (std::size_t j = i + 1; j < points.size(); ++j) d = std::max(d, (points[i] - points[j]).norm());
  }
  return d;
}

bool is_nondegenerate(std::span<const Vec> points) {
  if (points.size() <= 1) return true;
  const double diam = simplex_diameter(points);
  if (diam == 0.0) return false;
  return simplex_volume(points) > kDegeneracyTolerance * std::pow(diam, static_cast<double>(points.size() - 1));
}

namespace {

std::string describe(const Simplex& s) {
  std::ostringstream os;
  os << "[";
  for (std::size_t i = 0; i < s.size(); ++i) os << (i ? " " : "") << s[i];
  os << "]";
  return os.str();
}

}  // namespace

SimplicialComplex::SimplicialComplex(std::vector<Vec> vertices, std::vector<Simplex> maximal)
    : vertices_(std::move(vertices)) {
  if (!vertices_.empty()) ambient_ = static_cast<std::size_t>(vertices_.front().size());
  for (const auto& v : vertices_) {
    if (static_cast<std::size_t>(v.size()) != ambient_) throw DimensionMismatch("vertices of mixed dimension");
  }
  int top = vertices_.empty() ? -1 : 0;
  for (auto& s : maximal) {
    std::sort(s.begin(), s.end());
    if (s.empty()) throw InvalidArgument("empty simplex");
    if (std::adjacent_find(s.begin(), s.end()) != s.end()) throw DegenerateSimplex("repeated vertex in simplex " + describe(s));
    for (int v : s) {
      if (v < 0 || static_cast<std::size_t>(v) >= vertices_.size()) {
        throw InvalidArgument("simplex " + describe(s) + " references a missing vertex");
      }
    }
    top = std::max(top, static_cast<int>(s.size()) - 1);
  }
  by_dim_.assign(static_cast<std::size_t>(top + 1), {});
  std::vector<std::set<Simplex>> sets(static_cast<std::size_t>(top + 1));
  for (std::size_t v = 0; v < vertices_.size(); ++v) sets[0].insert(Simplex{static_cast<int>(v)});
  for (const auto& s : maximal) {
    std::vector<Vec> pts;
    for (int v : s) pts.push_back(vertices_[static_cast<std::size_t>(v)]);
    if (!is_nondegenerate(pts)) {
      std::ostringstream os;
      os << "degenerate simplex " << describe(s) << ": volume " << simplex_volume(pts) << ", diameter "
         << simplex_diameter(pts);
      throw DegenerateSimplex(os.str());
    }
    // All faces: every nonempty subset.
    const std::size_t k = s.size();
    for (unsigned mask = 1; mask < (1U << k); ++mask) {
      Simplex f;
      for (std::size_t i = 0; i < k; ++i) {
        if (mask & (1U << i)) f.push_back(s[i]);
      }
      sets[f.size() - 1].insert(std::move(f));
    }
  }
  index_.assign(by_dim_.size(), {});
  for (std::size_t p = 0; p < sets.size(); ++p) {
    by_dim_[p].assign(sets[p].begin(), sets[p].end());
    for (std::size_t i = 0; i < by_dim_[p].size(); ++i) index_[p].emplace(by_dim_[p][i], static_cast<int>(i));
  }
  faces_.assign(by_dim_.size(), {});
  cofaces_.assign(by_dim_.size(), {});
  for (std::size_t p = 0; p < by_dim_.size(); ++p) {
    faces_[p].assign(by_dim_[p].size(), {});
    cofaces_[p].assign(by_dim_[p].size(), {});
  }
  for (std::size_t p = 1; p < by_dim_.size(); ++p) {
    for (std::size_t i = 0; i < by_dim_[p].size(); ++i) {
      const Simplex& s = by_dim_[p][i];
      for (std::size_t omit = 0; omit < s.size(); ++omit) {
        Simplex f;
        for (std::size_t j = 0; j < s.size(); ++j) {
          if (j != omit) f.push_back(s[j]);
        }
        const int fid = index_[p - 1].at(f);
        faces_[p][i].push_back(fid);
        cofaces_[p - 1][static_cast<std::size_t>(fid)].push_back(static_cast<int>(i));
      }
    }
  }
}

std::size_t SimplicialComplex::count(int p) const {
  if (p < 0 || p > dimension()) return 0;
  return by_dim_[static_cast<std::size_t>(p)].size();
}

const std::vector<Simplex>& SimplicialComplex::simplices(int p) const {
  static const std::vector<Simplex> kEmpty;
  if (p < 0 || p > dimension()) return kEmpty;
  return by_dim_[static_cast<std::size_t>(p)];
}

std::optional<int> SimplicialComplex::find(const Simplex& s) const {
  const int p = static_cast<int>(s.size()) - 1;
  if (p < 0 || p > dimension()) return std::nullopt;
  Simplex sorted = s;
  std::sort(sorted.begin(), sorted.end());
  const auto& idx = index_[static_cast<std::size_t>(p)];
  auto it = idx.find(sorted);
  if (it == idx.end()) return std::nullopt;
  return it->second;
}

int SimplicialComplex::id(const Simplex& s) const {
  auto found = find(s);
  if (!found) throw InvalidArgument("simplex " + describe(s) + " not in complex");
  return *found;
}

const std::vector<int>& SimplicialComplex::faces(int p, int id) const {
  return faces_.at(static_cast<std::size_t>(p)).at(static_cast<std::size_t>(id));
}

const std::vector<int>& SimplicialComplex::cofaces(int p, int id) const {
  return cofaces_.at(static_cast<std::size_t>(p)).at(static_cast<std::size_t>(id));
}

std::vector<Vec> SimplicialComplex::points(int p, int id) const {
  std::vector<Vec> out;
  for (int v : simplex(p, id)) out.push_back(vertices_[static_cast<std::size_t>(v)]);
  return out;
}

double SimplicialComplex::volume(int p, int id) const { return simplex_volume(points(p, id)); }

std::vector<std::pair<int, int>> SimplicialComplex::maximal() const {
  std::vector<std::pair<int, int>> out;
  for (int p = 0; p <= dimension(); ++p) {
    for (std::size_t i = 0; i < count(p); ++i) {
      if (cofaces(p, static_cast<int>(i)).empty()) out.emplace_back(p, static_cast<int>(i));
    }
  }
  return out;
}

void Chain::add(int id, long c) {
  if (c == 0) return;
  auto [it, inserted] = coeffs.try_emplace(id, c);
  if (!inserted) {
    it->second += c;
    if (it->second == 0) coeffs.erase(it);
  }
}

Chain Chain::negated() const {
  Chain out{dim, {}};
  for (const auto& [id, c] : coeffs) out.coeffs.emplace(id, -c);
  return out;
}

Chain boundary_chain(const SimplicialComplex& complex, const Chain& chain) {
  if (chain.dim < 1) throw InvalidArgument("boundary of a 0-chain");
  Chain out{chain.dim - 1, {}};
  for (const auto& [id, c] : chain.coeffs) {
    const auto& f = complex.faces(chain.dim, id);
    for (std::size_t i = 0; i < f.size(); ++i) out.add(f[i], i % 2 == 0 ? c : -c);
  }
  return out;
}

Chain orient_fundamental(const SimplicialComplex& complex, int p) {
  const std::size_t n = complex.count(p);
  Chain out{p, {}};
  if (n == 0) return out;
  if (p >= 1) {
    for (std::size_t f = 0; f < complex.count(p - 1); ++f) {
      const auto& cf = complex.cofaces(p - 1, static_cast<int>(f));
      if (cf.size() >= 3) {
        throw NonManifold("face " + describe(complex.simplex(p - 1, static_cast<int>(f))) + " meets " +
                          std::to_string(cf.size()) + " " + std::to_string(p) + "-simplices");
      }
    }
  }
  std::vector<int> sign(n, 0);
  for (std::size_t seed = 0; seed < n; ++seed) {
    if (sign[seed] != 0) continue;
    int s0 = 1;
    if (static_cast<std::size_t>(p) == complex.ambient_dim() && p >= 1) {
      const auto pts = complex.points(p, static_cast<int>(seed));
      Mat m(p, p);
      for (int i = 0; i < p; ++i) m.col(i) = pts[static_cast<std::size_t>(i) + 1] - pts[0];
      s0 = m.determinant() > 0.0 ? 1 : -1;
    }
    sign[seed] = s0;
    std::deque<int> queue{static_cast<int>(seed)};
    while (!queue.empty()) {
      const int s = queue.front();
      queue.pop_front();
      if (p == 0) break;
      const auto& fs = complex.faces(p, s);
      for (std::size_t i = 0; i < fs.size(); ++i) {
        const int inc_s = i % 2 == 0 ? 1 : -1;
        for (int t : complex.cofaces(p - 1, fs[i])) {
          if (t == s) continue;
          const auto& ft = complex.faces(p, t);
          const auto j = static_cast<std::size_t>(std::find(ft.begin(), ft.end(), fs[i]) - ft.begin());
          const int inc_t = j % 2 == 0 ? 1 : -1;
          const int want = -sign[static_cast<std::size_t>(s)] * inc_s * inc_t;
          int& cur = sign[static_cast<std::size_t>(t)];
          if (cur == 0) {
            cur = want;
            queue.push_back(t);
          } else if (cur != want) {
            throw NonOrientable("inconsistent orientation across face " +
                                describe(complex.simplex(p - 1, fs[i])));
          }
        }
      }
    }
  }
  for (std::size_t i = 0; i < n; ++i) out.coeffs.emplace(static_cast<int>(i), sign[i]);
  return out;
}

Chain MeshFile::orientation_chain(int p) const {
  Chain c{p, {}};
  for (std::size_t i = 0; i < complex.count(p); ++i) {
    auto it = orientation.find({p, static_cast<int>(i)});
    c.add(static_cast<int>(i), it == orientation.end() ? 1 : it->second);
  }
  return c;
}

namespace {

void append_double(std::string& out, double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  out.append(buf, res.ptr);
}

}  // namespace

std::string write_mesh(const SimplicialComplex& complex, const Chain* orientation) {
  std::string out = "dim " + std::to_string(complex.ambient_dim()) + "\n";
  for (const auto& v : complex.vertices()) {
    out += "v";
    for (Eigen::Index i = 0; i < v.size(); ++i) {
      out += ' ';
      append_double(out, v[i]);
    }
    out += '\n';
  }
  for (const auto& [p, id] : complex.maximal()) {
    out += "s " + std::to_string(p);
    for (int v : complex.simplex(p, id)) out += " " + std::to_string(v);
    if (orientation != nullptr && orientation->dim == p) {
      auto it = orientation->coeffs.find(id);
      if (it != orientation->coeffs.end()) out += it->second > 0 ? " +" : " -";
    }
    out += '\n';
  }
  return out;
}

MeshFile read_mesh(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t lineno = 0;
  std::optional<std::size_t> dim;
  std::vector<Vec> vertices;
  struct Entry {
    Simplex s;
    int sign;
    bool has_sign;
  };
  std::vector<Entry> entries;
  auto where = [&] { return "line " + std::to_string(lineno); };
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream ls(line);
    std::string tag;
    if (!(ls >> tag) || tag[0] == '#') continue;
    if (tag == "dim") {
      long n = -1;
      if (!(ls >> n) || n < 0) throw ParseError(where(), "expected 'dim N'");
      dim = static_cast<std::size_t>(n);
    } else if (tag == "v") {
      if (!dim) throw ParseError(where(), "vertex before 'dim' header");
      Vec v(static_cast<Eigen::Index>(*dim));
      for (std::size_t i = 0; i < *dim; ++i) {
        std::string tok;
        if (!(ls >> tok)) throw ParseError(where(), "vertex needs " + std::to_string(*dim) + " coordinates");
        double x = 0.0;
        auto res = std::from_chars(tok.data(), tok.data() + tok.size(), x);
        if (res.ec != std::errc() || res.ptr != tok.data() + tok.size()) {
          throw ParseError(where(), "bad coordinate '" + tok + "'");
        }
        v[static_cast<Eigen::Index>(i)] = x;
      }
      std::string extra;
      if (ls >> extra) throw ParseError(where(), "too many coordinates");
      vertices.push_back(std::move(v));
    } else if (tag == "s") {
      long p = -1;
      if (!(ls >> p) || p < 0) throw ParseError(where(), "expected 's p i0 .. ip'");
      Entry e{{}, 1, false};
      for (long i = 0; i <= p; ++i) {
        long v = -1;
        if (!(ls >> v)) throw ParseError(where(), "simplex of dimension " + std::to_string(p) + " needs " + std::to_string(p + 1) + " vertices");
        if (v < 0 || static_cast<std::size_t>(v) >= vertices.size()) {
          throw ParseError(where(), "vertex index " + std::to_string(v) + " out of range");
        }
        e.s.push_back(static_cast<int>(v));
      }
      std::string sign;
      if (ls >> sign) {
        if (sign != "+" && sign != "-") throw ParseError(where(), "orientation must be + or -");
        e.sign = sign == "+" ? 1 : -1;
        e.has_sign = true;
      }
      // Sorting the tuple flips the orientation by the permutation parity.
      for (std::size_t i = 1; i < e.s.size(); ++i) {
        for (std::size_t j = i; j > 0 && e.s[j - 1] > e.s[j]; --j) {
          std::swap(e.s[j - 1], e.s[j]);
          e.sign = -e.sign;
        }
      }
      entries.push_back(std::move(e));
    } else {
      throw ParseError(where(), "unknown record '" + tag + "'");
    }
  }
  if (!dim) throw ParseError("line 1", "missing 'dim N' header");
  std::vector<Simplex> maximal;
  for (const auto& e : entries) maximal.push_back(e.s);
  MeshFile mf{SimplicialComplex(std::move(vertices), std::move(maximal)), {}};
  for (const auto& e : entries) {
    if (!e.has_sign) continue;
    const int p = static_cast<int>(e.s.size()) - 1;
    mf.orientation[{p, mf.complex.id(e.s)}] = e.sign;
  }
  return mf;
}

}  // namespace sacalc
