#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "sacalc/errors.hpp"
#include "sacalc/io.hpp"
#include "sacalc/mesh.hpp"
#include "sacalc/triangulate.hpp"

using namespace sacalc;

namespace {

Vec v2(double x, double y) {
  Vec v(2);
  v << x, y;
  return v;
}

Vec v3(double x, double y, double z) {
  Vec v(3);
  v << x, y, z;
  return v;
}

SimplicialComplex mobius_band() {
  std::vector<Vec> pts;
  for (int k = 0; k < 5; ++k) {
    const double a = 2 * M_PI * k / 5;
    pts.push_back(v3(std::cos(a), std::sin(a), 0.3 * (k % 2) + 0.1 * k));
  }
  std::vector<Simplex> tris;
  for (int k = 0; k < 5; ++k) {
    Simplex s{k, (k + 1) % 5, (k + 2) % 5};
    std::sort(s.begin(), s.end());
    tris.push_back(s);
  }
  return SimplicialComplex(pts, tris);
}

}  // namespace

TEST_SUITE("mesh") {
  TEST_CASE("boundary of one triangle") {
    const SimplicialComplex k({v2(0, 0), v2(1, 0), v2(0, 1)}, {{0, 1, 2}});
    Chain c{2, {}};
    c.add(0, 1);
    const Chain b = boundary_chain(k, c);
    Chain expected{1, {}};
    expected.add(k.id({1, 2}), 1);
    expected.add(k.id({0, 2}), -1);
    expected.add(k.id({0, 1}), 1);
    CHECK(b == expected);
  }

  TEST_CASE("complexes are closed under faces with sorted tuples") {
    const SimplicialComplex k({v3(0, 0, 0), v3(1, 0, 0), v3(0, 1, 0), v3(0, 0, 1)}, {{0, 1, 2, 3}});
    CHECK(k.count(0) == 4);
    CHECK(k.count(1) == 6);
    CHECK(k.count(2) == 4);
    CHECK(k.count(3) == 1);
    for (int p = 0; p <= 3; ++p) {
      for (const auto& s : k.simplices(p)) CHECK(std::is_sorted(s.begin(), s.end()));
    }
  }

  TEST_CASE("degenerate simplices are rejected") {
    CHECK_THROWS_AS(SimplicialComplex({v2(0, 0), v2(1, 0), v2(2, 0)}, {{0, 1, 2}}), DegenerateSimplex);
    CHECK_THROWS_AS(SimplicialComplex({v2(0, 0), v2(1, 0), v2(0.5, 1e-14)}, {{0, 1, 2}}), DegenerateSimplex);
  }

  TEST_CASE("boundary of a boundary vanishes on random chains") {
    std::mt19937_64 rng(20);
    std::uniform_int_distribution<long> c(-5, 5);
    const TriangulationBundle b = triangulate(SAFormula::leaf(Polynomial::parse("x^2+y^2+z^2-1", 3), Relation::Le)
                                                  .with_box(Box{{-1.2, 1.2}, {-1.2, 1.2}, {-1.2, 1.2}}),
                                              2);
    for (int p = 2; p <= 3; ++p) {
      for (int trial = 0; trial < 20; ++trial) {
        Chain ch{p, {}};
        for (std::size_t i = 0; i < b.complex.count(p); ++i) ch.add(static_cast<int>(i), c(rng));
        CHECK(boundary_chain(b.complex, boundary_chain(b.complex, ch)).is_zero());
      }
    }
  }

  TEST_CASE("two triangles sharing an edge orient consistently") {
    const SimplicialComplex k({v2(0, 0), v2(1, 0), v2(0, 1), v2(1, 1)}, {{0, 1, 2}, {1, 2, 3}});
    const Chain mu = orient_fundamental(k, 2);
    CHECK(mu.coeffs.size() == 2);
    const Chain b = boundary_chain(k, mu);
    CHECK(b.coeffs.count(k.id({1, 2})) == 0);
    CHECK(b.coeffs.size() == 4);
    CHECK(oracle::enclosed_area(k, b) == doctest::Approx(1.0));
  }

  TEST_CASE("the Moebius band is not orientable") {
    const SimplicialComplex k = mobius_band();
    CHECK_FALSE(oracle::orientable_by_search(k, 2));
    CHECK_THROWS_AS(orient_fundamental(k, 2), NonOrientable);
  }

  TEST_CASE("three triangles on one edge are not a manifold") {
    const SimplicialComplex k({v3(0, 0, 0), v3(1, 0, 0), v3(0, 1, 0), v3(0, -1, 0), v3(0, 0, 1)},
                              {{0, 1, 2}, {0, 1, 3}, {0, 1, 4}});
    CHECK_THROWS_AS(orient_fundamental(k, 2), NonManifold);
  }

  TEST_CASE("disk boundary lies on the circle") {
    const SetInput disk = parse_set(sacalc::read_file(SACALC_DATA_DIR "/disk.json"));
    const TriangulationBundle b = triangulate(disk.formula, 4);
    const Chain mu = orient_fundamental(b.complex, 2);
    const Chain bd = boundary_chain(b.complex, mu);
    CHECK(oracle::enclosed_area(b.complex, bd) == doctest::Approx(b.total_volume()).epsilon(1e-12));
    for (std::size_t e = 0; e < b.complex.count(1); ++e) {
      const auto pts = b.complex.points(1, static_cast<int>(e));
      const bool on_circle = std::abs(pts[0].norm() - 1) < 1e-9 && std::abs(pts[1].norm() - 1) < 1e-9;
      const bool free_edge = b.complex.cofaces(1, static_cast<int>(e)).size() == 1;
      CHECK((bd.coeffs.count(static_cast<int>(e)) == 1) == free_edge);
      if (free_edge) CHECK(on_circle);
    }
  }

  TEST_CASE("annulus boundary is the two circles") {
    const SetInput annulus = parse_set(sacalc::read_file(SACALC_DATA_DIR "/annulus.json"));
    const TriangulationBundle b = triangulate(annulus.formula, 4);
    const Chain bd = boundary_chain(b.complex, orient_fundamental(b.complex, 2));
    int inner = 0;
    int outer = 0;
    for (const auto& [id, c] : bd.coeffs) {
      const auto pts = b.complex.points(1, id);
      const double r = (0.5 * (pts[0] + pts[1])).norm();
      if (std::abs(pts[0].norm() - 0.5) < 1e-9 && std::abs(pts[1].norm() - 0.5) < 1e-9) {
        ++inner;
      } else if (std::abs(pts[0].norm() - 1) < 1e-9 && std::abs(pts[1].norm() - 1) < 1e-9) {
        ++outer;
      } else {
        FAIL("boundary edge off both circles at radius " << r);
      }
    }
    CHECK(inner > 8);
    CHECK(outer > inner);
    // Outer circle counterclockwise, inner clockwise: the enclosed area is the annulus.
    CHECK(oracle::enclosed_area(b.complex, bd) == doctest::Approx(b.total_volume()).epsilon(1e-12));
  }

  TEST_CASE("mesh text round trip is byte exact") {
    const SetInput disk = parse_set(sacalc::read_file(SACALC_DATA_DIR "/disk.json"));
    const TriangulationBundle b = triangulate(disk.formula, 3);
    const Chain mu = orient_fundamental(b.complex, 2);
    const std::string text = write_mesh(b.complex, &mu);
    const MeshFile back = read_mesh(text);
    CHECK(write_mesh(back.complex, &mu) == text);
    CHECK(back.orientation_chain(2) == mu);
    CHECK(back.complex.vertices() == b.complex.vertices());
  }

  TEST_CASE("malformed mesh text names the line") {
    try {
      read_mesh("dim 2\nv 0 0\nv 1 0\ns 2 0 1 7\n");
      FAIL("accepted");
    } catch (const ParseError& e) {
      CHECK(e.location == "line 4");
    }
    CHECK_THROWS_AS(read_mesh("dim 2\nv 0 zero\n"), ParseError);
  }
}
