#include <doctest.h>

#include <cmath>
#include <random>

#include "sacalc/errors.hpp"
#include "sacalc/form.hpp"
#include "sacalc/interval.hpp"
#include "sacalc/polynomial.hpp"
#include "sacalc/smooth_map.hpp"

using namespace sacalc;

namespace {

Polynomial P(const char* text, std::size_t n = 2) { return Polynomial::parse(text, n); }

Vec vec(std::initializer_list<double> xs) {
  Vec v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

// Random polynomial map R^n -> R^m with small integer coefficients, degree <= 2.
SmoothMap random_map(std::mt19937_64& rng, std::size_t n, std::size_t m) {
  std::uniform_int_distribution<int> c(-3, 3);
  std::vector<Polynomial> comps;
  for (std::size_t k = 0; k < m; ++k) {
    Polynomial p(n);
    for (std::size_t i = 0; i < n; ++i) {
      p += Polynomial::variable(n, i) * Rational(c(rng));
      for (std::size_t j = i; j < n; ++j) p += Polynomial::variable(n, i) * Polynomial::variable(n, j) * Rational(c(rng), 4);
    }
    p += Polynomial::constant(n, Rational(c(rng)));
    comps.push_back(p);
  }
  return SmoothMap::polynomial(comps);
}

DifferentialForm random_form(std::mt19937_64& rng, std::size_t degree, std::size_t m) {
  std::uniform_int_distribution<int> c(-2, 2);
  DifferentialForm w(degree, m);
  for (const auto& idx : combinations(m, degree)) {
    Polynomial p = Polynomial::constant(m, Rational(c(rng)));
    for (std::size_t i = 0; i < m; ++i) p += Polynomial::variable(m, i).pow(2) * Rational(c(rng));
    w.add(p, idx);
  }
  return w;
}

}  // namespace

TEST_SUITE("algebra") {
  TEST_CASE("polynomial evaluation examples") {
    const Polynomial circle = P("x^2 + y^2 - 1");
    CHECK(circle.eval(std::vector<double>{1, 0}) == 0.0);
    CHECK(circle.eval(std::vector<double>{0, 0}) == -1.0);
    CHECK(circle.eval(std::vector<double>{2, 0}) == 3.0);
    CHECK(circle.eval_exact(std::vector<double>{0.6, 0.8}) != 0);  // 0.6 and 0.8 are not exact binary fractions
    CHECK(circle.eval(std::vector<Rational>{Rational(3, 5), Rational(4, 5)}) == 0);
    CHECK_THROWS_AS(circle.eval(std::vector<double>{1, 2, 3}), DimensionMismatch);
  }

  TEST_CASE("gradient examples") {
    CHECK(P("x^2 + y^2 - 1").gradient(std::vector<double>{1, 0}) == std::vector<double>{2, 0});
    CHECK(P("x^2 + y^2 - 1").gradient(std::vector<double>{0, 0}) == std::vector<double>{0, 0});
    CHECK(P("x^3 - y^2").gradient(std::vector<double>{1, 1}) == std::vector<double>{3, -2});
  }

  TEST_CASE("gradient matches central differences at random points") {
    std::mt19937_64 rng(0);
    std::uniform_real_distribution<double> u(-1, 1);
    const Polynomial p = P("x1^3 x2 - 2 x2^2 x3 + 1/3 x1 x3^4 + 5", 3);
    for (int trial = 0; trial < 200; ++trial) {
      std::vector<double> x{u(rng), u(rng), u(rng)};
      const auto g = p.gradient(x);
      for (std::size_t i = 0; i < 3; ++i) {
        auto a = x;
        auto b = x;
        a[i] += 1e-4;
        b[i] -= 1e-4;
        CHECK(std::abs((p.eval(a) - p.eval(b)) / 2e-4 - g[i]) < 1e-6);
      }
    }
  }

  TEST_CASE("parser accepts the documented syntax and rejects garbage") {
    CHECK(P("3/4 x1^2 x2 - x2", 2) == P("0.75*x^2*y - y"));
    CHECK(P("(x + y)^2") == P("x^2 + 2 x y + y^2"));
    CHECK(P("-(x - 1)") == P("1 - x"));
    CHECK_THROWS_AS(P("x +* y"), ParseError);
    CHECK_THROWS_AS(P("x3", 2), ParseError);
    CHECK_THROWS_AS(P("x^"), ParseError);
  }

  TEST_CASE("polynomial representation invariants") {
    const Polynomial p = P("x^2 + y - x^2");
    CHECK(p.terms().size() == 1);
    const Polynomial cancelled = P("x y + 2 x y - 3 x y + y");
    CHECK(cancelled.terms().size() == 1);
    for (const auto& [e, c] : cancelled.terms()) CHECK(c != 0);
    CHECK(P("x y - x y").is_zero());
  }

  TEST_CASE("interval enclosure contains sampled values") {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(0, 1);
    const Polynomial p = P("x^3 - 2 x y + y^2 - 1/3");
    for (int trial = 0; trial < 50; ++trial) {
      const double a = u(rng) * 2 - 1;
      const double b = u(rng) * 2 - 1;
      const std::vector<Interval> box{Interval(a, a + 0.3), Interval(b, b + 0.2)};
      const Interval range = p.eval(box);
      for (int k = 0; k < 20; ++k) {
        const std::vector<double> x{a + 0.3 * u(rng), b + 0.2 * u(rng)};
        CHECK(range.contains(p.eval(x)));
      }
    }
  }

  TEST_CASE("exterior derivative examples") {
    const DifferentialForm x_dy = DifferentialForm(1, 2).add(P("x"), {1});
    CHECK(exterior_derivative(x_dy) == DifferentialForm(2, 2).add(P("1"), {0, 1}));
    CHECK(exterior_derivative(DifferentialForm(1, 2).add(P("5"), {0})).is_zero());
    const DifferentialForm rot = DifferentialForm(1, 2).add(P("-y"), {0}).add(P("x"), {1});
    CHECK(exterior_derivative(rot) == DifferentialForm(2, 2).add(P("2"), {0, 1}));
    const DifferentialForm top = DifferentialForm(2, 2).add(P("x y"), {0, 1});
    CHECK(exterior_derivative(top).is_zero());
    CHECK(exterior_derivative(top).degree() == 3);
  }

  TEST_CASE("index sets are normalized with the permutation sign") {
    CHECK(DifferentialForm(2, 3).add(P("x", 3), {2, 0}) == DifferentialForm(2, 3).add(-P("x", 3), {0, 2}));
    CHECK(DifferentialForm(2, 3).add(P("x", 3), {1, 1}).is_zero());
  }

  TEST_CASE("d of d is exactly zero on random forms") {
    std::mt19937_64 rng(2);
    for (std::size_t m = 1; m <= 4; ++m) {
      for (std::size_t p = 0; p + 2 <= m; ++p) {
        for (int trial = 0; trial < 5; ++trial) {
          CHECK(exterior_derivative(exterior_derivative(random_form(rng, p, m))).is_zero());
        }
      }
    }
  }

  TEST_CASE("pullback of the area form through polar coordinates is r") {
    const SmoothMap polar(
        2, 2, [](const Vec& q) { return vec({q[0] * std::cos(q[1]), q[0] * std::sin(q[1])}); },
        [](const Vec& q) -> std::optional<Mat> {
          Mat j(2, 2);
          j << std::cos(q[1]), -q[0] * std::sin(q[1]), std::sin(q[1]), q[0] * std::cos(q[1]);
          return j;
        });
    const DifferentialForm area = DifferentialForm(2, 2).add(P("1"), {0, 1});
    for (double r : {0.1, 0.5, 2.0}) {
      for (double th : {0.0, 1.0, 4.0}) CHECK(pullback(area, polar, vec({r, th})).coeffs[0] == doctest::Approx(r).epsilon(1e-14));
    }
  }

  TEST_CASE("identity pullback leaves a form unchanged") {
    const DifferentialForm dx = DifferentialForm(1, 2).add(P("1"), {0});
    const Covector c = pullback(dx, SmoothMap::identity(2), vec({0.3, -0.7}));
    CHECK(c.coeffs == std::vector<double>{1.0, 0.0});
  }

  TEST_CASE("pullback is functorial under composition") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-1, 1);
    double worst = 0.0;
    for (std::size_t p = 0; p <= 2; ++p) {
      const SmoothMap h = random_map(rng, 3, 3);
      const SmoothMap g = random_map(rng, 3, 4);
      const DifferentialForm w = random_form(rng, p, 4);
      const SmoothMap gh = g.compose(h);
      for (int k = 0; k < 100; ++k) {
        const Vec x = vec({u(rng), u(rng), u(rng)});
        const Covector direct = pullback(w, gh, x);
        const Covector staged = pull_covector(pullback(w, g, h(x)), h.jacobian(x).value);
        worst = std::max(worst, direct.max_abs_diff(staged));
      }
    }
    CHECK(worst < 1e-9);
  }

  TEST_CASE("closed-form jacobian agrees with central differences") {
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(-1, 1);
    const SmoothMap f = random_map(rng, 3, 2);
    for (int k = 0; k < 50; ++k) {
      const Vec x = vec({u(rng), u(rng), u(rng)});
      const JacobianSample j = f.jacobian(x);
      CHECK_FALSE(j.finite_difference);
      CHECK((j.value - f.numeric_jacobian(x, 1e-5)).cwiseAbs().maxCoeff() < 1e-8);
    }
  }

  TEST_CASE("declined closed forms fall back to flagged differences") {
    const SmoothMap f(
        1, 1, [](const Vec& t) { return vec({std::abs(t[0])}); },
        [](const Vec& t) -> std::optional<Mat> {
          if (t[0] == 0.0) return std::nullopt;
          return Mat::Constant(1, 1, t[0] > 0 ? 1.0 : -1.0);
        });
    CHECK_FALSE(f.jacobian(vec({0.5})).finite_difference);
    const JacobianSample at_kink = f.jacobian(vec({0.0}));
    CHECK(at_kink.finite_difference);
    CHECK(std::abs(at_kink.value(0, 0)) < 1e-12);
    CHECK_THROWS_AS(f.without_fd_fallback().jacobian(vec({0.0})), JacobianUnavailable);
  }

  TEST_CASE("finite differences go one-sided at the domain edge") {
    const SmoothMap f(
        1, 1, [](const Vec& t) { return vec({t[0] * t[0]}); }, {}, [](const Vec& t) { return t[0] >= 0.0; });
    const JacobianSample j = f.jacobian(vec({0.0}));
    CHECK(j.finite_difference);
    CHECK(std::abs(j.value(0, 0)) < 1e-5);
  }
}
