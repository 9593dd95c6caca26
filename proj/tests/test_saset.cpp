#include <doctest.h>

#include <random>

#include "sacalc/errors.hpp"
#include "sacalc/io.hpp"
#include "sacalc/saset.hpp"

using namespace sacalc;

namespace {

SAFormula leaf(const char* p, Relation r) { return SAFormula::leaf(Polynomial::parse(p, 2), r); }

const SAFormula kDisk = leaf("x^2 + y^2 - 1", Relation::Le);

std::vector<double> pt(double x, double y) { return {x, y}; }

}  // namespace

TEST_SUITE("saset") {
  TEST_CASE("point classification examples") {
    CHECK(classify_point(kDisk, pt(0, 0)));
    CHECK_FALSE(classify_point(kDisk, pt(2, 0)));
    const SAFormula circle = leaf("x^2 + y^2 - 1", Relation::Eq);
    CHECK(classify_point(circle, pt(1, 0)));
    CHECK_FALSE(classify_point(circle, pt(0.5, 0)));
    CHECK_THROWS_AS(kDisk.contains(std::vector<double>{1.0}), DimensionMismatch);
  }

  TEST_CASE("box classification examples") {
    CHECK(kDisk.classify_box(Box{{-0.1, 0.1}, {-0.1, 0.1}}) == BoxClass::AllIn);
    CHECK(kDisk.classify_box(Box{{2, 3}, {0, 1}}) == BoxClass::AllOut);
    CHECK(kDisk.classify_box(Box{{0.9, 1.1}, {-0.1, 0.1}}) == BoxClass::Mixed);
  }

  TEST_CASE("box classification is never contradicted by sampled points") {
    std::mt19937_64 rng(10);
    std::uniform_real_distribution<double> u(0, 1);
    const SAFormula f = SAFormula::any_of(
        {SAFormula::all_of({kDisk, leaf("y - x^2", Relation::Gt)}), leaf("(x - 1)^2 + y^2 - 1/4", Relation::Lt)});
    int decided = 0;
    for (int b = 0; b < 200; ++b) {
      const double x0 = -1.5 + 3 * u(rng);
      const double y0 = -1.5 + 3 * u(rng);
      const double w = 0.02 + 0.3 * u(rng);
      const Box box{{x0, x0 + w}, {y0, y0 + w}};
      const BoxClass c = f.classify_box(box);
      if (c == BoxClass::Mixed) continue;
      ++decided;
      for (int k = 0; k < 1000; ++k) {
        const bool in = f.contains(pt(x0 + w * u(rng), y0 + w * u(rng)));
        if (c == BoxClass::AllIn) REQUIRE(in);
        if (c == BoxClass::AllOut) REQUIRE_FALSE(in);
      }
    }
    CHECK(decided > 50);
  }

  TEST_CASE("double negation and De Morgan agree pointwise") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-2, 2);
    const SAFormula a = kDisk;
    const SAFormula b = leaf("x y - 1/4", Relation::Ge);
    const SAFormula f = SAFormula::all_of({a, b});
    const SAFormula nn = SAFormula::negate(SAFormula::negate(f));
    const SAFormula lhs = SAFormula::negate(f);
    const SAFormula rhs = SAFormula::any_of({SAFormula::negate(a), SAFormula::negate(b)});
    const SAFormula nnf = lhs.negation_normal_form();
    for (int k = 0; k < 2000; ++k) {
      const auto x = pt(u(rng), u(rng));
      CHECK(nn.contains(x) == f.contains(x));
      CHECK(lhs.contains(x) == rhs.contains(x));
      CHECK(nnf.contains(x) == lhs.contains(x));
    }
    // Exact boundary points: the complement of >= is <, so they leave.
    CHECK(f.contains(pt(0.5, 0.5)));
    CHECK_FALSE(lhs.contains(pt(0.5, 0.5)));
  }

  TEST_CASE("negated equality splits into two strict inequalities") {
    const SAFormula n = SAFormula::negate(leaf("x", Relation::Eq)).negation_normal_form();
    CHECK(n.kind() == SAFormula::Kind::Or);
    CHECK(n.leaves().size() == 2);
  }

  TEST_CASE("declared boxes must contain the set") {
    CHECK_NOTHROW(kDisk.with_box(Box{{-1, 1}, {-1, 1}}));
    CHECK_THROWS_AS(kDisk.with_box(Box{{-0.5, 1}, {-1, 1}}), InvalidArgument);
  }

  TEST_CASE("unbounded sets are truncated to a box") {
    const SAFormula half = leaf("y", Relation::Ge);
    CHECK_THROWS_AS(half.with_box(Box{{-1, 1}, {0, 1}}), InvalidArgument);
    const SAFormula cut = half.restricted_to(Box{{-1, 1}, {0, 1}});
    CHECK(cut.box().has_value());
    CHECK(cut.contains(pt(0, 0.5)));
    CHECK_FALSE(cut.contains(pt(0, 2)));
    CHECK_FALSE(cut.contains(pt(2, 0.5)));
    const SetInput in = parse_set(R"({"box":[[-1,1],[0,1]],"truncate":true,"formula":{"poly":"y","rel":">=0"}})");
    CHECK_FALSE(in.formula.contains(pt(0, 3)));
  }

  TEST_CASE("set documents are validated field by field") {
    CHECK_NOTHROW(parse_set(R"({"box":[[-2,2],[-2,2]],"formula":{"not":{"poly":"x^2+y^2-1","rel":">0"}}})"));
    auto message = [](const char* text) {
      try {
        parse_set(text);
      } catch (const ParseError& e) {
        return e.location;
      }
      return std::string("accepted");
    };
    CHECK(message(R"({"box":[[0,1]],"formula":{"poly":"x","rel":">=0"},"colour":1})") == "set");
    CHECK(message(R"({"box":[[1,0]],"formula":{"poly":"x","rel":">=0"}})") == "set.box[0]");
    CHECK(message(R"({"box":[[0,1]],"formula":{"poly":"x","rel":"~0"}})") == "set.formula.rel");
    CHECK(message(R"({"box":[[0,1]],"formula":{"and":[{"poly":"x^","rel":">=0"}]}})") == "set.formula.and[0].poly");
    CHECK(message(R"({"box":[[0,1]],"formula":{"poly":"x","rel":">=0"})").rfind("byte ", 0) == 0);
    CHECK(message(R"({"dim":2,"box":[[0,1]],"formula":{"poly":"x","rel":">=0"}})") == "set.dim");
  }
}
