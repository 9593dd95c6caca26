#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "sacalc/errors.hpp"
#include "sacalc/io.hpp"
#include "sacalc/measure.hpp"

using namespace sacalc;

namespace {

SAFormula load(const std::string& name) {
  return parse_set(read_file(std::string(SACALC_DATA_DIR "/") + name)).formula;
}

}  // namespace

TEST_SUITE("measure") {
  TEST_CASE("unit square has grid measure two at every n") {
    const SAFormula square = load("square.json");
    const GridFrame frame = grid_frame(square);
    for (int n = 1; n <= 64; ++n) {
      const GridEntry e = grid_measure(square, frame, 2, n);
      CHECK(e.pessimistic == static_cast<long long>(n) * n);
      CHECK(e.optimistic == e.pessimistic);
      CHECK(e.v_pessimistic == 2.0);
      CHECK(e.normalized_pessimistic == 1.0);
    }
  }

  TEST_CASE("segment of length three") {
    const SAFormula segment = load("segment.json");
    const GridFrame frame = grid_frame(segment);
    CHECK(frame.side == 3.0);
    for (int n : {1, 4, 9, 32}) {
      const GridEntry e = grid_measure(segment, frame, 1, n);
      CHECK(e.optimistic == n);
      CHECK(e.pessimistic == n);
      CHECK(e.v_pessimistic == doctest::Approx(3 * std::sqrt(2.0)).epsilon(1e-15));
    }
  }

  TEST_CASE("empty set measures zero") {
    const SAFormula empty = SAFormula::leaf(Polynomial::parse("x^2 + y^2 + 1", 2), Relation::Le).with_box(Box{{0, 1}, {0, 1}});
    const GridEntry e = grid_measure(empty, grid_frame(empty), 2, 8);
    CHECK(e.pessimistic == 0);
    CHECK(e.v_pessimistic == 0.0);
  }

  TEST_CASE("disk counts bracket the exact cell count") {
    const SAFormula disk = load("disk_unit_box.json");
    const GridFrame frame = grid_frame(disk);
    for (int n : {2, 5, 8, 16, 31, 64}) {
      const GridEntry e = grid_measure(disk, frame, 2, n);
      const long long exact = oracle::disk_cells(n);
      CHECK(e.optimistic <= exact);
      CHECK(exact <= e.pessimistic);
      CHECK(e.v_optimistic <= e.v_pessimistic);
      CHECK(e.delta == doctest::Approx(std::sqrt(2.0) * 2 / n));
    }
    // Frozen from the exact oracle: 3332 closed cells at n = 64.
    CHECK(oracle::disk_cells(64) == 3332);
  }

  TEST_CASE("disk sequence is bounded and approaches twice the area") {
    const SAFormula disk = load("disk_unit_box.json");
    const GridReport r = grid_measure_sequence(disk, grid_frame(disk), 2, {8, 16, 32, 64});
    CHECK(r.bounded);
    CHECK(r.violations.empty());
    CHECK(std::abs(r.entries.back().v_pessimistic - 2 * M_PI) / (2 * M_PI) < 0.1);
    for (std::size_t i = 1; i < r.entries.size(); ++i) CHECK(r.entries[i].v_pessimistic <= r.entries[i - 1].v_pessimistic);
  }

  TEST_CASE("counts are monotone under inclusion") {
    const SAFormula square = load("square.json");
    const SAFormula triangle = load("triangle.json");
    const GridFrame frame = grid_frame(square);
    for (int n : {1, 3, 8, 20}) {
      const GridEntry small = grid_measure(triangle, frame, 2, n);
      const GridEntry big = grid_measure(square, frame, 2, n);
      CHECK(small.pessimistic <= big.pessimistic);
      CHECK(small.optimistic <= big.optimistic);
    }
  }

  TEST_CASE("exact volume formula") {
    CHECK(grid_volume(4, 2, 2, 1.0, 2) == 2.0);
    CHECK(grid_volume(0, 3, 2, 5.0, 7) == 0.0);
    CHECK(grid_volume(3, 2, 1, 3.0, 3) == doctest::Approx(3 * std::sqrt(2.0)));
  }

  TEST_CASE("sequence arguments are validated") {
    const SAFormula square = load("square.json");
    CHECK_THROWS_AS(grid_measure_sequence(square, grid_frame(square), 2, {4, 2}), InvalidArgument);
    CHECK_THROWS_AS(grid_measure_sequence(square, grid_frame(square), 3, {2}), InvalidArgument);
    CHECK_THROWS_AS(grid_measure_sequence(square, grid_frame(square), 2, {0, 2}), InvalidArgument);
  }
}
