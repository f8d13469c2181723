#include <catch2/catch_amalgamated.hpp>

#include "realm/dream/patch_grid.hpp"
#include "realm/grid.hpp"

using namespace realm;
using dream::axis_starts;
using dream::extract_positions;

TEST_CASE("axis starts: exact fit, single position") {
  CHECK(axis_starts(32, 32, 4) == std::vector<int>{0});
}

TEST_CASE("axis starts: stride multiples plus the edge-aligned tail") {
  // 70px axis, window 32, stride 4: multiples of 4 up to 36, then 70-32=38.
  std::vector<int> expected{0, 4, 8, 12, 16, 20, 24, 28, 32, 36, 38};
  CHECK(axis_starts(70, 32, 4) == expected);
}

TEST_CASE("axis starts: edge position already on the stride lattice") {
  // 64px axis, window 32, stride 4: 64-32=32 is itself a multiple of 4.
  std::vector<int> expected{0, 4, 8, 12, 16, 20, 24, 28, 32};
  CHECK(axis_starts(64, 32, 4) == expected);
  CHECK(expected.size() == 9);
}

TEST_CASE("patch grid: 70x70 window 32 stride 4 has 121 positions") {
  auto grid = extract_positions(70, 70, 32, 4);
  REQUIRE(grid.has_value());
  CHECK(grid->positions.size() == 121);
  // Row-major: first row sweeps x with y=0.
  CHECK(grid->positions.front().x == 0);
  CHECK(grid->positions.front().y == 0);
  CHECK(grid->positions[1].x == 4);
  CHECK(grid->positions[1].y == 0);
  CHECK(grid->positions[10].x == 38);
  CHECK(grid->positions[10].y == 0);
  CHECK(grid->positions[11].x == 0);
  CHECK(grid->positions[11].y == 4);
  CHECK(grid->positions.back().x == 38);
  CHECK(grid->positions.back().y == 38);
}

TEST_CASE("patch grid: every pixel is covered by at least one patch") {
  for (int dim : {33, 48, 70, 100}) {
    auto grid = extract_positions(dim, dim, 32, 4);
    REQUIRE(grid.has_value());
    GridI cover(dim, dim, 0);
    for (std::size_t k = 0; k < grid->positions.size(); ++k) {
      Rect r = grid->patch_rect(k);
      CHECK(r.x1() <= dim);
      CHECK(r.y1() <= dim);
      for (int y = r.y0; y < r.y1(); ++y)
        for (int x = r.x0; x < r.x1(); ++x) cover.at(y, x) += 1;
    }
    int uncovered = 0;
    for (int v : cover.values())
      if (v == 0) ++uncovered;
    CHECK(uncovered == 0);
  }
}

TEST_CASE("patch grid: window larger than image signals scale skip") {
  CHECK_FALSE(extract_positions(48, 48, 64, 4).has_value());
  CHECK_FALSE(extract_positions(48, 100, 64, 4).has_value());
  CHECK_FALSE(extract_positions(100, 48, 64, 4).has_value());
  CHECK(extract_positions(64, 64, 64, 4).has_value());
}

TEST_CASE("patch grid: rectangular image uses per-axis starts") {
  auto grid = extract_positions(/*height=*/40, /*width=*/70, 32, 4);
  REQUIRE(grid.has_value());
  // y starts: 0,4,8 (40-32=8 on-lattice) -> 3; x starts: 11 as above.
  CHECK(grid->positions.size() == 3 * 11);
  CHECK(grid->positions.back().y == 8);
  CHECK(grid->positions.back().x == 38);
}

TEST_CASE("patch grid: invalid parameters rejected") {
  CHECK_THROWS_AS(extract_positions(48, 48, 0, 4), InvalidInputError);
  CHECK_THROWS_AS(extract_positions(48, 48, -16, 4), InvalidInputError);
  CHECK_THROWS_AS(extract_positions(48, 48, 16, 0), InvalidInputError);
  CHECK_THROWS_AS(extract_positions(0, 48, 16, 4), InvalidInputError);
  CHECK_THROWS_AS(extract_positions(48, 0, 16, 4), InvalidInputError);
}

TEST_CASE("patch grid: stride 1 is dense") {
  auto grid = extract_positions(10, 10, 4, 1);
  REQUIRE(grid.has_value());
  CHECK(grid->positions.size() == 7 * 7);
}
