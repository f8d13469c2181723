#include <cstdio>
#include <filesystem>
#include <fstream>

#include <catch2/catch_amalgamated.hpp>

#include "realm/backends/mock.hpp"
#include "realm/dream/grid_io.hpp"
#include "realm/dream/heatmap.hpp"
#include "realm/dream/pipeline.hpp"
#include "realm/rng.hpp"

using namespace realm;
using namespace realm::dream;

namespace {

std::filesystem::path temp_file(const char* name) {
  auto dir = std::filesystem::temp_directory_path() / "realm_grid_io_test";
  std::filesystem::create_directories(dir);
  return dir / name;
}

GridD awkward_grid() {
  // Values chosen to stress bitwise round-trip: denormals, exact halves,
  // long mantissas.
  GridD g(3, 4, 0.0);
  Rng rng(31337);
  for (auto& v : g.values()) v = rng.next_double() * 1e-3;
  g.at(0, 0) = 0.0;
  g.at(0, 1) = 5e-324;  // smallest subnormal
  g.at(1, 2) = 1.0 / 3.0;
  g.at(2, 3) = 1.0;
  return g;
}

}  // namespace

TEST_CASE("grid file round-trips bit-exactly") {
  GridFile file;
  file.kind = GridFile::Kind::kFused;
  file.scales_used = {128, 64, 32};
  file.description_hash = fnv1a64("a bent horizon");
  file.grid = awkward_grid();

  auto path = temp_file("roundtrip.rlmg");
  save_grid(path.string(), file);
  auto loaded = load_grid(path.string());

  CHECK(loaded.kind == GridFile::Kind::kFused);
  CHECK(loaded.scales_used == file.scales_used);
  CHECK(loaded.description_hash == file.description_hash);
  REQUIRE(loaded.grid.same_shape(file.grid));
  CHECK(loaded.grid == file.grid);  // bitwise: operator== on doubles
  std::filesystem::remove(path);
}

TEST_CASE("grid file load rejects corruption") {
  auto path = temp_file("corrupt.rlmg");

  {
    std::ofstream out(path, std::ios::binary);
    out << "definitely not a grid";
  }
  CHECK_THROWS_AS(load_grid(path.string()), DataError);

  GridFile file;
  file.grid = GridD(4, 4, 0.25);
  save_grid(path.string(), file);
  auto size = std::filesystem::file_size(path);
  std::filesystem::resize_file(path, size - 9);
  CHECK_THROWS_AS(load_grid(path.string()), DataError);

  CHECK_THROWS_AS(load_grid("/nonexistent/dir/grid.rlmg"), DataError);
  std::filesystem::remove(path);
}

TEST_CASE("save_grid refuses an empty grid") {
  GridFile file;
  CHECK_THROWS_AS(save_grid(temp_file("empty.rlmg").string(), file), InvalidInputError);
}

TEST_CASE("grid_file_from snapshots the map") {
  MockField field;
  field.base_vector = EmbeddingVector::basis(8, 0);
  field.text_vector = EmbeddingVector::basis(8, 1);
  MockBackend backend(field);
  ImageF img(24, 24, 1, 0.5);
  DreamConfig config;
  config.windows = {16, 8};
  auto map = compute_realness_map(img, "a bent horizon", backend, config);

  auto final_file = grid_file_from(map);
  CHECK(final_file.kind == GridFile::Kind::kFinal);
  CHECK(final_file.grid == map.final_grid);
  CHECK(final_file.scales_used == map.scales_used);
  CHECK(final_file.description_hash == fnv1a64("a bent horizon"));

  auto fused_file = grid_file_from(map, GridFile::Kind::kFused);
  CHECK(fused_file.kind == GridFile::Kind::kFused);
  CHECK(fused_file.grid == map.fused_grid);
}

TEST_CASE("palette anchors: low realness is warm, high is cool") {
  auto lo = realness_color(0.0);
  CHECK(to_byte(lo[0]) == 165);
  CHECK(to_byte(lo[1]) == 0);
  CHECK(to_byte(lo[2]) == 38);

  auto mid = realness_color(0.5);
  CHECK(to_byte(mid[0]) == 255);
  CHECK(to_byte(mid[1]) == 255);
  CHECK(to_byte(mid[2]) == 191);

  auto hi = realness_color(1.0);
  CHECK(to_byte(hi[0]) == 49);
  CHECK(to_byte(hi[1]) == 54);
  CHECK(to_byte(hi[2]) == 149);

  // Out-of-range inputs clamp instead of extrapolating.
  CHECK(realness_color(-3.0) == realness_color(0.0));
  CHECK(realness_color(7.0) == realness_color(1.0));
}

TEST_CASE("palette is continuous across anchor boundaries") {
  for (double a : {0.25, 0.5, 0.75}) {
    auto below = realness_color(a - 1e-9);
    auto above = realness_color(a + 1e-9);
    for (int c = 0; c < 3; ++c) CHECK(std::abs(below[c] - above[c]) < 1e-6);
  }
}

TEST_CASE("heatmap render: pure colormap and blended variants") {
  MockField field;
  field.base_vector = EmbeddingVector::basis(8, 0);
  field.text_vector = EmbeddingVector::basis(8, 1);
  field.regions.push_back({Rect{4, 4, 12, 12}, EmbeddingVector::basis(8, 1)});
  MockBackend backend(field);
  ImageF img(24, 24, 1, 1.0);  // white frame
  DreamConfig config;
  config.windows = {16, 8};
  auto map = compute_realness_map(img, "planted", backend, config);

  auto pure = render_heatmap(map, img);
  REQUIRE(pure.channels() == 3);
  // Center of the planted region has the lowest realness -> warm anchor hues.
  int cy = 10, cx = 10;
  CHECK(pure.at(cy, cx, 0) > pure.at(cy, cx, 2));
  // Far corner is maximally real -> cool anchor hues.
  CHECK(pure.at(23, 23, 2) > pure.at(23, 23, 0));

  // Full image blend reproduces the (grayscale) frame in every channel.
  HeatmapOptions opts;
  opts.image_blend = 1.0;
  auto flat = render_heatmap(map, img, opts);
  for (int c = 0; c < 3; ++c) CHECK(flat.at(0, 0, c) == 255);

  opts.image_blend = 1.5;
  CHECK_THROWS_AS(render_heatmap(map, img, opts), InvalidInputError);

  ImageF wrong(16, 24, 1, 0.5);
  CHECK_THROWS_AS(render_heatmap(map, wrong), InvalidInputError);
}
