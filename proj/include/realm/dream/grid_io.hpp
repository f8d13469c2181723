#pragma once

#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include "realm/dream/pipeline.hpp"
#include "realm/error.hpp"
#include "realm/grid.hpp"
#include "realm/hash.hpp"

namespace realm::dream {

/// Lossless binary raster: "RLMG" magic, version, dims, the scales that
/// produced the grid, an FNV-1a digest of the guiding description, and the
/// raw float64 payload. Round-trips bit-exactly.
struct GridFile {
  static constexpr std::uint32_t kMagic = 0x474d4c52;  // "RLMG" little-endian
  static constexpr std::uint32_t kVersion = 1;

  enum class Kind : std::uint8_t { kFinal = 0, kFused = 1 };

  Kind kind = Kind::kFinal;
  std::vector<int> scales_used;
  std::uint64_t description_hash = 0;
  GridD grid;
};

namespace detail {

template <typename T>
void write_pod(std::ostream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T read_pod(std::istream& in) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!in) throw DataError("truncated grid file");
  return v;
}

}  // namespace detail

inline void save_grid(const std::string& path, const GridFile& file) {
  if (file.grid.empty()) throw InvalidInputError("save_grid: empty grid");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot open for writing: " + path);
  detail::write_pod(out, GridFile::kMagic);
  detail::write_pod(out, GridFile::kVersion);
  detail::write_pod(out, static_cast<std::uint32_t>(file.grid.height()));
  detail::write_pod(out, static_cast<std::uint32_t>(file.grid.width()));
  detail::write_pod(out, static_cast<std::uint32_t>(file.scales_used.size()));
  for (int s : file.scales_used) detail::write_pod(out, static_cast<std::uint32_t>(s));
  detail::write_pod(out, file.description_hash);
  detail::write_pod(out, static_cast<std::uint8_t>(file.kind));
  out.write(reinterpret_cast<const char*>(file.grid.data()),
            static_cast<std::streamsize>(file.grid.size() * sizeof(double)));
  if (!out) throw DataError("short write: " + path);
}

inline GridFile load_grid(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open grid file: " + path);
  if (detail::read_pod<std::uint32_t>(in) != GridFile::kMagic)
    throw DataError("not a realness grid file: " + path);
  if (detail::read_pod<std::uint32_t>(in) != GridFile::kVersion)
    throw DataError("unsupported grid file version: " + path);
  auto height = detail::read_pod<std::uint32_t>(in);
  auto width = detail::read_pod<std::uint32_t>(in);
  auto n_scales = detail::read_pod<std::uint32_t>(in);
  GridFile file;
  for (std::uint32_t i = 0; i < n_scales; ++i)
    file.scales_used.push_back(static_cast<int>(detail::read_pod<std::uint32_t>(in)));
  file.description_hash = detail::read_pod<std::uint64_t>(in);
  file.kind = static_cast<GridFile::Kind>(detail::read_pod<std::uint8_t>(in));
  file.grid = GridD(static_cast<int>(height), static_cast<int>(width));
  in.read(reinterpret_cast<char*>(file.grid.data()),
          static_cast<std::streamsize>(file.grid.size() * sizeof(double)));
  if (!in) throw DataError("truncated grid payload: " + path);
  return file;
}

inline GridFile grid_file_from(const RealnessMap& map,
                               GridFile::Kind kind = GridFile::Kind::kFinal) {
  GridFile file;
  file.kind = kind;
  file.scales_used = map.scales_used;
  file.description_hash = fnv1a64(map.description);
  file.grid = kind == GridFile::Kind::kFinal ? map.final_grid : map.fused_grid;
  return file;
}

}  // namespace realm::dream
