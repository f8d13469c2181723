#pragma once

#include <array>
#include <cctype>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "realm/error.hpp"
#include "realm/image.hpp"

#ifdef REALM_WITH_OPENCV
#include <opencv2/imgcodecs.hpp>
#include <opencv2/imgproc.hpp>
#endif

namespace realm {

namespace detail {

inline int pnm_next_int(std::istream& in) {
  // Skips whitespace and '#' comment lines between header tokens.
  while (true) {
    int c = in.peek();
    if (c == EOF) throw DataError("truncated PNM header");
    if (c == '#') {
      std::string line;
      std::getline(in, line);
    } else if (std::isspace(c)) {
      in.get();
    } else {
      break;
    }
  }
  int v = -1;
  in >> v;
  if (!in) throw DataError("malformed PNM header");
  return v;
}

inline std::uint32_t crc32(const std::uint8_t* data, std::size_t len, std::uint32_t crc = 0) {
  static const auto table = [] {
    std::array<std::uint32_t, 256> t{};
    for (std::uint32_t i = 0; i < 256; ++i) {
      std::uint32_t c = i;
      for (int k = 0; k < 8; ++k) c = (c & 1) ? 0xedb88320u ^ (c >> 1) : c >> 1;
      t[i] = c;
    }
    return t;
  }();
  crc ^= 0xffffffffu;
  for (std::size_t i = 0; i < len; ++i) crc = table[(crc ^ data[i]) & 0xff] ^ (crc >> 8);
  return crc ^ 0xffffffffu;
}

inline std::uint32_t adler32(const std::uint8_t* data, std::size_t len) {
  std::uint32_t a = 1, b = 0;
  for (std::size_t i = 0; i < len; ++i) {
    a = (a + data[i]) % 65521u;
    b = (b + a) % 65521u;
  }
  return (b << 16) | a;
}

inline void put_be32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  out.push_back(std::uint8_t(v >> 24));
  out.push_back(std::uint8_t(v >> 16));
  out.push_back(std::uint8_t(v >> 8));
  out.push_back(std::uint8_t(v));
}

inline void png_chunk(std::vector<std::uint8_t>& out, const char* type,
                      const std::vector<std::uint8_t>& payload) {
  put_be32(out, std::uint32_t(payload.size()));
  std::size_t crc_start = out.size();
  out.insert(out.end(), type, type + 4);
  out.insert(out.end(), payload.begin(), payload.end());
  put_be32(out, crc32(out.data() + crc_start, out.size() - crc_start));
}

}  // namespace detail

/// Encodes an 8-bit image as PNG using stored (uncompressed) deflate blocks.
/// Larger files than zlib would give, but valid PNG everywhere and no
/// compression dependency.
inline std::vector<std::uint8_t> encode_png(const ImageU8& img) {
  if (img.height() == 0 || img.width() == 0) throw InvalidInputError("cannot encode empty image");
  std::vector<std::uint8_t> out = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};

  std::vector<std::uint8_t> ihdr;
  detail::put_be32(ihdr, std::uint32_t(img.width()));
  detail::put_be32(ihdr, std::uint32_t(img.height()));
  ihdr.push_back(8);                                    // bit depth
  ihdr.push_back(img.channels() == 3 ? 2 : 0);          // color type
  ihdr.push_back(0); ihdr.push_back(0); ihdr.push_back(0);
  detail::png_chunk(out, "IHDR", ihdr);

  // Raw scanlines, each prefixed with filter byte 0.
  std::vector<std::uint8_t> raw;
  const std::size_t row_bytes = std::size_t(img.width()) * img.channels();
  raw.reserve((row_bytes + 1) * img.height());
  for (int y = 0; y < img.height(); ++y) {
    raw.push_back(0);
    const std::uint8_t* row = img.data().data() + std::size_t(y) * row_bytes;
    raw.insert(raw.end(), row, row + row_bytes);
  }

  std::vector<std::uint8_t> idat = {0x78, 0x01};  // zlib header, no compression
  std::size_t off = 0;
  while (off < raw.size()) {
    std::size_t n = std::min<std::size_t>(65535, raw.size() - off);
    bool final = off + n == raw.size();
    idat.push_back(final ? 1 : 0);
    idat.push_back(std::uint8_t(n & 0xff));
    idat.push_back(std::uint8_t(n >> 8));
    idat.push_back(std::uint8_t(~n & 0xff));
    idat.push_back(std::uint8_t((~n >> 8) & 0xff));
    idat.insert(idat.end(), raw.begin() + off, raw.begin() + off + n);
    off += n;
  }
  detail::put_be32(idat, detail::adler32(raw.data(), raw.size()));
  detail::png_chunk(out, "IDAT", idat);
  detail::png_chunk(out, "IEND", {});
  return out;
}

inline void write_pnm(const std::string& path, const ImageU8& img) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot open for writing: " + path);
  out << (img.channels() == 3 ? "P6" : "P5") << "\n"
      << img.width() << " " << img.height() << "\n255\n";
  out.write(reinterpret_cast<const char*>(img.data().data()),
            static_cast<std::streamsize>(img.data().size()));
  if (!out) throw DataError("short write: " + path);
}

inline ImageU8 read_pnm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open image: " + path);
  std::string magic;
  in >> magic;
  if (magic != "P5" && magic != "P6") throw DataError("unsupported PNM magic in " + path);
  int channels = magic == "P6" ? 3 : 1;
  int width = detail::pnm_next_int(in);
  int height = detail::pnm_next_int(in);
  int maxval = detail::pnm_next_int(in);
  if (width <= 0 || height <= 0 || maxval != 255)
    throw DataError("unsupported PNM geometry in " + path);
  in.get();  // single whitespace after maxval
  ImageU8 img(height, width, channels);
  in.read(reinterpret_cast<char*>(img.data().data()),
          static_cast<std::streamsize>(img.data().size()));
  if (in.gcount() != static_cast<std::streamsize>(img.data().size()))
    throw DataError("truncated PNM payload in " + path);
  return img;
}

inline std::string path_extension(const std::string& path) {
  auto ext = std::filesystem::path(path).extension().string();
  for (auto& c : ext) c = char(std::tolower(static_cast<unsigned char>(c)));
  return ext;
}

/// Loads an image file as ImageF in [0,1]. PGM/PPM are handled natively;
/// other formats go through OpenCV when the build has it.
inline ImageF load_image(const std::string& path) {
  auto ext = path_extension(path);
  if (ext == ".pgm" || ext == ".ppm" || ext == ".pnm") return to_f(read_pnm(path));
#ifdef REALM_WITH_OPENCV
  cv::Mat m = cv::imread(path, cv::IMREAD_UNCHANGED);
  if (m.empty()) throw DataError("cannot decode image: " + path);
  if (m.channels() == 4) cv::cvtColor(m, m, cv::COLOR_BGRA2BGR);
  if (m.depth() != CV_8U) m.convertTo(m, CV_8U);
  ImageF img(m.rows, m.cols, m.channels() == 1 ? 1 : 3);
  for (int y = 0; y < m.rows; ++y) {
    for (int x = 0; x < m.cols; ++x) {
      if (m.channels() == 1) {
        img.at(y, x, 0) = m.at<std::uint8_t>(y, x) / 255.0;
      } else {
        auto px = m.at<cv::Vec3b>(y, x);  // BGR
        img.at(y, x, 0) = px[2] / 255.0;
        img.at(y, x, 1) = px[1] / 255.0;
        img.at(y, x, 2) = px[0] / 255.0;
      }
    }
  }
  return img;
#else
  throw ConfigError("unsupported image format '" + ext + "' (built without OpenCV): " + path);
#endif
}

/// Saves an 8-bit image; format chosen from extension (.png, .pgm, .ppm).
inline void save_image(const std::string& path, const ImageU8& img) {
  auto ext = path_extension(path);
  if (ext == ".pgm" || ext == ".ppm" || ext == ".pnm") {
    write_pnm(path, img);
    return;
  }
  if (ext == ".png") {
    auto bytes = encode_png(img);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot open for writing: " + path);
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out) throw DataError("short write: " + path);
    return;
  }
  throw ConfigError("unsupported output image format: " + ext);
}

}  // namespace realm
