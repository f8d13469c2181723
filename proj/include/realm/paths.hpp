#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include "realm/error.hpp"

namespace realm {

/// Joins a manifest-relative reference onto a root directory. Absolute
/// references and empty roots pass through untouched.
inline std::string join_path(const std::string& root, const std::string& ref) {
  if (root.empty() || (!ref.empty() && ref.front() == '/')) return ref;
  if (root.back() == '/') return root + ref;
  return root + "/" + ref;
}

/// Whole file as raw bytes.
inline std::string read_file_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return std::move(buf).str();
}

}  // namespace realm
