#pragma once

#include <string>
#include <vector>

#include "realm/embedding.hpp"
#include "realm/error.hpp"
#include "realm/geometry.hpp"
#include "realm/image.hpp"

namespace realm {

/// One patch to embed: a rectangle of `image`. Backends that work on pixels
/// crop and resize as they see fit; geometric mocks only read the rect.
struct PatchInput {
  const ImageF* image = nullptr;
  Rect rect;
};

/// Joint image/text embedding backend. Implementations must be safe for
/// concurrent read-only use after construction; encode calls batch
/// internally (up to descriptor().max_batch) and preserve input order.
class EmbeddingBackend {
public:
  virtual ~EmbeddingBackend() = default;

  virtual BackendDescriptor descriptor() const = 0;
  virtual EmbeddingVector encode_text(const std::string& description) const = 0;
  virtual std::vector<EmbeddingVector> encode_patches(
      const std::vector<PatchInput>& patches) const = 0;

protected:
  static std::string trimmed(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
  }

  void check_text(const std::string& description) const {
    if (trimmed(description).empty())
      throw InvalidInputError("encode_text: empty description");
  }

  void check_patches(const std::vector<PatchInput>& patches) const {
    for (std::size_t i = 0; i < patches.size(); ++i) {
      const auto& p = patches[i];
      if (p.rect.empty())
        throw InvalidInputError("encode_patches: patch " + std::to_string(i) + " has zero area");
      if (p.image != nullptr && (p.rect.x0 < 0 || p.rect.y0 < 0 ||
                                 p.rect.x1() > p.image->width() ||
                                 p.rect.y1() > p.image->height()))
        throw InvalidInputError("encode_patches: patch " + std::to_string(i) + " outside image");
    }
  }
};

}  // namespace realm
