#pragma once

#include <string>

#include "realm/hash.hpp"

namespace realm::annotator {

// The dash is U+2014, spelled as an explicit escape so the wording survives
// editors and encoding conversions byte-for-byte.
inline const std::string kDefaultPromptText =
    "Is there anything unrealistic in this image \xe2\x80\x94"
    " yes, no, or somewhat? If yes or somewhat, explain in at most 30 words"
    " what looks unrealistic, such as a distorted face, uneven object"
    " transitions, or any other feature.";

struct PromptTemplate {
  std::string text = kDefaultPromptText;
  std::string version = "v1";
};

inline std::string build_prompt(const PromptTemplate& tmpl) { return tmpl.text; }

/// Stable digest of the wording; goes into cache entries and provenance tags
/// so a reworded prompt never collides with cached answers to the old one.
inline std::string prompt_digest(const PromptTemplate& tmpl) {
  return sha256_hex(tmpl.version + "\n" + tmpl.text).substr(0, 16);
}

}  // namespace realm::annotator
