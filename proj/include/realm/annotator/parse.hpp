#pragma once

#include <cctype>
#include <string>

#include "realm/dataset.hpp"
#include "realm/error.hpp"

namespace realm::annotator {

struct ParsedResponse {
  dataset::Verdict verdict = dataset::Verdict::kUnknown;
  std::string description;
};

namespace detail {

inline bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

/// Separator run after the verdict token: ASCII punctuation/whitespace plus
/// the UTF-8 en/em dashes models like to answer with.
inline std::size_t skip_separators(const std::string& s, std::size_t i) {
  while (i < s.size()) {
    unsigned char c = static_cast<unsigned char>(s[i]);
    if (is_space(s[i]) || std::ispunct(c)) {
      ++i;
    } else if (i + 2 < s.size() && c == 0xe2 && static_cast<unsigned char>(s[i + 1]) == 0x80 &&
               (static_cast<unsigned char>(s[i + 2]) == 0x93 ||
                static_cast<unsigned char>(s[i + 2]) == 0x94)) {
      i += 3;
    } else {
      break;
    }
  }
  return i;
}

}  // namespace detail

/// Splits a model reply into the leading verdict token and the explanation
/// that follows it. The verdict is matched case-insensitively; whatever
/// punctuation separates it from the rest is dropped.
inline ParsedResponse parse_response(const std::string& raw) {
  std::size_t begin = 0;
  while (begin < raw.size() && detail::is_space(raw[begin])) ++begin;
  std::size_t end = begin;
  std::string token;
  while (end < raw.size() && std::isalpha(static_cast<unsigned char>(raw[end]))) {
    token += char(std::tolower(static_cast<unsigned char>(raw[end])));
    ++end;
  }

  ParsedResponse parsed;
  if (token == "yes") {
    parsed.verdict = dataset::Verdict::kYes;
  } else if (token == "no") {
    parsed.verdict = dataset::Verdict::kNo;
  } else if (token == "somewhat") {
    parsed.verdict = dataset::Verdict::kSomewhat;
  } else {
    throw ParseError("no verdict found in response: \"" + raw + "\"", raw);
  }

  std::size_t rest = detail::skip_separators(raw, end);
  std::size_t tail = raw.size();
  while (tail > rest && detail::is_space(raw[tail - 1])) --tail;
  parsed.description = raw.substr(rest, tail - rest);
  return parsed;
}

}  // namespace realm::annotator
