#pragma once

#include <array>
#include <cctype>
#include <cstdint>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "realm/error.hpp"

namespace realm::backends {

namespace detail {

/// Reversible byte -> unicode-codepoint table used by the published BPE
/// vocabularies: printable latin bytes map to themselves, everything else is
/// shifted above 0x100 so every byte has a visible, non-whitespace stand-in.
inline const std::array<std::uint32_t, 256>& byte_to_codepoint() {
  static const std::array<std::uint32_t, 256> table = [] {
    std::array<std::uint32_t, 256> t{};
    std::array<bool, 256> kept{};
    auto keep = [&](int lo, int hi) {
      for (int b = lo; b <= hi; ++b) {
        t[b] = std::uint32_t(b);
        kept[b] = true;
      }
    };
    keep('!', '~');
    keep(0xa1, 0xac);
    keep(0xae, 0xff);
    std::uint32_t next = 256;
    for (int b = 0; b < 256; ++b)
      if (!kept[b]) t[b] = next++;
    return t;
  }();
  return table;
}

inline std::string codepoint_to_utf8(std::uint32_t cp) {
  std::string out;
  if (cp < 0x80) {
    out += char(cp);
  } else if (cp < 0x800) {
    out += char(0xc0 | (cp >> 6));
    out += char(0x80 | (cp & 0x3f));
  } else if (cp < 0x10000) {
    out += char(0xe0 | (cp >> 12));
    out += char(0x80 | ((cp >> 6) & 0x3f));
    out += char(0x80 | (cp & 0x3f));
  } else {
    out += char(0xf0 | (cp >> 18));
    out += char(0x80 | ((cp >> 12) & 0x3f));
    out += char(0x80 | ((cp >> 6) & 0x3f));
    out += char(0x80 | (cp & 0x3f));
  }
  return out;
}

/// Decodes one UTF-8 codepoint at `i`, advancing it. Malformed sequences are
/// consumed byte-by-byte as U+FFFD so tokenization never throws on raw input.
inline std::uint32_t next_codepoint(const std::string& s, std::size_t& i) {
  unsigned char c = static_cast<unsigned char>(s[i]);
  auto cont = [&](std::size_t k) {
    return i + k < s.size() && (static_cast<unsigned char>(s[i + k]) & 0xc0) == 0x80;
  };
  if (c < 0x80) {
    ++i;
    return c;
  }
  if ((c & 0xe0) == 0xc0 && cont(1)) {
    std::uint32_t cp = (std::uint32_t(c & 0x1f) << 6) |
                       (static_cast<unsigned char>(s[i + 1]) & 0x3f);
    i += 2;
    return cp;
  }
  if ((c & 0xf0) == 0xe0 && cont(1) && cont(2)) {
    std::uint32_t cp = (std::uint32_t(c & 0x0f) << 12) |
                       (std::uint32_t(static_cast<unsigned char>(s[i + 1]) & 0x3f) << 6) |
                       (static_cast<unsigned char>(s[i + 2]) & 0x3f);
    i += 3;
    return cp;
  }
  if ((c & 0xf8) == 0xf0 && cont(1) && cont(2) && cont(3)) {
    std::uint32_t cp = (std::uint32_t(c & 0x07) << 18) |
                       (std::uint32_t(static_cast<unsigned char>(s[i + 1]) & 0x3f) << 12) |
                       (std::uint32_t(static_cast<unsigned char>(s[i + 2]) & 0x3f) << 6) |
                       (static_cast<unsigned char>(s[i + 3]) & 0x3f);
    i += 4;
    return cp;
  }
  ++i;
  return 0xfffd;
}

enum class CharClass { kLetter, kNumber, kSpace, kPunct };

/// ASCII classes are exact. Outside ASCII we approximate the usual
/// letter/number properties: general-punctuation and latin-1 symbol blocks
/// count as punctuation, everything else as a letter. English captions with
/// the occasional dash or curly quote tokenize identically to the reference
/// implementation under this rule.
inline CharClass classify(std::uint32_t cp) {
  if (cp < 0x80) {
    if (std::isalpha(int(cp))) return CharClass::kLetter;
    if (std::isdigit(int(cp))) return CharClass::kNumber;
    if (std::isspace(int(cp))) return CharClass::kSpace;
    return CharClass::kPunct;
  }
  if (cp >= 0xa0 && cp <= 0xbf) return CharClass::kPunct;
  if (cp == 0xd7 || cp == 0xf7) return CharClass::kPunct;
  if (cp >= 0x2000 && cp <= 0x206f) {
    if (cp >= 0x2000 && cp <= 0x200d) return CharClass::kSpace;  // unicode spaces/joiners
    return CharClass::kPunct;
  }
  return CharClass::kLetter;
}

}  // namespace detail

/// Byte-pair-encoding tokenizer in the dialect used by contrastive
/// vision-language checkpoints: lowercased text, words split on a
/// letters/digits/punctuation pattern with English contractions kept whole,
/// bytes remapped to printable stand-ins, and a `</w>` marker closing each
/// word. The vocabulary is derived entirely from the ranked merge list, so a
/// single merges file defines the tokenizer.
class ClipTokenizer {
public:
  using Merge = std::pair<std::string, std::string>;

  static constexpr const char* kStartToken = "<|startoftext|>";
  static constexpr const char* kEndToken = "<|endoftext|>";

  static ClipTokenizer from_merges(std::vector<Merge> merges, int context_length = 77) {
    return ClipTokenizer(std::move(merges), context_length);
  }

  /// Loads a plain-text merges file: optional `#`-prefixed header lines, then
  /// one `left right` pair per line in rank order.
  static ClipTokenizer from_merges_file(const std::string& path, int context_length = 77,
                                        int max_merges = -1) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open merges file: " + path);
    std::vector<Merge> merges;
    std::string line;
    while (std::getline(in, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      // Published merge lists open with a version banner; tolerate both the
      // comment style and the bare "...#version: x.y" first line.
      if (line.empty() || line[0] == '#' || line.find("#version") != std::string::npos)
        continue;
      auto space = line.find(' ');
      if (space == std::string::npos || space == 0 || space + 1 >= line.size())
        throw DataError("malformed merge line in " + path + ": \"" + line + "\"");
      merges.emplace_back(line.substr(0, space), line.substr(space + 1));
      if (max_merges >= 0 && int(merges.size()) >= max_merges) break;
    }
    return ClipTokenizer(std::move(merges), context_length);
  }

  int vocab_size() const { return int(vocab_.size()); }
  int context_length() const { return context_length_; }
  int sot_id() const { return sot_id_; }
  int eot_id() const { return eot_id_; }

  /// Token ids for `text`, without specials or padding.
  std::vector<int> encode(const std::string& text) const {
    std::vector<int> ids;
    for (const auto& word : split_words(clean(text)))
      for (const auto& piece : bpe(word)) {
        auto it = encoder_.find(piece);
        if (it == encoder_.end())
          throw ComputeError("bpe produced a piece outside the vocabulary: " + piece);
        ids.push_back(it->second);
      }
    return ids;
  }

  /// Fixed-length id sequence: start token, text, end token, zero padding.
  /// Overlong text is truncated so the end token always survives.
  std::vector<int> tokenize(const std::string& text) const {
    std::vector<int> ids = encode(text);
    if (int(ids.size()) > context_length_ - 2) ids.resize(context_length_ - 2);
    std::vector<int> out;
    out.reserve(context_length_);
    out.push_back(sot_id_);
    out.insert(out.end(), ids.begin(), ids.end());
    out.push_back(eot_id_);
    out.resize(context_length_, 0);
    return out;
  }

  /// Inverse of encode: specials and padding are dropped, word markers become
  /// spaces, stand-in characters map back to their original bytes.
  std::string decode(const std::vector<int>& ids) const {
    std::string glued;
    for (int id : ids) {
      if (id < 0 || id >= int(vocab_.size()))
        throw InvalidInputError("token id out of range: " + std::to_string(id));
      if (id == sot_id_ || id == eot_id_ || id == 0) continue;  // specials and padding
      glued += vocab_[id];
    }
    // Undo the byte mapping first, then turn word markers into spaces —
    // the marker's own characters are printable and map to themselves.
    std::string bytes;
    for (std::size_t i = 0; i < glued.size();) {
      std::uint32_t cp = detail::next_codepoint(glued, i);
      auto it = codepoint_to_byte_.find(cp);
      bytes += it != codepoint_to_byte_.end() ? char(it->second) : '?';
    }
    std::string out;
    for (std::size_t i = 0; i < bytes.size();) {
      if (bytes.compare(i, 4, "</w>") == 0) {
        out += ' ';
        i += 4;
      } else {
        out += bytes[i++];
      }
    }
    while (!out.empty() && out.back() == ' ') out.pop_back();
    return out;
  }

private:
  ClipTokenizer(std::vector<Merge> merges, int context_length)
      : context_length_(context_length) {
    if (context_length_ < 3)
      throw ConfigError("context length must fit start, end, and one token");

    const auto& b2c = detail::byte_to_codepoint();
    for (int b = 0; b < 256; ++b) {
      std::string ch = detail::codepoint_to_utf8(b2c[b]);
      byte_char_[b] = ch;
      codepoint_to_byte_[b2c[b]] = std::uint8_t(b);
      vocab_.push_back(ch);
    }
    for (int b = 0; b < 256; ++b) vocab_.push_back(byte_char_[b] + "</w>");
    for (std::size_t r = 0; r < merges.size(); ++r) {
      ranks_[pair_key(merges[r].first, merges[r].second)] = int(r);
      vocab_.push_back(merges[r].first + merges[r].second);
    }
    sot_id_ = int(vocab_.size());
    vocab_.push_back(kStartToken);
    eot_id_ = int(vocab_.size());
    vocab_.push_back(kEndToken);
    for (std::size_t i = 0; i < vocab_.size(); ++i) encoder_[vocab_[i]] = int(i);
  }

  static std::string pair_key(const std::string& a, const std::string& b) {
    return a + '\x01' + b;
  }

  /// Collapse whitespace runs to single spaces, trim, lowercase ascii.
  static std::string clean(const std::string& text) {
    std::string out;
    bool pending_space = false;
    std::size_t i = 0;
    while (i < text.size()) {
      std::size_t before = i;
      std::uint32_t cp = detail::next_codepoint(text, i);
      if (detail::classify(cp) == detail::CharClass::kSpace) {
        pending_space = !out.empty();
        continue;
      }
      if (pending_space) {
        out += ' ';
        pending_space = false;
      }
      if (cp < 0x80) {
        out += char(std::tolower(int(cp)));
      } else {
        out.append(text, before, i - before);
      }
    }
    return out;
  }

  /// Word pattern: contractions ('s 't 're 've 'm 'll 'd), letter runs,
  /// single digits, punctuation runs. Spaces separate and are dropped.
  static std::vector<std::string> split_words(const std::string& text) {
    std::vector<std::string> words;
    std::size_t i = 0;
    while (i < text.size()) {
      if (text[i] == '\'') {
        // Contractions win whenever they literally match at the scan position,
        // exactly like the reference pattern's leading alternation.
        static const char* kContractions[] = {"'s", "'t", "'re", "'ve", "'m", "'ll", "'d"};
        bool matched = false;
        for (const char* c : kContractions) {
          std::size_t n = std::char_traits<char>::length(c);
          if (text.compare(i, n, c) == 0) {
            words.emplace_back(text.substr(i, n));
            i += n;
            matched = true;
            break;
          }
        }
        if (matched) continue;
      }
      std::size_t start = i;
      std::uint32_t cp = detail::next_codepoint(text, i);
      auto cls = detail::classify(cp);
      if (cls == detail::CharClass::kSpace) continue;
      if (cls == detail::CharClass::kNumber) {
        words.emplace_back(text.substr(start, i - start));
        continue;
      }
      // Letters and punctuation extend runs of their own class; punctuation
      // runs are greedy and swallow apostrophes, matching the reference.
      std::size_t end = i;
      while (end < text.size()) {
        std::size_t probe = end;
        std::uint32_t next = detail::next_codepoint(text, probe);
        if (detail::classify(next) != cls) break;
        end = probe;
      }
      words.emplace_back(text.substr(start, end - start));
      i = end;
    }
    return words;
  }

  /// Greedy lowest-rank merging of one word (already whitespace-free).
  std::vector<std::string> bpe(const std::string& word) const {
    std::vector<std::string> pieces;
    for (char c : word) pieces.push_back(byte_char_[static_cast<unsigned char>(c)]);
    if (pieces.empty()) return {};
    pieces.back() += "</w>";

    while (pieces.size() > 1) {
      int best_rank = std::numeric_limits<int>::max();
      std::size_t best = 0;
      for (std::size_t i = 0; i + 1 < pieces.size(); ++i) {
        auto it = ranks_.find(pair_key(pieces[i], pieces[i + 1]));
        if (it != ranks_.end() && it->second < best_rank) {
          best_rank = it->second;
          best = i;
        }
      }
      if (best_rank == std::numeric_limits<int>::max()) break;
      const std::string left = pieces[best];
      const std::string right = pieces[best + 1];
      std::vector<std::string> merged;
      merged.reserve(pieces.size());
      for (std::size_t i = 0; i < pieces.size();) {
        if (i + 1 < pieces.size() && pieces[i] == left && pieces[i + 1] == right) {
          merged.push_back(left + right);
          i += 2;
        } else {
          merged.push_back(pieces[i]);
          ++i;
        }
      }
      pieces = std::move(merged);
    }
    return pieces;
  }

  int context_length_ = 77;
  int sot_id_ = 0;
  int eot_id_ = 0;
  std::array<std::string, 256> byte_char_;
  std::unordered_map<std::uint32_t, std::uint8_t> codepoint_to_byte_;
  std::vector<std::string> vocab_;
  std::unordered_map<std::string, int> encoder_;
  std::unordered_map<std::string, int> ranks_;
};

}  // namespace realm::backends
