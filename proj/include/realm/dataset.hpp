#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "realm/error.hpp"
#include "realm/rng.hpp"

#include "json.hpp"

namespace realm::dataset {

enum class Verdict { kYes, kNo, kSomewhat, kUnknown };
enum class Source { kRaise, kAgin, kSynthetic, kOther };

inline const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::kYes: return "yes";
    case Verdict::kNo: return "no";
    case Verdict::kSomewhat: return "somewhat";
    default: return "unknown";
  }
}

inline Verdict verdict_from_name(const std::string& s) {
  if (s == "yes") return Verdict::kYes;
  if (s == "no") return Verdict::kNo;
  if (s == "somewhat") return Verdict::kSomewhat;
  if (s == "unknown") return Verdict::kUnknown;
  throw DataError("unknown verdict: " + s);
}

inline const char* source_name(Source s) {
  switch (s) {
    case Source::kRaise: return "raise";
    case Source::kAgin: return "agin";
    case Source::kSynthetic: return "synthetic";
    default: return "other";
  }
}

inline Source source_from_name(const std::string& s) {
  if (s == "raise") return Source::kRaise;
  if (s == "agin") return Source::kAgin;
  if (s == "synthetic") return Source::kSynthetic;
  if (s == "other") return Source::kOther;
  throw DataError("unknown source: " + s);
}

/// One dataset sample: an image reference, its subjective realness MOS, and
/// the textual inconsistency description. AGIN rationality scores ingest
/// into the same mos field with source=agin.
struct RealnessRecord {
  std::string id;
  std::string image_ref;
  double mos = 0.0;
  Verdict verdict = Verdict::kUnknown;
  std::string description;
  Source source = Source::kOther;
  std::string annotator;  // provenance tag: who produced verdict+description

  bool annotated() const { return verdict != Verdict::kUnknown; }
  bool operator==(const RealnessRecord&) const = default;
};

struct DatasetManifest {
  std::vector<RealnessRecord> records;
  int schema_version = 1;
  std::string provenance;
};

/// Violation list; empty means the record satisfies every invariant.
/// With check_image_refs set, unresolvable image paths are violations too.
inline std::vector<std::string> validate_record(const RealnessRecord& record,
                                                bool check_image_refs = false) {
  std::vector<std::string> violations;
  if (record.id.empty()) violations.push_back("id: empty");
  if (record.image_ref.empty()) violations.push_back("image_ref: empty");
  if (!std::isfinite(record.mos)) violations.push_back("mos: not finite");
  if (check_image_refs && !record.image_ref.empty() &&
      !std::filesystem::exists(record.image_ref))
    violations.push_back("image_ref: unresolvable path " + record.image_ref);
  return violations;
}

namespace detail {

inline nlohmann::ordered_json record_to_json(const RealnessRecord& r) {
  nlohmann::ordered_json j;
  j["id"] = r.id;
  j["image_ref"] = r.image_ref;
  j["mos"] = r.mos;
  j["verdict"] = verdict_name(r.verdict);
  j["description"] = r.description;
  j["source"] = source_name(r.source);
  if (!r.annotator.empty()) j["annotator"] = r.annotator;
  return j;
}

inline RealnessRecord record_from_json(const nlohmann::json& j) {
  RealnessRecord r;
  r.id = j.at("id").get<std::string>();
  r.image_ref = j.at("image_ref").get<std::string>();
  r.mos = j.at("mos").get<double>();
  r.verdict = verdict_from_name(j.value("verdict", "unknown"));
  r.description = j.value("description", "");
  r.source = source_from_name(j.value("source", "other"));
  r.annotator = j.value("annotator", "");
  return r;
}

}  // namespace detail

/// Loads a line-delimited manifest. The first line may be a header object
/// (schema_version, provenance); every other line is one record. Malformed
/// lines are reported together, with their line numbers.
inline DatasetManifest load_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open manifest: " + path);
  DatasetManifest manifest;
  std::set<std::string> seen_ids;
  std::vector<std::string> problems;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      problems.push_back("line " + std::to_string(line_no) + ": invalid JSON (" + e.what() + ")");
      continue;
    }
    if (line_no == 1 && j.contains("schema_version") && !j.contains("id")) {
      manifest.schema_version = j.value("schema_version", 1);
      manifest.provenance = j.value("provenance", "");
      continue;
    }
    try {
      RealnessRecord r = detail::record_from_json(j);
      if (!seen_ids.insert(r.id).second) {
        problems.push_back("line " + std::to_string(line_no) + ": duplicate id '" + r.id + "'");
        continue;
      }
      if (!std::isfinite(r.mos)) {
        problems.push_back("line " + std::to_string(line_no) + ": mos not finite");
        continue;
      }
      manifest.records.push_back(std::move(r));
    } catch (const nlohmann::json::exception& e) {
      problems.push_back("line " + std::to_string(line_no) + ": " + e.what());
    } catch (const DataError& e) {
      problems.push_back("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  if (!problems.empty()) {
    std::string msg = "manifest " + path + " has " + std::to_string(problems.size()) +
                      " schema error(s):";
    std::size_t shown = std::min<std::size_t>(problems.size(), 20);
    for (std::size_t i = 0; i < shown; ++i) msg += "\n  " + problems[i];
    if (shown < problems.size()) msg += "\n  ...";
    throw DataError(msg);
  }
  if (manifest.records.empty()) throw InvalidInputError("manifest has no records: " + path);
  return manifest;
}

inline void save_manifest(const std::string& path, const DatasetManifest& manifest) {
  if (manifest.records.empty()) throw InvalidInputError("refusing to save empty manifest");
  std::ofstream out(path);
  if (!out) throw DataError("cannot open for writing: " + path);
  nlohmann::ordered_json header;
  header["schema_version"] = manifest.schema_version;
  header["provenance"] = manifest.provenance;
  out << header.dump() << "\n";
  for (const auto& r : manifest.records) out << detail::record_to_json(r).dump() << "\n";
  if (!out) throw DataError("short write: " + path);
}

enum class SplitKind { kHoldout, kKfold };

struct SplitSpec {
  SplitKind kind = SplitKind::kHoldout;
  /// holdout: test-set size. kfold: optional fixed per-fold test size; when
  /// unset, fold sizes follow n/k with the remainder spread over the first
  /// folds.
  std::optional<std::size_t> test_count;
  std::size_t k = 5;
  std::uint64_t seed = 0;
};

using Split = std::pair<std::vector<RealnessRecord>, std::vector<RealnessRecord>>;

namespace detail {

inline std::vector<std::size_t> shuffled_indices(std::size_t n, std::uint64_t seed) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  Rng rng(seed);
  rng.shuffle(idx);
  return idx;
}

// Selection keeps the manifest's record order inside each side.
inline Split split_by_test_set(const std::vector<RealnessRecord>& records,
                               const std::set<std::size_t>& test_idx) {
  Split split;
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (test_idx.count(i))
      split.second.push_back(records[i]);
    else
      split.first.push_back(records[i]);
  }
  return split;
}

}  // namespace detail

/// Seed-deterministic holdout: disjoint, exhaustive (train, test) pair.
inline Split split_holdout(const DatasetManifest& manifest, const SplitSpec& spec) {
  const std::size_t n = manifest.records.size();
  if (!spec.test_count.has_value())
    throw InvalidInputError("split_holdout: test_count required");
  const std::size_t t = *spec.test_count;
  if (t == 0 || t >= n)
    throw InvalidInputError("split_holdout: test_count must be in (0, " + std::to_string(n) +
                            "), got " + std::to_string(t));
  auto idx = detail::shuffled_indices(n, spec.seed);
  std::set<std::size_t> test_idx(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(t));
  return detail::split_by_test_set(manifest.records, test_idx);
}

/// Seed-deterministic k-fold. Default: the k test folds partition the whole
/// manifest (sizes n/k, remainder spread over the first folds). With
/// spec.test_count set, each fold tests exactly that many records (the k
/// test folds stay disjoint) and trains on everything else — the protocol
/// behind fixed published per-fold sizes.
inline std::vector<Split> split_kfold(const DatasetManifest& manifest, const SplitSpec& spec) {
  const std::size_t n = manifest.records.size();
  const std::size_t k = spec.k;
  if (k < 2) throw InvalidInputError("split_kfold: k must be >= 2");
  if (k > n)
    throw InvalidInputError("split_kfold: k=" + std::to_string(k) + " exceeds " +
                            std::to_string(n) + " records");
  std::size_t fold_size_fixed = 0;
  if (spec.test_count.has_value()) {
    fold_size_fixed = *spec.test_count;
    if (fold_size_fixed == 0 || fold_size_fixed * k > n)
      throw InvalidInputError("split_kfold: k*test_count must fit the manifest");
  }
  auto idx = detail::shuffled_indices(n, spec.seed);
  std::vector<Split> folds;
  folds.reserve(k);
  std::size_t cursor = 0;
  for (std::size_t f = 0; f < k; ++f) {
    std::size_t size = fold_size_fixed != 0 ? fold_size_fixed : n / k + (f < n % k ? 1 : 0);
    std::set<std::size_t> test_idx(idx.begin() + static_cast<std::ptrdiff_t>(cursor),
                                   idx.begin() + static_cast<std::ptrdiff_t>(cursor + size));
    cursor += size;
    folds.push_back(detail::split_by_test_set(manifest.records, test_idx));
  }
  return folds;
}

/// Explicit id-list split, for reproducing a published partition exactly.
/// The file is JSON: {"train": [ids...], "test": [ids...]}.
inline Split split_from_id_file(const DatasetManifest& manifest, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open split file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw DataError("malformed split file " + path + ": " + e.what());
  }
  std::set<std::string> train_ids, test_ids;
  for (const auto& v : j.at("train")) train_ids.insert(v.get<std::string>());
  for (const auto& v : j.at("test")) test_ids.insert(v.get<std::string>());
  Split split;
  for (const auto& r : manifest.records) {
    bool in_train = train_ids.count(r.id) > 0;
    bool in_test = test_ids.count(r.id) > 0;
    if (in_train && in_test) throw DataError("id in both sides of split: " + r.id);
    if (in_train) split.first.push_back(r);
    if (in_test) split.second.push_back(r);
  }
  if (split.first.empty() || split.second.empty())
    throw DataError("split file matches no records on one side: " + path);
  return split;
}

}  // namespace realm::dataset
