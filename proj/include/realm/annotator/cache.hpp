#pragma once

#include <chrono>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <optional>
#include <string>

#include "realm/annotator/provider.hpp"
#include "realm/error.hpp"

#include "json.hpp"

namespace realm::annotator {

/// Content-addressed annotation store: one JSON file per image content hash,
/// holding replies keyed by "provider@prompt". Files are written to a
/// temporary name and renamed into place, so readers never see a torn file
/// and concurrent annotators cannot corrupt each other.
class AnnotationCache {
public:
  explicit AnnotationCache(std::string dir) : dir_(std::move(dir)) {
    if (dir_.empty()) throw ConfigError("cache directory must not be empty");
    std::error_code ec;
    std::filesystem::create_directories(dir_, ec);
    if (ec) throw ConfigError("cannot create cache directory " + dir_ + ": " + ec.message());
  }

  const std::string& directory() const { return dir_; }

  std::string path_for(const std::string& content_hash) const {
    return dir_ + "/" + content_hash + ".json";
  }

  std::optional<AnnotationResult> lookup(const std::string& content_hash,
                                         const std::string& provider,
                                         const std::string& prompt_key) const {
    std::lock_guard lock(mutex_);
    auto entries = read_entries(path_for(content_hash));
    auto it = entries.find(entry_key(provider, prompt_key));
    if (it == entries.end()) return std::nullopt;
    const auto& e = it.value();
    try {
      AnnotationResult result;
      result.verdict = dataset::verdict_from_name(e.at("verdict").get<std::string>());
      result.description = e.at("description").get<std::string>();
      result.raw_response = e.at("raw_response").get<std::string>();
      result.provider = provider;
      result.prompt_version = prompt_key;
      result.latency_ms = e.value("latency_ms", 0.0);
      return result;
    } catch (const nlohmann::json::exception&) {
      return std::nullopt;  // damaged entry behaves like a miss
    } catch (const Error&) {
      return std::nullopt;
    }
  }

  void store(const std::string& content_hash, const AnnotationResult& result) {
    std::lock_guard lock(mutex_);
    const std::string path = path_for(content_hash);
    auto entries = read_entries(path);
    nlohmann::ordered_json e;
    e["verdict"] = dataset::verdict_name(result.verdict);
    e["description"] = result.description;
    e["raw_response"] = result.raw_response;
    e["latency_ms"] = result.latency_ms;
    entries[entry_key(result.provider, result.prompt_version)] = e;

    // Unique temp name so a concurrent annotator in another process can
    // never rename a half-written file into place.
    const std::string tmp =
        path + ".tmp." +
        std::to_string(std::chrono::steady_clock::now().time_since_epoch().count());
    {
      std::ofstream out(tmp, std::ios::trunc);
      if (!out) throw DataError("cannot write cache file: " + tmp);
      out << entries.dump(2) << "\n";
      if (!out) throw DataError("short write: " + tmp);
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw DataError("cannot move cache file into place: " + ec.message());
  }

private:
  static std::string entry_key(const std::string& provider, const std::string& prompt_key) {
    return provider + "@" + prompt_key;
  }

  static nlohmann::ordered_json read_entries(const std::string& path) {
    std::ifstream in(path);
    if (!in) return nlohmann::ordered_json::object();
    try {
      auto j = nlohmann::ordered_json::parse(in);
      return j.is_object() ? j : nlohmann::ordered_json::object();
    } catch (const nlohmann::json::exception&) {
      return nlohmann::ordered_json::object();  // unreadable file = empty cache
    }
  }

  std::string dir_;
  mutable std::mutex mutex_;
};

}  // namespace realm::annotator
