#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstddef>
#include <memory>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "realm/annotator/cache.hpp"
#include "realm/annotator/prompt.hpp"
#include "realm/annotator/provider.hpp"
#include "realm/dataset.hpp"
#include "realm/error.hpp"
#include "realm/hash.hpp"
#include "realm/paths.hpp"

namespace realm::annotator {

/// Provenance tag placed on each annotated record: which provider answered,
/// under which prompt wording.
inline std::string provenance_tag(const std::string& provider, const PromptTemplate& tmpl) {
  return provider + "@" + tmpl.version + "/" + prompt_digest(tmpl);
}

inline int count_words(const std::string& text) {
  std::istringstream in(text);
  std::string word;
  int n = 0;
  while (in >> word) ++n;
  return n;
}

/// Annotates one image. The cache (optional) is keyed on the image's content
/// hash — moving files between machines keeps hits — plus provider and
/// prompt; a hit never touches the provider.
inline AnnotationResult annotate_image(const std::string& image_path, Provider& provider,
                                       const PromptTemplate& tmpl,
                                       AnnotationCache* cache = nullptr) {
  const std::string bytes = read_file_bytes(image_path);
  const std::string content_hash = sha256_hex(bytes);
  const std::string prompt_key = tmpl.version + "/" + prompt_digest(tmpl);

  if (cache != nullptr) {
    if (auto hit = cache->lookup(content_hash, provider.name(), prompt_key)) return *hit;
  }

  auto t0 = std::chrono::steady_clock::now();
  const std::string raw = provider.complete(build_prompt(tmpl), bytes);
  double latency_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();

  auto result = make_annotation_result(raw, provider.name(), prompt_key, latency_ms);
  if (cache != nullptr) cache->store(content_hash, result);
  return result;
}

struct AnnotateReport {
  int annotated = 0;
  int skipped = 0;  // already carried a verdict and force was off
  std::vector<std::pair<std::string, std::string>> failures;  // record id, reason
  /// Descriptions that overran the prompt's 30-word target. The limit is an
  /// instruction to the model, not a validity rule, so these only warn.
  std::vector<std::string> over_limit_ids;

  bool ok() const { return failures.empty(); }

  std::string summary() const {
    std::ostringstream out;
    out << annotated << " annotated, " << skipped << " skipped, " << failures.size()
        << " failed";
    if (!over_limit_ids.empty())
      out << "; " << over_limit_ids.size() << " description(s) over the 30-word target";
    for (const auto& [id, reason] : failures) out << "\n  failed " << id << ": " << reason;
    return out.str();
  }
};

/// Fills verdict + description for every record that needs one. Failures are
/// collected per record, never thrown: one bad image or one provider hiccup
/// must not sink a long run, and the cache makes the rerun cheap.
inline AnnotateReport annotate_manifest(dataset::DatasetManifest& manifest,
                                        const std::string& image_root, Provider& provider,
                                        const PromptTemplate& tmpl,
                                        AnnotationCache* cache = nullptr, bool force = false,
                                        int concurrency = 1) {
  if (concurrency < 1) throw ConfigError("concurrency must be >= 1");

  std::vector<std::size_t> todo;
  AnnotateReport report;
  for (std::size_t i = 0; i < manifest.records.size(); ++i) {
    if (!force && manifest.records[i].annotated()) {
      ++report.skipped;
      continue;
    }
    todo.push_back(i);
  }

  const std::string tag = provenance_tag(provider.name(), tmpl);
  std::mutex mutex;  // guards manifest records and the report
  std::atomic<std::size_t> next{0};

  auto worker = [&]() {
    for (;;) {
      std::size_t slot = next.fetch_add(1);
      if (slot >= todo.size()) return;
      auto& record = manifest.records[todo[slot]];
      try {
        auto result =
            annotate_image(join_path(image_root, record.image_ref), provider, tmpl, cache);
        std::lock_guard lock(mutex);
        record.verdict = result.verdict;
        record.description = result.description;
        record.annotator = tag;
        ++report.annotated;
        if (count_words(result.description) > 30) report.over_limit_ids.push_back(record.id);
      } catch (const Error& e) {
        std::lock_guard lock(mutex);
        report.failures.emplace_back(record.id, e.what());
      }
    }
  };

  int threads = int(std::min<std::size_t>(std::size_t(concurrency), todo.size()));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(std::size_t(threads));
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  // Failures can interleave arbitrarily under concurrency; report them in
  // manifest order so reruns and logs are comparable.
  std::sort(report.failures.begin(), report.failures.end());
  std::sort(report.over_limit_ids.begin(), report.over_limit_ids.end());
  return report;
}

}  // namespace realm::annotator
