#pragma once

#include <chrono>
#include <cstdlib>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <thread>

#ifdef REALM_WITH_TLS
#define CPPHTTPLIB_OPENSSL_SUPPORT
#endif
#include "httplib.h"
// httplib drags in <resolv.h>, whose _res macro mangles any later header
// that uses the name as an identifier (Eigen does).
#ifdef _res
#undef _res
#endif

#include "realm/annotator/parse.hpp"
#include "realm/dataset.hpp"
#include "realm/error.hpp"
#include "realm/hash.hpp"

#include "json.hpp"

namespace realm::annotator {

struct RetryPolicy {
  int max_attempts = 3;
  int backoff_initial_ms = 250;
  double backoff_multiplier = 2.0;
};

struct ProviderConfig {
  std::string provider = "stub";  // stub | http
  std::string endpoint;           // http(s)://host[:port][/path], http only
  std::string model;              // model identifier passed to the endpoint
  /// NAME of the environment variable holding the API key. The key itself
  /// is read at request time and never stored or serialized.
  std::string credential_env;
  double timeout_seconds = 30.0;
  RetryPolicy retry;
  std::string cache_dir;
  double temperature = 0.0;
  int min_request_interval_ms = 0;  // simple provider-side rate limit

  void validate() const {
    if (provider != "stub" && provider != "http")
      throw ConfigError("unknown annotation provider: " + provider);
    if (provider == "http" && endpoint.empty())
      throw ConfigError("http provider needs an endpoint");
    if (timeout_seconds <= 0.0) throw ConfigError("timeout_seconds must be positive");
    if (retry.max_attempts < 1) throw ConfigError("retry.max_attempts must be >= 1");
    if (retry.backoff_initial_ms < 0 || retry.backoff_multiplier < 1.0)
      throw ConfigError("retry backoff must be non-negative and non-shrinking");
    if (min_request_interval_ms < 0)
      throw ConfigError("min_request_interval_ms must be >= 0");
  }
};

inline nlohmann::ordered_json provider_config_to_json(const ProviderConfig& c) {
  nlohmann::ordered_json j;
  j["provider"] = c.provider;
  j["endpoint"] = c.endpoint;
  j["model"] = c.model;
  j["credential_env"] = c.credential_env;  // the variable name, never its value
  j["timeout_seconds"] = c.timeout_seconds;
  j["retry"] = {{"max_attempts", c.retry.max_attempts},
                {"backoff_initial_ms", c.retry.backoff_initial_ms},
                {"backoff_multiplier", c.retry.backoff_multiplier}};
  j["cache_dir"] = c.cache_dir;
  j["temperature"] = c.temperature;
  j["min_request_interval_ms"] = c.min_request_interval_ms;
  return j;
}

inline ProviderConfig provider_config_from_json(const nlohmann::json& j) {
  ProviderConfig c;
  c.provider = j.value("provider", c.provider);
  c.endpoint = j.value("endpoint", c.endpoint);
  c.model = j.value("model", c.model);
  c.credential_env = j.value("credential_env", c.credential_env);
  c.timeout_seconds = j.value("timeout_seconds", c.timeout_seconds);
  if (j.contains("retry")) {
    const auto& r = j["retry"];
    c.retry.max_attempts = r.value("max_attempts", c.retry.max_attempts);
    c.retry.backoff_initial_ms = r.value("backoff_initial_ms", c.retry.backoff_initial_ms);
    c.retry.backoff_multiplier = r.value("backoff_multiplier", c.retry.backoff_multiplier);
  }
  c.cache_dir = j.value("cache_dir", c.cache_dir);
  c.temperature = j.value("temperature", c.temperature);
  c.min_request_interval_ms = j.value("min_request_interval_ms", c.min_request_interval_ms);
  c.validate();
  return c;
}

/// One model reply with full provenance.
struct AnnotationResult {
  dataset::Verdict verdict = dataset::Verdict::kUnknown;
  std::string description;
  std::string raw_response;
  std::string provider;
  std::string prompt_version;
  double latency_ms = 0.0;
};

/// Parses a raw reply and enforces the result invariant: only a "no" verdict
/// may come without an explanation.
inline AnnotationResult make_annotation_result(const std::string& raw,
                                               const std::string& provider,
                                               const std::string& prompt_version,
                                               double latency_ms) {
  auto parsed = parse_response(raw);
  if (parsed.description.empty() && parsed.verdict != dataset::Verdict::kNo)
    throw ParseError("verdict '" + std::string(dataset::verdict_name(parsed.verdict)) +
                         "' without an explanation: \"" + raw + "\"",
                     raw);
  AnnotationResult result;
  result.verdict = parsed.verdict;
  result.description = parsed.description;
  result.raw_response = raw;
  result.provider = provider;
  result.prompt_version = prompt_version;
  result.latency_ms = latency_ms;
  return result;
}

/// Turns (prompt, image bytes) into a raw model reply. Implementations must
/// tolerate concurrent complete() calls.
class Provider {
public:
  virtual ~Provider() = default;
  virtual std::string name() const = 0;
  virtual std::string complete(const std::string& prompt, const std::string& image_bytes) = 0;
};

/// Offline provider: canned replies by content hash, with a deterministic
/// synthesized reply for anything unlisted. Keeps every test and demo
/// runnable without network or credentials.
class StubProvider : public Provider {
public:
  using ResponseMap = std::map<std::string, std::string>;  // sha256 hex -> raw reply

  explicit StubProvider(ResponseMap canned = {}) : canned_(std::move(canned)) {}

  std::string name() const override { return "stub"; }

  std::string complete(const std::string&, const std::string& image_bytes) override {
    const std::string hash = sha256_hex(image_bytes);
    if (auto it = canned_.find(hash); it != canned_.end()) return it->second;
    switch (hash[0] % 3) {
      case 0:
        return "No.";
      case 1:
        return "Yes. Stub reply for content " + hash.substr(0, 12) +
               ": textures repeat with a regularity real scenes never show.";
      default:
        return "Somewhat. Stub reply for content " + hash.substr(0, 12) +
               ": object boundaries blend into each other without a clear edge.";
    }
  }

private:
  ResponseMap canned_;
};

namespace detail {

inline std::string base64_encode(const std::string& bytes) {
  static const char* alphabet =
      "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";
  std::string out;
  out.reserve((bytes.size() + 2) / 3 * 4);
  std::size_t i = 0;
  while (i + 3 <= bytes.size()) {
    unsigned v = (static_cast<unsigned char>(bytes[i]) << 16) |
                 (static_cast<unsigned char>(bytes[i + 1]) << 8) |
                 static_cast<unsigned char>(bytes[i + 2]);
    out += alphabet[(v >> 18) & 63];
    out += alphabet[(v >> 12) & 63];
    out += alphabet[(v >> 6) & 63];
    out += alphabet[v & 63];
    i += 3;
  }
  if (i + 1 == bytes.size()) {
    unsigned v = static_cast<unsigned char>(bytes[i]) << 16;
    out += alphabet[(v >> 18) & 63];
    out += alphabet[(v >> 12) & 63];
    out += "==";
  } else if (i + 2 == bytes.size()) {
    unsigned v = (static_cast<unsigned char>(bytes[i]) << 16) |
                 (static_cast<unsigned char>(bytes[i + 1]) << 8);
    out += alphabet[(v >> 18) & 63];
    out += alphabet[(v >> 12) & 63];
    out += alphabet[(v >> 6) & 63];
    out += '=';
  }
  return out;
}

inline const char* sniff_mime(const std::string& bytes) {
  if (bytes.size() >= 8 && bytes.compare(0, 8, "\x89PNG\r\n\x1a\n") == 0) return "image/png";
  if (bytes.size() >= 3 && static_cast<unsigned char>(bytes[0]) == 0xff &&
      static_cast<unsigned char>(bytes[1]) == 0xd8)
    return "image/jpeg";
  if (bytes.size() >= 2 && bytes[0] == 'P' && (bytes[1] == '5' || bytes[1] == '6'))
    return "image/x-portable-anymap";
  return "application/octet-stream";
}

struct ParsedEndpoint {
  std::string base;  // scheme://host[:port]
  std::string path;  // /path, at least "/"
};

inline ParsedEndpoint parse_endpoint(const std::string& endpoint) {
  auto scheme_end = endpoint.find("://");
  if (scheme_end == std::string::npos)
    throw ConfigError("endpoint must start with http:// or https://: " + endpoint);
  std::string scheme = endpoint.substr(0, scheme_end);
  if (scheme != "http" && scheme != "https")
    throw ConfigError("unsupported endpoint scheme: " + scheme);
#ifndef REALM_WITH_TLS
  if (scheme == "https")
    throw ConfigError("https endpoint needs a TLS-enabled build: " + endpoint);
#endif
  auto path_start = endpoint.find('/', scheme_end + 3);
  ParsedEndpoint parsed;
  if (path_start == std::string::npos) {
    parsed.base = endpoint;
    parsed.path = "/";
  } else {
    parsed.base = endpoint.substr(0, path_start);
    parsed.path = endpoint.substr(path_start);
  }
  if (parsed.base.size() == scheme_end + 3) throw ConfigError("endpoint has no host: " + endpoint);
  return parsed;
}

}  // namespace detail

/// Chat-completions style HTTP provider. The request carries the prompt and
/// the image as a base64 data URL; the reply text is choices[0].message
/// .content. Transient failures (network, 408/429/5xx) retry with backoff;
/// auth and other client errors do not.
class HttpProvider : public Provider {
public:
  explicit HttpProvider(ProviderConfig config) : config_(std::move(config)) {
    config_.validate();
    endpoint_ = detail::parse_endpoint(config_.endpoint);
  }

  std::string name() const override { return config_.provider; }

  std::string complete(const std::string& prompt, const std::string& image_bytes) override {
    const std::string body = request_body(prompt, image_bytes);
    httplib::Headers headers;
    if (!config_.credential_env.empty()) {
      const char* key = std::getenv(config_.credential_env.c_str());
      if (key == nullptr || *key == '\0')
        throw ConfigError("credential environment variable is not set: " +
                          config_.credential_env);
      headers.emplace("Authorization", std::string("Bearer ") + key);
    }

    std::string last_error;
    double backoff_ms = double(config_.retry.backoff_initial_ms);
    for (int attempt = 1; attempt <= config_.retry.max_attempts; ++attempt) {
      if (attempt > 1) {
        std::this_thread::sleep_for(
            std::chrono::milliseconds(static_cast<long long>(backoff_ms)));
        backoff_ms *= config_.retry.backoff_multiplier;
      }
      rate_limit();

      httplib::Client client(endpoint_.base);
      auto timeout = std::chrono::duration<double>(config_.timeout_seconds);
      client.set_connection_timeout(timeout);
      client.set_read_timeout(timeout);
      client.set_write_timeout(timeout);

      auto res = client.Post(endpoint_.path, headers, body, "application/json");
      if (!res) {
        last_error = "network error: " + httplib::to_string(res.error());
        continue;
      }
      if (res->status == 200) return extract_reply(res->body);
      if (res->status == 401 || res->status == 403)
        throw BackendError("authentication rejected (HTTP " + std::to_string(res->status) +
                           ") by " + config_.endpoint);
      if (res->status == 408 || res->status == 429 || res->status >= 500) {
        last_error = "HTTP " + std::to_string(res->status);
        continue;
      }
      throw BackendError("HTTP " + std::to_string(res->status) + " from " + config_.endpoint +
                         ": " + res->body.substr(0, 200));
    }
    throw BackendError("request failed after " + std::to_string(config_.retry.max_attempts) +
                       " attempt(s) to " + config_.endpoint + " (" + last_error + ")");
  }

private:
  std::string request_body(const std::string& prompt, const std::string& image_bytes) const {
    nlohmann::ordered_json content = nlohmann::ordered_json::array();
    content.push_back({{"type", "text"}, {"text", prompt}});
    std::string data_url = std::string("data:") + detail::sniff_mime(image_bytes) + ";base64," +
                           detail::base64_encode(image_bytes);
    content.push_back({{"type", "image_url"}, {"image_url", {{"url", data_url}}}});

    nlohmann::ordered_json body;
    if (!config_.model.empty()) body["model"] = config_.model;
    body["temperature"] = config_.temperature;
    body["messages"] = {{{"role", "user"}, {"content", content}}};
    return body.dump();
  }

  static std::string extract_reply(const std::string& body) {
    try {
      auto j = nlohmann::json::parse(body);
      return j.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
      throw BackendError(std::string("malformed completion response: ") + e.what());
    }
  }

  void rate_limit() {
    if (config_.min_request_interval_ms <= 0) return;
    std::unique_lock lock(rate_mutex_);
    auto now = std::chrono::steady_clock::now();
    auto interval = std::chrono::milliseconds(config_.min_request_interval_ms);
    if (last_request_ != std::chrono::steady_clock::time_point{} &&
        now - last_request_ < interval) {
      auto wait = interval - (now - last_request_);
      lock.unlock();
      std::this_thread::sleep_for(wait);
      lock.lock();
    }
    last_request_ = std::chrono::steady_clock::now();
  }

  ProviderConfig config_;
  detail::ParsedEndpoint endpoint_;
  std::mutex rate_mutex_;
  std::chrono::steady_clock::time_point last_request_;
};

inline std::unique_ptr<Provider> make_provider(const ProviderConfig& config) {
  config.validate();
  if (config.provider == "stub") return std::make_unique<StubProvider>();
  return std::make_unique<HttpProvider>(config);
}

}  // namespace realm::annotator
