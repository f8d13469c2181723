#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <thread>
#include <vector>

#include <catch2/catch_amalgamated.hpp>

#include "realm/annotator/annotate.hpp"
#include "realm/annotator/cache.hpp"
#include "realm/annotator/parse.hpp"
#include "realm/annotator/prompt.hpp"
#include "realm/annotator/provider.hpp"
#include "realm/dataset.hpp"
#include "realm/error.hpp"
#include "realm/hash.hpp"
#include "realm/image.hpp"
#include "realm/image_io.hpp"
#include "realm/paths.hpp"

using namespace realm;
using namespace realm::annotator;

namespace {

std::filesystem::path fresh_dir(const char* leaf) {
  auto dir = std::filesystem::temp_directory_path() / leaf;
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

// n distinct tiny images plus a manifest referencing them.
dataset::DatasetManifest make_image_manifest(const std::filesystem::path& dir, int n) {
  dataset::DatasetManifest manifest;
  manifest.provenance = "annotator test fixture";
  for (int i = 0; i < n; ++i) {
    ImageF img(6, 6, 1);
    for (int y = 0; y < 6; ++y)
      for (int x = 0; x < 6; ++x) img.at(y, x) = double((i * 7 + y * 6 + x) % 37) / 36.0;
    std::string name = "img_" + std::to_string(i) + ".pgm";
    save_image((dir / name).string(), to_u8(img));
    dataset::RealnessRecord r;
    r.id = "rec_" + std::to_string(i);
    r.image_ref = name;
    r.mos = 0.5;
    r.source = dataset::Source::kSynthetic;
    manifest.records.push_back(std::move(r));
  }
  return manifest;
}

// Counts provider round-trips so cache bypasses are observable.
class CountingProvider : public Provider {
public:
  explicit CountingProvider(Provider& inner) : inner_(inner) {}
  std::string name() const override { return inner_.name(); }
  std::string complete(const std::string& prompt, const std::string& bytes) override {
    ++calls;
    return inner_.complete(prompt, bytes);
  }
  std::atomic<int> calls{0};

private:
  Provider& inner_;
};

// Fails on one specific content hash, succeeds elsewhere.
class FlakyProvider : public Provider {
public:
  FlakyProvider(Provider& inner, std::string poison_hash)
      : inner_(inner), poison_(std::move(poison_hash)) {}
  std::string name() const override { return inner_.name(); }
  std::string complete(const std::string& prompt, const std::string& bytes) override {
    if (sha256_hex(bytes) == poison_) throw BackendError("synthetic outage");
    return inner_.complete(prompt, bytes);
  }

private:
  Provider& inner_;
  std::string poison_;
};

const std::string kTreesReply =
    "Somewhat. The row of trees is unusually squared off at the top with an unnaturally "
    "uniform shape, which looks unrealistic for natural tree growth and pruning.";
const std::string kBridgeReply =
    "Yes. The bridge features an unrealistic, irregular structure with warped and "
    "inconsistent arches that do not align with real engineering or architectural designs "
    "for functional bridges.";
const std::string kSignReply =
    "Yes. The text on the sign is unrealistic and nonsensical, as it does not form coherent "
    "words or sentences, which is unusual for informational or decorative signs.";

}  // namespace

TEST_CASE("default prompt wording is pinned byte for byte") {
  PromptTemplate tmpl;
  std::string p = build_prompt(tmpl);
  CHECK(p.rfind("Is there anything unrealistic in this image", 0) == 0);
  CHECK(p.find("\xe2\x80\x94") != std::string::npos);  // true em dash, not a hyphen
  CHECK(p ==
        "Is there anything unrealistic in this image \xe2\x80\x94 yes, no, or somewhat? "
        "If yes or somewhat, explain in at most 30 words what looks unrealistic, such as "
        "a distorted face, uneven object transitions, or any other feature.");

  PromptTemplate custom{"Describe the artifacts.", "x1"};
  CHECK(build_prompt(custom) == "Describe the artifacts.");

  CHECK(prompt_digest(tmpl) == prompt_digest(PromptTemplate{}));   // stable digest
  CHECK(prompt_digest(tmpl) != prompt_digest(custom));
  CHECK(prompt_digest(tmpl).size() == 16);
}

TEST_CASE("parse_response splits published replies verbatim") {
  auto trees = parse_response(kTreesReply);
  CHECK(trees.verdict == dataset::Verdict::kSomewhat);
  CHECK(trees.description ==
        "The row of trees is unusually squared off at the top with an unnaturally uniform "
        "shape, which looks unrealistic for natural tree growth and pruning.");

  auto bridge = parse_response(kBridgeReply);
  CHECK(bridge.verdict == dataset::Verdict::kYes);
  CHECK(bridge.description ==
        "The bridge features an unrealistic, irregular structure with warped and "
        "inconsistent arches that do not align with real engineering or architectural "
        "designs for functional bridges.");

  auto sign = parse_response(kSignReply);
  CHECK(sign.verdict == dataset::Verdict::kYes);
  CHECK(sign.description ==
        "The text on the sign is unrealistic and nonsensical, as it does not form coherent "
        "words or sentences, which is unusual for informational or decorative signs.");
}

TEST_CASE("parse_response edge cases") {
  auto no = parse_response("No.");
  CHECK(no.verdict == dataset::Verdict::kNo);
  CHECK(no.description.empty());

  CHECK(parse_response("  YES!  overly smooth skin  ").description == "overly smooth skin");
  CHECK(parse_response("somewhat \xe2\x80\x94 the shadows bend").description ==
        "the shadows bend");
  CHECK(parse_response("Yes: floating pier").verdict == dataset::Verdict::kYes);
  CHECK(parse_response("no, nothing stands out").description == "nothing stands out");

  CHECK_THROWS_AS(parse_response("maybe?"), ParseError);
  CHECK_THROWS_AS(parse_response(""), ParseError);
  CHECK_THROWS_AS(parse_response("0.7 realness"), ParseError);
  try {
    parse_response("maybe?");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("maybe?") != std::string::npos);  // carries raw text
  }
}

TEST_CASE("annotation results insist on explanations except for 'no'") {
  CHECK_NOTHROW(make_annotation_result("No.", "stub", "v1", 1.0));
  CHECK_THROWS_AS(make_annotation_result("Yes.", "stub", "v1", 1.0), ParseError);
  CHECK_THROWS_AS(make_annotation_result("Somewhat...", "stub", "v1", 1.0), ParseError);
  auto r = make_annotation_result(kBridgeReply, "stub", "v1/abc", 3.5);
  CHECK(r.verdict == dataset::Verdict::kYes);
  CHECK(r.raw_response == kBridgeReply);
  CHECK(r.provider == "stub");
  CHECK(r.prompt_version == "v1/abc");
  CHECK(r.latency_ms == 3.5);
}

TEST_CASE("content digest matches published vectors") {
  CHECK(sha256_hex("") ==
        "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  CHECK(sha256_hex("abc") ==
        "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  CHECK(sha256_hex(std::string(1000000, 'a')) ==
        "cdc76e5c9914fb9281a1c7e284d73e67f1809a48a497200e046d39ccc7112cd0");
}

TEST_CASE("stub provider is deterministic and always parseable") {
  StubProvider stub;
  CHECK(stub.name() == "stub");
  for (int i = 0; i < 20; ++i) {
    std::string payload = "image payload " + std::to_string(i);
    std::string a = stub.complete("prompt", payload);
    CHECK(a == stub.complete("prompt", payload));
    auto parsed = parse_response(a);
    if (parsed.verdict != dataset::Verdict::kNo) CHECK_FALSE(parsed.description.empty());
  }

  StubProvider canned(StubProvider::ResponseMap{{sha256_hex("special"), kTreesReply}});
  CHECK(canned.complete("prompt", "special") == kTreesReply);
  CHECK(canned.complete("prompt", "other") != kTreesReply);
}

TEST_CASE("annotation cache stores one file per content hash") {
  auto dir = fresh_dir("realm_annot_cache");
  AnnotationCache cache((dir / "cache").string());

  auto result = make_annotation_result(kSignReply, "stub", "v1/k", 2.0);
  const std::string hash = sha256_hex("some image bytes");
  CHECK_FALSE(cache.lookup(hash, "stub", "v1/k").has_value());
  cache.store(hash, result);

  CHECK(std::filesystem::exists(cache.path_for(hash)));
  CHECK(cache.path_for(hash) == cache.directory() + "/" + hash + ".json");

  auto hit = cache.lookup(hash, "stub", "v1/k");
  REQUIRE(hit.has_value());
  CHECK(hit->verdict == dataset::Verdict::kYes);
  CHECK(hit->description == parse_response(kSignReply).description);
  CHECK(hit->raw_response == kSignReply);
  CHECK(hit->latency_ms == 2.0);

  // Same image under another provider or prompt is a distinct entry.
  CHECK_FALSE(cache.lookup(hash, "other", "v1/k").has_value());
  CHECK_FALSE(cache.lookup(hash, "stub", "v2/k").has_value());
  auto v2 = result;
  v2.prompt_version = "v2/k";
  v2.description = "different wording";
  cache.store(hash, v2);
  CHECK(cache.lookup(hash, "stub", "v1/k")->description ==
        parse_response(kSignReply).description);
  CHECK(cache.lookup(hash, "stub", "v2/k")->description == "different wording");

  // No temporary files linger after stores.
  int stray = 0;
  for (const auto& entry : std::filesystem::directory_iterator(cache.directory()))
    if (entry.path().string().find(".tmp") != std::string::npos) ++stray;
  CHECK(stray == 0);

  SECTION("damaged cache file reads as a miss") {
    std::ofstream(cache.path_for(hash), std::ios::trunc) << "{typo";
    CHECK_FALSE(cache.lookup(hash, "stub", "v1/k").has_value());
    cache.store(hash, result);  // and can be rewritten
    CHECK(cache.lookup(hash, "stub", "v1/k").has_value());
  }
}

TEST_CASE("annotate_image caches by content, not by path") {
  auto dir = fresh_dir("realm_annot_img");
  AnnotationCache cache((dir / "cache").string());
  PromptTemplate tmpl;

  ImageF img(5, 5, 1, 0.5);
  save_image((dir / "a.pgm").string(), to_u8(img));
  save_image((dir / "b.pgm").string(), to_u8(img));  // same bytes, other path

  StubProvider stub;
  CountingProvider counting(stub);

  auto first = annotate_image((dir / "a.pgm").string(), counting, tmpl, &cache);
  CHECK(counting.calls == 1);
  auto second = annotate_image((dir / "a.pgm").string(), counting, tmpl, &cache);
  CHECK(counting.calls == 1);  // cache hit, no provider round-trip
  auto moved = annotate_image((dir / "b.pgm").string(), counting, tmpl, &cache);
  CHECK(counting.calls == 1);  // same content hash, still a hit
  CHECK(first.verdict == second.verdict);
  CHECK(first.description == moved.description);
  CHECK(first.raw_response == second.raw_response);

  CHECK_THROWS_AS(annotate_image((dir / "missing.pgm").string(), counting, tmpl, &cache),
                  DataError);
}

TEST_CASE("annotate_manifest fills every record deterministically") {
  auto dir = fresh_dir("realm_annot_manifest");
  auto manifest = make_image_manifest(dir, 3);
  PromptTemplate tmpl;
  StubProvider stub;

  auto report = annotate_manifest(manifest, dir.string(), stub, tmpl);
  CHECK(report.ok());
  CHECK(report.annotated == 3);
  CHECK(report.skipped == 0);
  for (const auto& r : manifest.records) {
    CHECK(r.annotated());
    CHECK(r.annotator == provenance_tag("stub", tmpl));
    if (r.verdict != dataset::Verdict::kNo) CHECK_FALSE(r.description.empty());
  }

  // Idempotence: a second full pass (forced, same provider) produces a
  // byte-identical manifest file.
  auto path1 = (dir / "once.jsonl").string();
  auto path2 = (dir / "twice.jsonl").string();
  dataset::save_manifest(path1, manifest);
  auto report2 = annotate_manifest(manifest, dir.string(), stub, tmpl, nullptr, true);
  CHECK(report2.annotated == 3);
  dataset::save_manifest(path2, manifest);
  CHECK(read_file_bytes(path1) == read_file_bytes(path2));

  // Unforced rerun skips records that already carry a verdict.
  auto report3 = annotate_manifest(manifest, dir.string(), stub, tmpl);
  CHECK(report3.annotated == 0);
  CHECK(report3.skipped == 3);
}

TEST_CASE("annotate_manifest collects failures and resumes from cache") {
  auto dir = fresh_dir("realm_annot_resume");
  auto manifest = make_image_manifest(dir, 3);
  PromptTemplate tmpl;
  AnnotationCache cache((dir / "cache").string());

  const std::string poison = sha256_hex(read_file_bytes((dir / "img_1.pgm").string()));
  StubProvider stub;
  FlakyProvider flaky(stub, poison);

  auto report = annotate_manifest(manifest, dir.string(), flaky, tmpl, &cache);
  CHECK(report.annotated == 2);
  REQUIRE(report.failures.size() == 1);
  CHECK(report.failures[0].first == "rec_1");
  CHECK(report.failures[0].second.find("synthetic outage") != std::string::npos);
  CHECK_FALSE(manifest.records[1].annotated());

  // Resume with a healthy provider: the two finished records are already
  // annotated (skipped), and the failed one comes in without re-fetching
  // the others.
  CountingProvider counting(stub);
  auto resume = annotate_manifest(manifest, dir.string(), counting, tmpl, &cache);
  CHECK(resume.ok());
  CHECK(resume.annotated == 1);
  CHECK(resume.skipped == 2);
  CHECK(counting.calls == 1);
  CHECK(manifest.records[1].annotated());

  // A forced pass over everything is pure cache traffic.
  CountingProvider counting2(stub);
  auto forced = annotate_manifest(manifest, dir.string(), counting2, tmpl, &cache, true);
  CHECK(forced.annotated == 3);
  CHECK(counting2.calls == 0);
}

TEST_CASE("annotate_manifest under concurrency matches the serial result") {
  auto dir = fresh_dir("realm_annot_conc");
  auto serial_manifest = make_image_manifest(dir, 12);
  auto parallel_manifest = serial_manifest;
  PromptTemplate tmpl;
  StubProvider stub;

  auto serial = annotate_manifest(serial_manifest, dir.string(), stub, tmpl, nullptr, false, 1);
  auto parallel =
      annotate_manifest(parallel_manifest, dir.string(), stub, tmpl, nullptr, false, 4);
  CHECK(serial.ok());
  CHECK(parallel.ok());
  CHECK(parallel.annotated == 12);
  for (std::size_t i = 0; i < serial_manifest.records.size(); ++i)
    CHECK(serial_manifest.records[i] == parallel_manifest.records[i]);

  CHECK_THROWS_AS(annotate_manifest(parallel_manifest, dir.string(), stub, tmpl, nullptr,
                                    false, 0),
                  ConfigError);
}

TEST_CASE("over-long descriptions are flagged, not rejected") {
  auto dir = fresh_dir("realm_annot_words");
  auto manifest = make_image_manifest(dir, 1);
  PromptTemplate tmpl;

  std::string rambling = "Yes.";
  for (int i = 0; i < 40; ++i) rambling += " word" + std::to_string(i);
  StubProvider stub(StubProvider::ResponseMap{
      {sha256_hex(read_file_bytes((dir / "img_0.pgm").string())), rambling}});

  auto report = annotate_manifest(manifest, dir.string(), stub, tmpl);
  CHECK(report.ok());
  CHECK(report.annotated == 1);
  REQUIRE(report.over_limit_ids.size() == 1);
  CHECK(report.over_limit_ids[0] == "rec_0");
  CHECK(manifest.records[0].annotated());
  CHECK(report.summary().find("over the 30-word target") != std::string::npos);
}

TEST_CASE("provider config round-trips without ever holding a secret") {
  ProviderConfig c;
  c.provider = "http";
  c.endpoint = "http://127.0.0.1:9999/v1/chat/completions";
  c.model = "vlm-large";
  c.credential_env = "REALM_ANNOTATOR_KEY";
  c.timeout_seconds = 12.5;
  c.retry = {5, 100, 1.5};
  c.cache_dir = "/tmp/cache";
  c.temperature = 0.0;
  c.min_request_interval_ms = 10;

  auto j = provider_config_to_json(c);
  auto back = provider_config_from_json(j);
  CHECK(back.provider == c.provider);
  CHECK(back.endpoint == c.endpoint);
  CHECK(back.model == c.model);
  CHECK(back.credential_env == c.credential_env);
  CHECK(back.timeout_seconds == c.timeout_seconds);
  CHECK(back.retry.max_attempts == 5);
  CHECK(back.retry.backoff_initial_ms == 100);
  CHECK(back.retry.backoff_multiplier == 1.5);
  CHECK(back.cache_dir == c.cache_dir);
  CHECK(back.min_request_interval_ms == 10);

  ProviderConfig bad = c;
  bad.provider = "telepathy";
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = c;
  bad.endpoint.clear();
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = c;
  bad.retry.max_attempts = 0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = c;
  bad.timeout_seconds = 0.0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);

  CHECK_THROWS_AS(make_provider(ProviderConfig{"telepathy"}), ConfigError);
  CHECK(make_provider(ProviderConfig{})->name() == "stub");
}

TEST_CASE("endpoint parsing") {
  CHECK(annotator::detail::parse_endpoint("http://h:8080/v1/x").base == "http://h:8080");
  CHECK(annotator::detail::parse_endpoint("http://h:8080/v1/x").path == "/v1/x");
  CHECK(annotator::detail::parse_endpoint("http://h").path == "/");
  CHECK_THROWS_AS(annotator::detail::parse_endpoint("h:8080/x"), ConfigError);
  CHECK_THROWS_AS(annotator::detail::parse_endpoint("ftp://h/x"), ConfigError);
  CHECK_THROWS_AS(annotator::detail::parse_endpoint("http:///x"), ConfigError);
#ifndef REALM_WITH_TLS
  CHECK_THROWS_AS(annotator::detail::parse_endpoint("https://h/x"), ConfigError);
#endif
}

namespace {

// Canned chat-completions server for provider tests.
struct LocalServer {
  httplib::Server server;
  std::thread thread;
  int port = 0;

  explicit LocalServer(httplib::Server::Handler handler) {
    server.Post("/v1/chat/completions", std::move(handler));
    port = server.bind_to_any_port("127.0.0.1");
    REQUIRE(port > 0);
    thread = std::thread([this] { server.listen_after_bind(); });
    server.wait_until_ready();
  }

  ~LocalServer() {
    server.stop();
    thread.join();
  }

  std::string endpoint() const {
    return "http://127.0.0.1:" + std::to_string(port) + "/v1/chat/completions";
  }
};

std::string completion_json(const std::string& text) {
  nlohmann::json j;
  j["choices"] = {{{"message", {{"role", "assistant"}, {"content", text}}}}};
  return j.dump();
}

ProviderConfig http_config(const std::string& endpoint) {
  ProviderConfig c;
  c.provider = "http";
  c.endpoint = endpoint;
  c.model = "test-model";
  c.retry.max_attempts = 3;
  c.retry.backoff_initial_ms = 5;
  c.timeout_seconds = 5.0;
  return c;
}

}  // namespace

TEST_CASE("http provider speaks a chat-completions dialect") {
  std::atomic<int> requests{0};
  std::string seen_auth, seen_body;
  std::mutex seen_mutex;
  LocalServer server([&](const httplib::Request& req, httplib::Response& res) {
    ++requests;
    {
      std::lock_guard lock(seen_mutex);
      seen_auth = req.get_header_value("Authorization");
      seen_body = req.body;
    }
    res.set_content(completion_json(kBridgeReply), "application/json");
  });

  setenv("REALM_TEST_ANNOT_KEY", "sk-sentinel-0451", 1);
  auto config = http_config(server.endpoint());
  config.credential_env = "REALM_TEST_ANNOT_KEY";
  HttpProvider provider(config);

  std::string reply = provider.complete("the prompt text", std::string("\x89PNG\r\n\x1a\nfakepng", 16));
  CHECK(reply == kBridgeReply);
  CHECK(requests == 1);
  CHECK(seen_auth == "Bearer sk-sentinel-0451");

  auto body = nlohmann::json::parse(seen_body);
  CHECK(body["model"] == "test-model");
  CHECK(body["temperature"] == 0.0);
  CHECK(body["messages"][0]["content"][0]["text"] == "the prompt text");
  std::string url = body["messages"][0]["content"][1]["image_url"]["url"];
  CHECK(url.rfind("data:image/png;base64,", 0) == 0);

  SECTION("missing credential variable is a config error") {
    auto broken = config;
    broken.credential_env = "REALM_TEST_ANNOT_KEY_UNSET";
    unsetenv("REALM_TEST_ANNOT_KEY_UNSET");
    HttpProvider p2(broken);
    CHECK_THROWS_AS(p2.complete("x", "y"), ConfigError);
  }
}

TEST_CASE("http provider retries transient failures with backoff") {
  std::atomic<int> requests{0};
  LocalServer server([&](const httplib::Request&, httplib::Response& res) {
    int n = ++requests;
    if (n <= 2) {
      res.status = 500;
      res.set_content("overloaded", "text/plain");
    } else {
      res.set_content(completion_json("No."), "application/json");
    }
  });

  HttpProvider provider(http_config(server.endpoint()));
  CHECK(provider.complete("p", "img") == "No.");
  CHECK(requests == 3);
}

TEST_CASE("http provider gives up after the attempt budget") {
  std::atomic<int> requests{0};
  LocalServer server([&](const httplib::Request&, httplib::Response& res) {
    ++requests;
    res.status = 503;
  });

  auto config = http_config(server.endpoint());
  config.retry.max_attempts = 2;
  HttpProvider provider(config);
  CHECK_THROWS_AS(provider.complete("p", "img"), BackendError);
  CHECK(requests == 2);
}

TEST_CASE("http provider treats auth rejection as fatal, not retryable") {
  std::atomic<int> requests{0};
  LocalServer server([&](const httplib::Request&, httplib::Response& res) {
    ++requests;
    res.status = 401;
  });

  HttpProvider provider(http_config(server.endpoint()));
  try {
    provider.complete("p", "img");
    FAIL("expected BackendError");
  } catch (const BackendError& e) {
    CHECK(std::string(e.what()).find("authentication") != std::string::npos);
  }
  CHECK(requests == 1);  // no retries against a rejected key
}

TEST_CASE("http provider rejects malformed completion payloads") {
  LocalServer server([&](const httplib::Request&, httplib::Response& res) {
    res.set_content("{\"unexpected\": true}", "application/json");
  });
  HttpProvider provider(http_config(server.endpoint()));
  CHECK_THROWS_AS(provider.complete("p", "img"), BackendError);
}

TEST_CASE("no credential material leaks into any artifact") {
  auto dir = fresh_dir("realm_annot_secret");
  const std::string sentinel = "sk-sentinel-super-secret-98765";
  setenv("REALM_SECRET_SCAN_KEY", sentinel.c_str(), 1);

  LocalServer server([&](const httplib::Request&, httplib::Response& res) {
    res.set_content(completion_json(kTreesReply), "application/json");
  });

  auto manifest = make_image_manifest(dir, 2);
  auto config = http_config(server.endpoint());
  config.credential_env = "REALM_SECRET_SCAN_KEY";
  config.cache_dir = (dir / "cache").string();

  AnnotationCache cache(config.cache_dir);
  HttpProvider provider(config);
  PromptTemplate tmpl;
  auto report = annotate_manifest(manifest, dir.string(), provider, tmpl, &cache);
  CHECK(report.ok());

  auto manifest_path = (dir / "out.jsonl").string();
  dataset::save_manifest(manifest_path, manifest);
  auto config_dump = provider_config_to_json(config).dump();
  auto report_text = report.summary();

  // Scan every artifact this run can produce.
  std::vector<std::string> haystacks = {read_file_bytes(manifest_path), config_dump,
                                        report_text};
  for (const auto& entry : std::filesystem::recursive_directory_iterator(dir))
    if (entry.is_regular_file()) haystacks.push_back(read_file_bytes(entry.path().string()));
  for (const auto& text : haystacks)
    CHECK(text.find(sentinel) == std::string::npos);

  // The variable NAME is fine to persist; that is the whole point.
  CHECK(config_dump.find("REALM_SECRET_SCAN_KEY") != std::string::npos);
}
