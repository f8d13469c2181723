#pragma once

#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "realm/backends/backend.hpp"
#include "realm/backends/clip_onnx.hpp"
#include "realm/backends/mock.hpp"
#include "realm/error.hpp"
#include "realm/rng.hpp"

namespace realm::backends {

/// Backend selection for configs and the command line. "mock" runs anywhere
/// with zero weights; "clip" needs the exported encoder files.
struct BackendConfig {
  std::string name = "mock";

  // mock: a seeded field whose planted rectangles read as maximally unreal.
  struct MockSpec {
    int dim = 512;
    std::uint64_t seed = 17;
    std::vector<Rect> regions;
  } mock;

  ClipOnnxConfig clip;
};

inline nlohmann::ordered_json backend_config_to_json(const BackendConfig& c) {
  nlohmann::ordered_json j;
  j["name"] = c.name;
  if (c.name == "mock") {
    j["dim"] = c.mock.dim;
    j["seed"] = c.mock.seed;
    auto& regions = j["regions"] = nlohmann::ordered_json::array();
    for (const auto& r : c.mock.regions)
      regions.push_back({{"x", r.x0}, {"y", r.y0}, {"w", r.width}, {"h", r.height}});
  } else {
    j["image_model"] = c.clip.image_model;
    j["text_model"] = c.clip.text_model;
    j["merges"] = c.clip.merges;
    j["embedding_dim"] = c.clip.embedding_dim;
    j["image_size"] = c.clip.image_size;
    j["context_length"] = c.clip.context_length;
    j["max_batch"] = c.clip.max_batch;
  }
  return j;
}

inline BackendConfig backend_config_from_json(const nlohmann::json& j) {
  BackendConfig c;
  try {
    c.name = j.value("name", "mock");
    c.mock.dim = j.value("dim", 512);
    c.mock.seed = j.value("seed", std::uint64_t(17));
    if (j.contains("regions"))
      for (const auto& r : j.at("regions"))
        c.mock.regions.push_back(
            Rect{r.at("x").get<int>(), r.at("y").get<int>(), r.at("w").get<int>(),
                 r.at("h").get<int>()});
    c.clip.image_model = j.value("image_model", "");
    c.clip.text_model = j.value("text_model", "");
    c.clip.merges = j.value("merges", "");
    c.clip.embedding_dim = j.value("embedding_dim", 512);
    c.clip.image_size = j.value("image_size", 224);
    c.clip.context_length = j.value("context_length", 77);
    c.clip.max_batch = j.value("max_batch", 32);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad backend config: ") + e.what());
  }
  return c;
}

namespace detail {

inline EmbeddingVector seeded_unit_vector(int dim, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> v(static_cast<std::size_t>(dim));
  for (auto& x : v) x = rng.next_gaussian();
  return EmbeddingVector(std::move(v));
}

/// Exact 90-degree rotation in each coordinate 2-plane. Orthogonal to the
/// input, and any convex blend of the two keeps a strictly positive norm —
/// unlike a negated vector, which cancels at the halfway blend.
inline EmbeddingVector rotated_vector(const EmbeddingVector& v) {
  std::vector<double> out(static_cast<std::size_t>(v.dim()), 0.0);
  for (int i = 0; i + 1 < v.dim(); i += 2) {
    out[i] = -v[i + 1];
    out[i + 1] = v[i];
  }
  return EmbeddingVector(std::move(out));
}

}  // namespace detail

/// Builds the mock field behind `BackendConfig::mock`: the text vector doubles
/// as the base field (perfect realness everywhere), and each planted region
/// carries an orthogonal vector, so regions surface as having no match while
/// partial overlaps grade smoothly in between.
inline MockField make_mock_field(const BackendConfig::MockSpec& spec) {
  if (spec.dim <= 0) throw ConfigError("mock backend dim must be positive");
  MockField field;
  field.text_vector = detail::seeded_unit_vector(spec.dim, spec.seed);
  field.base_vector = field.text_vector;
  for (const auto& r : spec.regions) {
    if (spec.dim < 2) throw ConfigError("mock backend regions need dim >= 2");
    if (r.empty()) throw ConfigError("mock backend region must have area");
    field.regions.push_back({r, detail::rotated_vector(field.text_vector)});
  }
  return field;
}

inline std::unique_ptr<EmbeddingBackend> make_backend(const BackendConfig& config) {
  if (config.name == "mock")
    return std::make_unique<MockBackend>(make_mock_field(config.mock));
  if (config.name == "clip") {
#ifdef REALM_WITH_OPENCV
    return std::make_unique<ClipOnnxBackend>(config.clip);
#else
    throw ConfigError("clip backend unavailable: built without OpenCV DNN");
#endif
  }
  throw ConfigError("unknown backend: '" + config.name + "' (expected mock or clip)");
}

}  // namespace realm::backends
