#pragma once

#include <cstdint>
#include <fstream>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "realm/core/adamw.hpp"
#include "realm/core/featurizer.hpp"
#include "realm/error.hpp"
#include "realm/image.hpp"
#include "realm/rng.hpp"

#include "json.hpp"

namespace realm::core {

enum class Activation { kRelu, kTanh, kIdentity };

inline const char* activation_name(Activation a) {
  switch (a) {
    case Activation::kRelu: return "relu";
    case Activation::kTanh: return "tanh";
    default: return "identity";
  }
}

inline Activation activation_from_name(const std::string& name) {
  if (name == "relu") return Activation::kRelu;
  if (name == "tanh") return Activation::kTanh;
  if (name == "identity") return Activation::kIdentity;
  throw ConfigError("unknown activation: " + name);
}

enum class AblationMode { kJoint, kImageOnly, kTextOnly };

inline const char* ablation_name(AblationMode m) {
  switch (m) {
    case AblationMode::kJoint: return "joint";
    case AblationMode::kImageOnly: return "image_only";
    default: return "text_only";
  }
}

inline AblationMode ablation_from_name(const std::string& name) {
  if (name == "joint") return AblationMode::kJoint;
  if (name == "image_only") return AblationMode::kImageOnly;
  if (name == "text_only") return AblationMode::kTextOnly;
  throw InvalidInputError("unknown ablation mode: " + name);
}

/// Architecture of the cross-modal score regressor: two encoder adapters
/// (fixed featurizer -> trainable affine -> tanh) whose outputs concatenate
/// into an FC fusion head with one hidden layer and a scalar output.
struct FusionRegressorConfig {
  int image_feature_dim = 2048;  // image encoder output width
  int text_feature_dim = 768;    // text encoder output width
  int hidden_units = 529;        // fusion hidden layer
  std::string head_activation = "relu";
  int output_dim = 1;
  bool finetune_encoders = true;

  int image_cells = 8;    // fixed image featurizer grid
  int text_buckets = 128; // fixed text featurizer hash width
  int standard_image_size = 224;  // shape of the zero image in text_only mode

  std::uint64_t init_seed = 0;
  /// Optional pretrained adapter weights; empty means seed-derived stand-in
  /// initialization. A set path that does not resolve is a config error.
  std::string image_encoder_checkpoint;
  std::string text_encoder_checkpoint;

  int concat_dim() const { return image_feature_dim + text_feature_dim; }
  int image_input_dim() const { return image_cells * image_cells + 2; }
  int text_input_dim() const { return text_buckets; }

  void validate() const {
    if (image_feature_dim <= 0 || text_feature_dim <= 0 || hidden_units <= 0)
      throw ConfigError("model dims must be positive");
    if (output_dim != 1) throw ConfigError("output_dim must be 1 (scalar score)");
    if (image_cells <= 0 || text_buckets <= 0 || standard_image_size <= 0)
      throw ConfigError("featurizer geometry must be positive");
    activation_from_name(head_activation);  // throws on junk
  }
};

inline nlohmann::ordered_json config_to_json(const FusionRegressorConfig& c) {
  nlohmann::ordered_json j;
  j["image_feature_dim"] = c.image_feature_dim;
  j["text_feature_dim"] = c.text_feature_dim;
  j["hidden_units"] = c.hidden_units;
  j["head_activation"] = c.head_activation;
  j["output_dim"] = c.output_dim;
  j["finetune_encoders"] = c.finetune_encoders;
  j["image_cells"] = c.image_cells;
  j["text_buckets"] = c.text_buckets;
  j["standard_image_size"] = c.standard_image_size;
  j["init_seed"] = c.init_seed;
  j["image_encoder_checkpoint"] = c.image_encoder_checkpoint;
  j["text_encoder_checkpoint"] = c.text_encoder_checkpoint;
  return j;
}

inline FusionRegressorConfig config_from_json(const nlohmann::json& j) {
  FusionRegressorConfig c;
  c.image_feature_dim = j.value("image_feature_dim", c.image_feature_dim);
  c.text_feature_dim = j.value("text_feature_dim", c.text_feature_dim);
  c.hidden_units = j.value("hidden_units", c.hidden_units);
  c.head_activation = j.value("head_activation", c.head_activation);
  c.output_dim = j.value("output_dim", c.output_dim);
  c.finetune_encoders = j.value("finetune_encoders", c.finetune_encoders);
  c.image_cells = j.value("image_cells", c.image_cells);
  c.text_buckets = j.value("text_buckets", c.text_buckets);
  c.standard_image_size = j.value("standard_image_size", c.standard_image_size);
  c.init_seed = j.value("init_seed", c.init_seed);
  c.image_encoder_checkpoint = j.value("image_encoder_checkpoint", std::string());
  c.text_encoder_checkpoint = j.value("text_encoder_checkpoint", std::string());
  c.validate();
  return c;
}

/// All trainable tensors. Encoder adapters are flagged so they can be frozen
/// as a unit.
struct Parameters {
  Eigen::MatrixXd img_W, txt_W, fc_W;
  Eigen::VectorXd img_b, txt_b, fc_b, out_w;
  double out_b = 0.0;

  std::vector<TensorRef> tensors() {
    return {
        {"img_W", img_W.data(), img_W.size(), true},
        {"img_b", img_b.data(), img_b.size(), true},
        {"txt_W", txt_W.data(), txt_W.size(), true},
        {"txt_b", txt_b.data(), txt_b.size(), true},
        {"fc_W", fc_W.data(), fc_W.size(), false},
        {"fc_b", fc_b.data(), fc_b.size(), false},
        {"out_w", out_w.data(), out_w.size(), false},
        {"out_b", &out_b, 1, false},
    };
  }

  std::vector<TensorRef> tensors(bool include_encoders) {
    auto all = tensors();
    if (include_encoders) return all;
    std::vector<TensorRef> head;
    for (const auto& t : all)
      if (!t.encoder) head.push_back(t);
    return head;
  }
};

/// Saved activations of one batched forward pass, everything backward needs.
struct BatchActivations {
  Eigen::MatrixXd f_img, f_txt;  // batch x input feature dims
  Eigen::MatrixXd e_img, e_txt;  // batch x encoder output dims
  Eigen::MatrixXd h_pre, h;      // batch x hidden
  Eigen::VectorXd y;             // batch predictions
};

struct BatchGradients {
  Parameters params;             // dL/dtheta, same shapes as Parameters
  Eigen::MatrixXd d_f_img, d_f_txt;  // dL/d(input features)
};

class FusionRegressor {
public:
  static FusionRegressor build(const FusionRegressorConfig& config);

  const FusionRegressorConfig& config() const { return config_; }
  Parameters& params() { return params_; }
  const Parameters& params() const { return params_; }
  const ImageFeaturizer& image_featurizer() const { return image_featurizer_; }
  const TextFeaturizer& text_featurizer() const { return text_featurizer_; }

  /// Forward over pre-featurized rows. Kept public so training and gradient
  /// checks drive the exact code path inference uses.
  BatchActivations forward(Eigen::MatrixXd f_img, Eigen::MatrixXd f_txt) const {
    if (f_img.rows() != f_txt.rows())
      throw InvalidInputError("forward: image/text batch sizes differ");
    if (f_img.cols() != config_.image_input_dim() || f_txt.cols() != config_.text_input_dim())
      throw InvalidInputError("forward: feature width mismatch");
    BatchActivations act;
    act.f_img = std::move(f_img);
    act.f_txt = std::move(f_txt);
    act.e_img = ((act.f_img * params_.img_W.transpose()).rowwise() +
                 params_.img_b.transpose()).array().tanh();
    act.e_txt = ((act.f_txt * params_.txt_W.transpose()).rowwise() +
                 params_.txt_b.transpose()).array().tanh();
    Eigen::MatrixXd z(act.e_img.rows(), config_.concat_dim());
    z << act.e_img, act.e_txt;
    act.h_pre = (z * params_.fc_W.transpose()).rowwise() + params_.fc_b.transpose();
    act.h = activate(act.h_pre);
    act.y = act.h * params_.out_w;
    act.y.array() += params_.out_b;
    return act;
  }

  /// Mean-squared-error loss of a forward pass against targets.
  double mse(const BatchActivations& act, const Eigen::VectorXd& targets) const {
    if (act.y.size() != targets.size())
      throw InvalidInputError("mse: prediction/target size mismatch");
    return (act.y - targets).squaredNorm() / double(targets.size());
  }

  /// Analytic gradients of the batch MSE w.r.t. every parameter tensor and
  /// both encoder input feature matrices.
  BatchGradients backward(const BatchActivations& act, const Eigen::VectorXd& targets) const {
    const auto n = act.y.size();
    if (n != targets.size()) throw InvalidInputError("backward: target size mismatch");
    BatchGradients g;

    Eigen::VectorXd dy = 2.0 / double(n) * (act.y - targets);
    g.params.out_w = act.h.transpose() * dy;
    g.params.out_b = dy.sum();

    Eigen::MatrixXd dh = dy * params_.out_w.transpose();       // batch x hidden
    Eigen::MatrixXd dh_pre = dh.array() * activate_grad(act.h_pre, act.h).array();

    Eigen::MatrixXd z(act.e_img.rows(), config_.concat_dim());
    z << act.e_img, act.e_txt;
    g.params.fc_W = dh_pre.transpose() * z;
    g.params.fc_b = dh_pre.colwise().sum().transpose();

    Eigen::MatrixXd dz = dh_pre * params_.fc_W;                // batch x concat
    Eigen::MatrixXd de_img =
        dz.leftCols(config_.image_feature_dim).array() * (1.0 - act.e_img.array().square());
    Eigen::MatrixXd de_txt =
        dz.rightCols(config_.text_feature_dim).array() * (1.0 - act.e_txt.array().square());

    g.params.img_W = de_img.transpose() * act.f_img;
    g.params.img_b = de_img.colwise().sum().transpose();
    g.params.txt_W = de_txt.transpose() * act.f_txt;
    g.params.txt_b = de_txt.colwise().sum().transpose();

    g.d_f_img = de_img * params_.img_W;
    g.d_f_txt = de_txt * params_.txt_W;
    return g;
  }

  /// Raw featurizer outputs for a record batch, one row per sample.
  Eigen::MatrixXd featurize_images(const std::vector<ImageF>& images) const {
    if (images.empty()) throw InvalidInputError("featurize_images: empty batch");
    Eigen::MatrixXd out(Eigen::Index(images.size()), config_.image_input_dim());
    for (std::size_t i = 0; i < images.size(); ++i)
      out.row(Eigen::Index(i)) = image_featurizer_(images[i]).transpose();
    return out;
  }

  Eigen::MatrixXd featurize_texts(const std::vector<std::string>& descriptions) const {
    if (descriptions.empty()) throw InvalidInputError("featurize_texts: empty batch");
    Eigen::MatrixXd out(Eigen::Index(descriptions.size()), config_.text_input_dim());
    for (std::size_t i = 0; i < descriptions.size(); ++i)
      out.row(Eigen::Index(i)) = text_featurizer_(descriptions[i]).transpose();
    return out;
  }

  double predict(const ImageF& image, const std::string& description) const {
    Eigen::MatrixXd f_img(1, config_.image_input_dim());
    f_img.row(0) = image_featurizer_(image).transpose();
    Eigen::MatrixXd f_txt(1, config_.text_input_dim());
    f_txt.row(0) = text_featurizer_(description).transpose();
    return forward(std::move(f_img), std::move(f_txt)).y(0);
  }

  std::vector<double> predict_batch(const std::vector<ImageF>& images,
                                    const std::vector<std::string>& descriptions) const {
    if (images.size() != descriptions.size())
      throw InvalidInputError("predict_batch: image/text count mismatch");
    if (images.empty()) throw InvalidInputError("predict_batch: empty batch");
    Eigen::MatrixXd f_img(Eigen::Index(images.size()), config_.image_input_dim());
    Eigen::MatrixXd f_txt(Eigen::Index(images.size()), config_.text_input_dim());
    for (std::size_t i = 0; i < images.size(); ++i) {
      f_img.row(Eigen::Index(i)) = image_featurizer_(images[i]).transpose();
      f_txt.row(Eigen::Index(i)) = text_featurizer_(descriptions[i]).transpose();
    }
    auto act = forward(std::move(f_img), std::move(f_txt));
    return {act.y.data(), act.y.data() + act.y.size()};
  }

private:
  FusionRegressor(FusionRegressorConfig config)
      : config_(std::move(config)),
        image_featurizer_(config_.image_cells),
        text_featurizer_(config_.text_buckets) {}

  Eigen::MatrixXd activate(const Eigen::MatrixXd& pre) const {
    switch (activation_from_name(config_.head_activation)) {
      case Activation::kRelu: return pre.cwiseMax(0.0);
      case Activation::kTanh: return pre.array().tanh();
      default: return pre;
    }
  }

  Eigen::MatrixXd activate_grad(const Eigen::MatrixXd& pre, const Eigen::MatrixXd& post) const {
    switch (activation_from_name(config_.head_activation)) {
      case Activation::kRelu: return (pre.array() > 0.0).cast<double>();
      case Activation::kTanh: return 1.0 - post.array().square();
      default: return Eigen::MatrixXd::Ones(pre.rows(), pre.cols());
    }
  }

  FusionRegressorConfig config_;
  ImageFeaturizer image_featurizer_;
  TextFeaturizer text_featurizer_;
  Parameters params_;

  friend FusionRegressor load_checkpoint(const std::string& path);
};

/// (image, description) pair actually fed to the model under an ablation
/// mode: image_only blanks the description; text_only substitutes an
/// all-zero image of the standard input shape.
inline std::pair<ImageF, std::string> prepare_inputs(const ImageF& image,
                                                     const std::string& description,
                                                     AblationMode mode,
                                                     const FusionRegressorConfig& config) {
  switch (mode) {
    case AblationMode::kJoint: return {image, description};
    case AblationMode::kImageOnly: return {image, std::string()};
    case AblationMode::kTextOnly:
      return {ImageF(config.standard_image_size, config.standard_image_size, 3, 0.0),
              description};
  }
  throw InvalidInputError("unknown ablation mode");
}

namespace detail {

inline Eigen::MatrixXd gaussian_matrix(Rng& rng, Eigen::Index rows, Eigen::Index cols,
                                       double scale) {
  Eigen::MatrixXd m(rows, cols);
  // Column-major fill so the draw order matches Eigen's storage order.
  for (Eigen::Index c = 0; c < cols; ++c)
    for (Eigen::Index r = 0; r < rows; ++r) m(r, c) = scale * rng.next_gaussian();
  return m;
}

inline void load_encoder_checkpoint(const std::string& path, const char* expected_kind,
                                    Parameters& params, const FusionRegressorConfig& config);

}  // namespace detail

inline FusionRegressor FusionRegressor::build(const FusionRegressorConfig& config) {
  config.validate();
  FusionRegressor model(config);
  Rng rng(config.init_seed);
  auto& p = model.params_;

  // Seed-derived stand-in for pretrained encoder weights; overridden below
  // when the config names checkpoint files.
  p.img_W = detail::gaussian_matrix(rng, config.image_feature_dim, config.image_input_dim(),
                                    1.0 / std::sqrt(double(config.image_input_dim())));
  p.img_b = Eigen::VectorXd::Zero(config.image_feature_dim);
  p.txt_W = detail::gaussian_matrix(rng, config.text_feature_dim, config.text_input_dim(),
                                    1.0 / std::sqrt(double(config.text_input_dim())));
  p.txt_b = Eigen::VectorXd::Zero(config.text_feature_dim);

  // Fusion head: randomly initialized.
  p.fc_W = detail::gaussian_matrix(rng, config.hidden_units, config.concat_dim(),
                                   1.0 / std::sqrt(double(config.concat_dim())));
  p.fc_b = Eigen::VectorXd::Zero(config.hidden_units);
  p.out_w = detail::gaussian_matrix(rng, config.hidden_units, 1,
                                    1.0 / std::sqrt(double(config.hidden_units)));
  p.out_b = 0.0;

  if (!config.image_encoder_checkpoint.empty())
    detail::load_encoder_checkpoint(config.image_encoder_checkpoint, "image_encoder",
                                    model.params_, config);
  if (!config.text_encoder_checkpoint.empty())
    detail::load_encoder_checkpoint(config.text_encoder_checkpoint, "text_encoder",
                                    model.params_, config);
  return model;
}

// ---------------------------------------------------------------------------
// Checkpoint container: "RLMC" magic, version, JSON header (kind, config,
// tensor directory), then raw float64 payloads in directory order.

namespace detail {

constexpr std::uint32_t kCheckpointMagic = 0x434d4c52;  // "RLMC" little-endian
constexpr std::uint32_t kCheckpointVersion = 1;

struct TensorEntry {
  std::string name;
  Eigen::Index rows = 0;
  Eigen::Index cols = 0;
  const double* data = nullptr;
};

inline void write_checkpoint_file(const std::string& path, const std::string& kind,
                                  const nlohmann::ordered_json& config_json,
                                  const std::vector<TensorEntry>& tensors) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot open for writing: " + path);
  nlohmann::ordered_json header;
  header["kind"] = kind;
  header["config"] = config_json;
  auto& dir = header["tensors"] = nlohmann::ordered_json::array();
  for (const auto& t : tensors)
    dir.push_back({{"name", t.name}, {"rows", t.rows}, {"cols", t.cols}});
  std::string header_str = header.dump();

  auto write_u32 = [&](std::uint32_t v) { out.write(reinterpret_cast<const char*>(&v), 4); };
  write_u32(kCheckpointMagic);
  write_u32(kCheckpointVersion);
  write_u32(std::uint32_t(header_str.size()));
  out.write(header_str.data(), std::streamsize(header_str.size()));
  for (const auto& t : tensors)
    out.write(reinterpret_cast<const char*>(t.data),
              std::streamsize(t.rows * t.cols * Eigen::Index(sizeof(double))));
  if (!out) throw DataError("short write: " + path);
}

struct LoadedCheckpoint {
  nlohmann::json header;
  std::vector<std::pair<std::string, Eigen::MatrixXd>> tensors;
};

inline LoadedCheckpoint read_checkpoint_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("checkpoint not found: " + path);
  auto read_u32 = [&]() {
    std::uint32_t v = 0;
    in.read(reinterpret_cast<char*>(&v), 4);
    if (!in) throw DataError("truncated checkpoint: " + path);
    return v;
  };
  if (read_u32() != kCheckpointMagic) throw DataError("not a model checkpoint: " + path);
  if (read_u32() != kCheckpointVersion)
    throw DataError("unsupported checkpoint version: " + path);
  std::uint32_t header_len = read_u32();
  std::string header_str(header_len, '\0');
  in.read(header_str.data(), header_len);
  if (!in) throw DataError("truncated checkpoint header: " + path);

  LoadedCheckpoint loaded;
  try {
    loaded.header = nlohmann::json::parse(header_str);
    for (const auto& entry : loaded.header.at("tensors")) {
      auto name = entry.at("name").get<std::string>();
      auto rows = entry.at("rows").get<Eigen::Index>();
      auto cols = entry.at("cols").get<Eigen::Index>();
      Eigen::MatrixXd m(rows, cols);
      in.read(reinterpret_cast<char*>(m.data()),
              std::streamsize(rows * cols * Eigen::Index(sizeof(double))));
      if (!in) throw DataError("truncated tensor payload in " + path);
      loaded.tensors.emplace_back(std::move(name), std::move(m));
    }
  } catch (const nlohmann::json::exception& e) {
    throw DataError("malformed checkpoint header " + path + ": " + e.what());
  }
  return loaded;
}

inline const Eigen::MatrixXd& find_tensor(const LoadedCheckpoint& loaded, const std::string& name,
                                          const std::string& path) {
  for (const auto& [n, m] : loaded.tensors)
    if (n == name) return m;
  throw DataError("checkpoint " + path + " missing tensor " + name);
}

inline void load_encoder_checkpoint(const std::string& path, const char* expected_kind,
                                    Parameters& params, const FusionRegressorConfig& config) {
  auto loaded = read_checkpoint_file(path);
  auto kind = loaded.header.value("kind", "");
  if (kind != expected_kind)
    throw ConfigError("checkpoint " + path + " holds '" + kind + "', expected '" +
                      expected_kind + "'");
  bool image = std::string(expected_kind) == "image_encoder";
  const auto& W = find_tensor(loaded, image ? "img_W" : "txt_W", path);
  const auto& b = find_tensor(loaded, image ? "img_b" : "txt_b", path);
  Eigen::Index want_rows = image ? config.image_feature_dim : config.text_feature_dim;
  Eigen::Index want_cols = image ? config.image_input_dim() : config.text_input_dim();
  if (W.rows() != want_rows || W.cols() != want_cols || b.rows() != want_rows)
    throw ConfigError("checkpoint " + path + " shape does not match the model config");
  if (image) {
    params.img_W = W;
    params.img_b = b.col(0);
  } else {
    params.txt_W = W;
    params.txt_b = b.col(0);
  }
}

}  // namespace detail

inline void save_checkpoint(const std::string& path, const FusionRegressor& model) {
  const auto& p = model.params();
  Eigen::MatrixXd out_b_mat(1, 1);
  out_b_mat(0, 0) = p.out_b;
  std::vector<detail::TensorEntry> tensors = {
      {"img_W", p.img_W.rows(), p.img_W.cols(), p.img_W.data()},
      {"img_b", p.img_b.rows(), 1, p.img_b.data()},
      {"txt_W", p.txt_W.rows(), p.txt_W.cols(), p.txt_W.data()},
      {"txt_b", p.txt_b.rows(), 1, p.txt_b.data()},
      {"fc_W", p.fc_W.rows(), p.fc_W.cols(), p.fc_W.data()},
      {"fc_b", p.fc_b.rows(), 1, p.fc_b.data()},
      {"out_w", p.out_w.rows(), 1, p.out_w.data()},
      {"out_b", 1, 1, out_b_mat.data()},
  };
  detail::write_checkpoint_file(path, "model", config_to_json(model.config()), tensors);
}

/// Saves one encoder adapter alone — the "pretrained encoder weights" format
/// consumed by FusionRegressorConfig::{image,text}_encoder_checkpoint.
inline void save_encoder_checkpoint(const std::string& path, const FusionRegressor& model,
                                    bool image_encoder) {
  const auto& p = model.params();
  const auto& W = image_encoder ? p.img_W : p.txt_W;
  const auto& b = image_encoder ? p.img_b : p.txt_b;
  std::vector<detail::TensorEntry> tensors = {
      {image_encoder ? "img_W" : "txt_W", W.rows(), W.cols(), W.data()},
      {image_encoder ? "img_b" : "txt_b", b.rows(), 1, b.data()},
  };
  detail::write_checkpoint_file(path, image_encoder ? "image_encoder" : "text_encoder",
                                config_to_json(model.config()), tensors);
}

inline FusionRegressor load_checkpoint(const std::string& path) {
  auto loaded = detail::read_checkpoint_file(path);
  if (loaded.header.value("kind", "") != "model")
    throw ConfigError("checkpoint " + path + " is not a full model");
  FusionRegressorConfig config;
  try {
    config = config_from_json(loaded.header.at("config"));
  } catch (const nlohmann::json::exception& e) {
    throw DataError("malformed checkpoint config " + path + ": " + e.what());
  }
  // Rebuild structure, then overwrite every tensor from the file.
  FusionRegressorConfig fresh = config;
  fresh.image_encoder_checkpoint.clear();
  fresh.text_encoder_checkpoint.clear();
  FusionRegressor model = FusionRegressor::build(fresh);
  auto& p = model.params_;
  auto assign = [&](const char* name, auto& dst) {
    const auto& src = detail::find_tensor(loaded, name, path);
    if (src.rows() != dst.rows() || src.cols() != dst.cols())
      throw DataError("checkpoint tensor " + std::string(name) + " has wrong shape in " + path);
    dst = src;
  };
  assign("img_W", p.img_W);
  auto assign_vec = [&](const char* name, Eigen::VectorXd& dst) {
    const auto& src = detail::find_tensor(loaded, name, path);
    if (src.rows() != dst.rows() || src.cols() != 1)
      throw DataError("checkpoint tensor " + std::string(name) + " has wrong shape in " + path);
    dst = src.col(0);
  };
  assign_vec("img_b", p.img_b);
  assign("txt_W", p.txt_W);
  assign_vec("txt_b", p.txt_b);
  assign("fc_W", p.fc_W);
  assign_vec("fc_b", p.fc_b);
  assign_vec("out_w", p.out_w);
  p.out_b = detail::find_tensor(loaded, "out_b", path)(0, 0);
  return model;
}

}  // namespace realm::core
