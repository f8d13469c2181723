#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "realm/core/adamw.hpp"
#include "realm/core/model.hpp"
#include "realm/dataset.hpp"
#include "realm/error.hpp"
#include "realm/image.hpp"
#include "realm/image_io.hpp"
#include "realm/metrics.hpp"
#include "realm/paths.hpp"
#include "realm/rng.hpp"

#include "json.hpp"

namespace realm::core {

/// One resolved training sample: decoded image, paired description, target
/// score. Ablation substitutions happen at featurization time so large
/// sample sets never materialize per-sample zero images.
struct TrainSample {
  std::string id;
  ImageF image;
  std::string description;
  double target = 0.0;
};

struct TrainConfig {
  double learning_rate = 1e-4;
  double weight_decay = 0.01;
  int epochs = 30;
  int batch_size = 8;
  std::uint64_t seed = 0;
  std::string mode = "joint";  // joint | image_only | text_only
  /// Horizontal flip (p = 0.5) + random resized crop (area in [0.8, 1]).
  bool augment = false;
  /// Min-max scale targets to [0, 1] using the train split's range. Rank
  /// metrics are unaffected; squared error moves to the scaled space.
  bool scale_targets = false;

  void validate() const {
    // learning_rate == 0 is allowed as an inert configuration (parameters
    // stay fixed); only negative or non-finite rates are rejected.
    if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate))
      throw ConfigError("learning_rate must be a finite value >= 0");
    if (weight_decay < 0.0) throw ConfigError("weight_decay must be >= 0");
    if (epochs <= 0) throw ConfigError("epochs must be positive");
    if (batch_size <= 0) throw ConfigError("batch_size must be positive");
    try {
      ablation_from_name(mode);
    } catch (const InvalidInputError& e) {
      throw ConfigError(e.what());  // a bad mode here is a config problem
    }
  }
};

inline nlohmann::ordered_json train_config_to_json(const TrainConfig& c) {
  nlohmann::ordered_json j;
  j["learning_rate"] = c.learning_rate;
  j["weight_decay"] = c.weight_decay;
  j["epochs"] = c.epochs;
  j["batch_size"] = c.batch_size;
  j["seed"] = c.seed;
  j["mode"] = c.mode;
  j["augment"] = c.augment;
  j["scale_targets"] = c.scale_targets;
  return j;
}

inline TrainConfig train_config_from_json(const nlohmann::json& j) {
  TrainConfig c;
  c.learning_rate = j.value("learning_rate", c.learning_rate);
  c.weight_decay = j.value("weight_decay", c.weight_decay);
  c.epochs = j.value("epochs", c.epochs);
  c.batch_size = j.value("batch_size", c.batch_size);
  c.seed = j.value("seed", c.seed);
  c.mode = j.value("mode", c.mode);
  c.augment = j.value("augment", c.augment);
  c.scale_targets = j.value("scale_targets", c.scale_targets);
  c.validate();
  return c;
}

struct EpochStats {
  int epoch = 0;  // 1-based
  double train_mse = std::numeric_limits<double>::quiet_NaN();
  double val_mse = std::numeric_limits<double>::quiet_NaN();
  double val_srocc = std::numeric_limits<double>::quiet_NaN();
  double val_plcc = std::numeric_limits<double>::quiet_NaN();
  double wall_ms = 0.0;
};

struct TrainResult {
  std::vector<EpochStats> history;
  /// Epoch whose weights the model holds on return: the best validation
  /// SROCC epoch, or the last one when no finite validation score appeared.
  int best_epoch = 0;
  double best_val_srocc = std::numeric_limits<double>::quiet_NaN();
  /// Target range used for scaling (target_hi > target_lo only when
  /// scale_targets was active and the range was non-degenerate).
  double target_lo = std::numeric_limits<double>::quiet_NaN();
  double target_hi = std::numeric_limits<double>::quiet_NaN();
};

// --- epoch history persistence (one JSON object per line) ---

/// Persisted line for one epoch. Wall time stays out on purpose: the saved
/// trajectory must be identical across same-seed reruns, and timing never is.
inline nlohmann::ordered_json epoch_stats_to_json(const EpochStats& e) {
  nlohmann::ordered_json j;
  j["epoch"] = e.epoch;
  j["train_mse"] = e.train_mse;
  j["val_mse"] = e.val_mse;
  j["val_srocc"] = e.val_srocc;
  j["val_plcc"] = e.val_plcc;
  return j;
}

inline void save_history(const std::string& path, const std::vector<EpochStats>& history) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot open for writing: " + path);
  for (const auto& e : history)
    out << epoch_stats_to_json(e).dump() << '\n';  // non-finite values serialize as null
  if (!out) throw DataError("short write: " + path);
}

inline std::vector<EpochStats> load_history(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open history: " + path);
  auto num_or_nan = [](const nlohmann::json& j, const char* key) {
    if (!j.contains(key) || j[key].is_null())
      return std::numeric_limits<double>::quiet_NaN();
    return j[key].get<double>();
  };
  std::vector<EpochStats> history;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw DataError(path + ":" + std::to_string(line_no) + ": " + e.what());
    }
    EpochStats s;
    s.epoch = j.value("epoch", 0);
    s.train_mse = num_or_nan(j, "train_mse");
    s.val_mse = num_or_nan(j, "val_mse");
    s.val_srocc = num_or_nan(j, "val_srocc");
    s.val_plcc = num_or_nan(j, "val_plcc");
    s.wall_ms = num_or_nan(j, "wall_ms");
    history.push_back(s);
  }
  return history;
}

// --- augmentation ---

inline ImageF random_resized_crop(const ImageF& img, Rng& rng, double min_area = 0.8) {
  double area = min_area + (1.0 - min_area) * rng.next_double();
  double side = std::sqrt(area);
  int ch = std::min(img.height(), std::max(1, int(std::lround(side * img.height()))));
  int cw = std::min(img.width(), std::max(1, int(std::lround(side * img.width()))));
  int top = ch < img.height() ? int(rng.next_below(std::uint64_t(img.height() - ch + 1))) : 0;
  int left = cw < img.width() ? int(rng.next_below(std::uint64_t(img.width() - cw + 1))) : 0;
  return img.crop(Rect{left, top, cw, ch}).resize(img.height(), img.width());
}

/// Train-time image augmentation: coin-flip horizontal mirror, then a random
/// resized crop back to the original shape.
inline ImageF augment_image(const ImageF& img, Rng& rng) {
  ImageF flipped = rng.next_below(2) ? img.flipped_horizontal() : img;
  return random_resized_crop(flipped, rng);
}

// --- sample assembly ---

/// Decodes every record's image and pairs it with the description and MOS.
/// Records without a score are rejected: training needs targets.
inline std::vector<TrainSample> load_samples(const std::vector<dataset::RealnessRecord>& records,
                                             const std::string& image_root) {
  std::vector<TrainSample> samples;
  samples.reserve(records.size());
  for (const auto& r : records) {
    if (!std::isfinite(r.mos))
      throw DataError("record '" + r.id + "' has no usable score");
    TrainSample s;
    s.id = r.id;
    try {
      s.image = load_image(join_path(image_root, r.image_ref));
    } catch (const Error& e) {
      throw DataError("record '" + r.id + "': " + e.what());
    }
    s.description = r.description;
    s.target = r.mos;
    samples.push_back(std::move(s));
  }
  return samples;
}

namespace detail {

/// Featurized rows for a sample set under an ablation mode. The zero image
/// substituted in text_only mode is featurized once and the row reused.
struct FeatureRows {
  Eigen::MatrixXd f_img;
  Eigen::MatrixXd f_txt;
};

inline FeatureRows build_features(const FusionRegressor& model,
                                  const std::vector<TrainSample>& samples,
                                  AblationMode mode) {
  const auto& cfg = model.config();
  FeatureRows rows;
  rows.f_img.resize(Eigen::Index(samples.size()), cfg.image_input_dim());
  rows.f_txt.resize(Eigen::Index(samples.size()), cfg.text_input_dim());

  Eigen::VectorXd zero_row;
  if (mode == AblationMode::kTextOnly) {
    ImageF zero(cfg.standard_image_size, cfg.standard_image_size, 3, 0.0);
    zero_row = model.image_featurizer()(zero);
  }
  for (std::size_t i = 0; i < samples.size(); ++i) {
    auto r = Eigen::Index(i);
    rows.f_img.row(r) = mode == AblationMode::kTextOnly
                            ? zero_row.transpose()
                            : model.image_featurizer()(samples[i].image).transpose();
    rows.f_txt.row(r) = mode == AblationMode::kImageOnly
                            ? model.text_featurizer()(std::string()).transpose()
                            : model.text_featurizer()(samples[i].description).transpose();
  }
  return rows;
}

inline double metric_or_nan(double (*metric)(const std::vector<double>&,
                                             const std::vector<double>&),
                            const std::vector<double>& a, const std::vector<double>& b) {
  try {
    return metric(a, b);
  } catch (const InvalidInputError&) {
    return std::numeric_limits<double>::quiet_NaN();  // e.g. constant predictions
  }
}

}  // namespace detail

/// Predictions for a sample set under an ablation mode, in sample order.
inline std::vector<double> predict_samples(const FusionRegressor& model,
                                           const std::vector<TrainSample>& samples,
                                           AblationMode mode) {
  if (samples.empty()) throw InvalidInputError("predict_samples: empty sample set");
  auto rows = detail::build_features(model, samples, mode);
  auto act = model.forward(std::move(rows.f_img), std::move(rows.f_txt));
  return {act.y.data(), act.y.data() + act.y.size()};
}

/// Minimizes batch MSE with AdamW. Encoder adapters train only when the
/// model config says so; the fusion head always trains. The model is left
/// holding the best-validation-SROCC weights seen (falling back to the final
/// epoch when validation is absent or never produced a finite score).
inline TrainResult train(FusionRegressor& model, const std::vector<TrainSample>& train_set,
                         const std::vector<TrainSample>& val_set, const TrainConfig& config,
                         const std::function<void(const EpochStats&)>& on_epoch = {}) {
  config.validate();
  if (train_set.empty()) throw InvalidInputError("train: empty training set");
  AblationMode mode = ablation_from_name(config.mode);
  const bool finetune = model.config().finetune_encoders;

  Eigen::VectorXd train_targets(static_cast<Eigen::Index>(train_set.size()));
  for (std::size_t i = 0; i < train_set.size(); ++i)
    train_targets(Eigen::Index(i)) = train_set[i].target;
  std::vector<double> val_targets(val_set.size());
  for (std::size_t i = 0; i < val_set.size(); ++i) val_targets[i] = val_set[i].target;

  TrainResult result;
  if (config.scale_targets) {
    double lo = train_targets.minCoeff();
    double hi = train_targets.maxCoeff();
    if (hi > lo) {
      result.target_lo = lo;
      result.target_hi = hi;
      train_targets = (train_targets.array() - lo) / (hi - lo);
      for (auto& t : val_targets) t = (t - lo) / (hi - lo);
    }
  }

  auto train_rows = detail::build_features(model, train_set, mode);
  detail::FeatureRows val_rows;
  if (!val_set.empty()) val_rows = detail::build_features(model, val_set, mode);

  // Warm-start the output bias at the mean target so early steps spend their
  // budget on structure rather than on closing a large constant offset.
  model.params().out_b = train_targets.mean();

  AdamW optimizer(config.learning_rate, config.weight_decay);
  Rng rng(config.seed);
  const auto n = train_set.size();
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;

  Parameters best_params;
  bool have_best = false;

  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    auto t0 = std::chrono::steady_clock::now();
    rng.shuffle(order);

    double sq_err_sum = 0.0;
    for (std::size_t begin = 0; begin < n; begin += std::size_t(config.batch_size)) {
      std::size_t count = std::min(std::size_t(config.batch_size), n - begin);
      Eigen::MatrixXd f_img(Eigen::Index(count), train_rows.f_img.cols());
      Eigen::MatrixXd f_txt(Eigen::Index(count), train_rows.f_txt.cols());
      Eigen::VectorXd targets(static_cast<Eigen::Index>(count));
      for (std::size_t k = 0; k < count; ++k) {
        std::size_t idx = order[begin + k];
        if (config.augment && mode != AblationMode::kTextOnly) {
          ImageF aug = augment_image(train_set[idx].image, rng);
          f_img.row(Eigen::Index(k)) = model.image_featurizer()(aug).transpose();
        } else {
          f_img.row(Eigen::Index(k)) = train_rows.f_img.row(Eigen::Index(idx));
        }
        f_txt.row(Eigen::Index(k)) = train_rows.f_txt.row(Eigen::Index(idx));
        targets(Eigen::Index(k)) = train_targets(Eigen::Index(idx));
      }

      auto act = model.forward(std::move(f_img), std::move(f_txt));
      double loss = model.mse(act, targets);
      if (!std::isfinite(loss))
        throw ComputeError("non-finite training loss at epoch " + std::to_string(epoch) +
                           ", step " + std::to_string(begin / std::size_t(config.batch_size)));
      sq_err_sum += loss * double(count);

      auto grads = model.backward(act, targets);
      optimizer.step(model.params().tensors(finetune), grads.params.tensors(finetune));
    }

    EpochStats stats;
    stats.epoch = epoch;
    stats.train_mse = sq_err_sum / double(n);

    if (!val_set.empty()) {
      auto act = model.forward(val_rows.f_img, val_rows.f_txt);
      std::vector<double> preds(act.y.data(), act.y.data() + act.y.size());
      double se = 0.0;
      for (std::size_t i = 0; i < preds.size(); ++i) {
        double d = preds[i] - val_targets[i];
        se += d * d;
      }
      stats.val_mse = se / double(preds.size());
      stats.val_srocc = detail::metric_or_nan(&metrics::srocc, preds, val_targets);
      stats.val_plcc = detail::metric_or_nan(&metrics::plcc, preds, val_targets);
      if (std::isfinite(stats.val_srocc) &&
          (!have_best || stats.val_srocc > result.best_val_srocc)) {
        best_params = model.params();
        have_best = true;
        result.best_epoch = epoch;
        result.best_val_srocc = stats.val_srocc;
      }
    }

    stats.wall_ms = std::chrono::duration<double, std::milli>(
                        std::chrono::steady_clock::now() - t0).count();
    result.history.push_back(stats);
    if (on_epoch) on_epoch(stats);
  }

  if (have_best)
    model.params() = best_params;
  else
    result.best_epoch = config.epochs;
  return result;
}

}  // namespace realm::core
