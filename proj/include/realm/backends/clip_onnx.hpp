#pragma once

#include <array>
#include <filesystem>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "realm/backends/backend.hpp"
#include "realm/backends/clip_tokenizer.hpp"
#include "realm/error.hpp"
#include "realm/image.hpp"

#ifdef REALM_WITH_OPENCV
#include <opencv2/core.hpp>
#include <opencv2/dnn.hpp>
#endif

namespace realm::backends {

/// Production joint-embedding backend: a pair of exported ONNX encoders (one
/// visual, one text) plus the merges file that defines their tokenizer.
struct ClipOnnxConfig {
  std::string image_model;  // ONNX visual encoder, input NCHW float
  std::string text_model;   // ONNX text encoder, input N x context ids
  std::string merges;       // BPE merge list
  int embedding_dim = 512;
  int image_size = 224;  // native input resolution; every patch is resized to it
  int context_length = 77;
  int max_batch = 32;
  // Channel statistics the checkpoints were trained with.
  std::array<double, 3> mean{0.48145466, 0.4578275, 0.40821073};
  std::array<double, 3> stddev{0.26862954, 0.26130258, 0.27577711};

  void validate() const {
    auto require_file = [](const std::string& path, const char* what) {
      if (path.empty()) throw ConfigError(std::string(what) + " path not set");
      if (!std::filesystem::exists(path))
        throw ConfigError(std::string(what) + " not found: " + path);
    };
    require_file(image_model, "image model");
    require_file(text_model, "text model");
    require_file(merges, "merges file");
    if (embedding_dim <= 0) throw ConfigError("embedding_dim must be positive");
    if (image_size <= 0) throw ConfigError("image_size must be positive");
    if (context_length < 3) throw ConfigError("context_length must be >= 3");
    if (max_batch <= 0) throw ConfigError("max_batch must be positive");
    for (int c = 0; c < 3; ++c)
      if (stddev[c] <= 0.0) throw ConfigError("stddev must be positive");
  }
};

namespace detail {

/// Crop, resize to the backend's native input resolution, replicate gray to
/// three channels, and standardize. Returns planar CHW floats, ready to sit
/// in an NCHW batch. Kept free of any inference dependency so preprocessing
/// is testable everywhere.
inline std::vector<float> preprocess_patch(const ImageF& image, const Rect& rect,
                                           const ClipOnnxConfig& config) {
  ImageF patch = image.crop(rect).resize(config.image_size, config.image_size);
  const int s = config.image_size;
  std::vector<float> out(std::size_t(3) * s * s);
  for (int c = 0; c < 3; ++c) {
    const int src_c = patch.channels() == 3 ? c : 0;
    float* plane = out.data() + std::size_t(c) * s * s;
    for (int y = 0; y < s; ++y)
      for (int x = 0; x < s; ++x)
        plane[y * s + x] =
            float((patch.at(y, x, src_c) - config.mean[c]) / config.stddev[c]);
  }
  return out;
}

}  // namespace detail

#ifdef REALM_WITH_OPENCV

/// Runs the exported encoders through the OpenCV DNN runtime. Net forward
/// passes mutate internal buffers, so each net is guarded by a mutex; callers
/// may still encode from many threads, batches just serialize at the net.
class ClipOnnxBackend : public EmbeddingBackend {
public:
  explicit ClipOnnxBackend(ClipOnnxConfig config)
      : config_(std::move(config)), tokenizer_(load_tokenizer(config_)) {
    try {
      image_net_ = cv::dnn::readNetFromONNX(config_.image_model);
      text_net_ = cv::dnn::readNetFromONNX(config_.text_model);
    } catch (const cv::Exception& e) {
      throw ConfigError(std::string("failed to load encoder model: ") + e.what());
    }
  }

  BackendDescriptor descriptor() const override {
    return BackendDescriptor{"clip", config_.embedding_dim, config_.max_batch};
  }

  EmbeddingVector encode_text(const std::string& description) const override {
    check_text(description);
    std::vector<int> ids = tokenizer_.tokenize(description);
    cv::Mat input(1, int(ids.size()), CV_32F);
    for (std::size_t i = 0; i < ids.size(); ++i)
      input.at<float>(0, int(i)) = float(ids[i]);
    cv::Mat out = forward(text_net_, text_mutex_, input, "text encoder");
    return row_vector(out, 0, "text encoder");
  }

  std::vector<EmbeddingVector> encode_patches(
      const std::vector<PatchInput>& patches) const override {
    check_patches(patches);
    for (std::size_t i = 0; i < patches.size(); ++i)
      if (patches[i].image == nullptr)
        throw InvalidInputError("encode_patches: patch " + std::to_string(i) +
                                " carries no pixels");
    std::vector<EmbeddingVector> result;
    result.reserve(patches.size());
    const int s = config_.image_size;
    for (std::size_t begin = 0; begin < patches.size();
         begin += std::size_t(config_.max_batch)) {
      const int n = int(std::min(patches.size() - begin, std::size_t(config_.max_batch)));
      const int dims[4] = {n, 3, s, s};
      cv::Mat blob(4, dims, CV_32F);
      for (int k = 0; k < n; ++k) {
        auto planes = detail::preprocess_patch(*patches[begin + k].image,
                                               patches[begin + k].rect, config_);
        std::copy(planes.begin(), planes.end(), blob.ptr<float>(k));
      }
      cv::Mat out = forward(image_net_, image_mutex_, blob, "image encoder");
      for (int k = 0; k < n; ++k) result.push_back(row_vector(out, k, "image encoder"));
    }
    return result;
  }

  const ClipTokenizer& tokenizer() const { return tokenizer_; }

private:
  static ClipTokenizer load_tokenizer(const ClipOnnxConfig& config) {
    config.validate();
    return ClipTokenizer::from_merges_file(config.merges, config.context_length);
  }

  cv::Mat forward(cv::dnn::Net& net, std::mutex& mutex, const cv::Mat& input,
                  const char* what) const {
    std::lock_guard lock(mutex);
    try {
      net.setInput(input);
      cv::Mat out = net.forward();
      return out.clone();
    } catch (const cv::Exception& e) {
      throw BackendError(std::string(what) + " forward pass failed: " + e.what());
    }
  }

  EmbeddingVector row_vector(const cv::Mat& out, int row, const char* what) const {
    if (out.dims != 2 || out.cols != config_.embedding_dim || row >= out.rows)
      throw BackendError(std::string(what) + " returned an unexpected shape");
    std::vector<double> values(config_.embedding_dim);
    for (int i = 0; i < config_.embedding_dim; ++i)
      values[i] = double(out.at<float>(row, i));
    try {
      return EmbeddingVector(std::move(values));
    } catch (const InvalidInputError& e) {
      throw BackendError(std::string(what) + " produced an invalid embedding: " + e.what());
    }
  }

  ClipOnnxConfig config_;
  ClipTokenizer tokenizer_;
  mutable cv::dnn::Net image_net_;
  mutable cv::dnn::Net text_net_;
  mutable std::mutex image_mutex_;
  mutable std::mutex text_mutex_;
};

#endif  // REALM_WITH_OPENCV

}  // namespace realm::backends
