#pragma once

#include <cctype>
#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "realm/error.hpp"
#include "realm/hash.hpp"
#include "realm/image.hpp"

namespace realm::core {

/// Fixed (non-trainable) image featurizer standing in for a pretrained
/// backbone's frozen trunk: block-mean luminance over a cells x cells grid,
/// plus global mean and global standard deviation. Pure function of pixels.
class ImageFeaturizer {
public:
  explicit ImageFeaturizer(int cells = 8) : cells_(cells) {
    if (cells <= 0) throw InvalidInputError("featurizer cells must be positive");
  }

  int cells() const { return cells_; }
  int dim() const { return cells_ * cells_ + 2; }

  Eigen::VectorXd operator()(const ImageF& image) const {
    if (image.empty()) throw InvalidInputError("cannot featurize empty image");
    Eigen::VectorXd f = Eigen::VectorXd::Zero(dim());
    const int h = image.height(), w = image.width();
    double total = 0.0, total_sq = 0.0;
    for (int cy = 0; cy < cells_; ++cy) {
      // Exact pixel partition, no resampling: cell cy covers rows
      // [h*cy/cells, h*(cy+1)/cells).
      int y0 = int(std::int64_t(h) * cy / cells_);
      int y1 = int(std::int64_t(h) * (cy + 1) / cells_);
      for (int cx = 0; cx < cells_; ++cx) {
        int x0 = int(std::int64_t(w) * cx / cells_);
        int x1 = int(std::int64_t(w) * (cx + 1) / cells_);
        double sum = 0.0;
        int count = 0;
        for (int y = y0; y < y1; ++y)
          for (int x = x0; x < x1; ++x) {
            double v = image.luminance(y, x);
            sum += v;
            total += v;
            total_sq += v * v;
            ++count;
          }
        f[cy * cells_ + cx] = count > 0 ? sum / count : 0.0;
      }
    }
    const double n = double(h) * w;
    double mean = total / n;
    double var = std::max(0.0, total_sq / n - mean * mean);
    f[cells_ * cells_] = mean;
    f[cells_ * cells_ + 1] = std::sqrt(var);
    return f;
  }

private:
  int cells_;
};

/// Fixed text featurizer standing in for a pretrained text trunk: hashed
/// bag-of-words over lowercased alphanumeric tokens, L2-normalized counts.
/// The empty string maps to the zero feature vector.
class TextFeaturizer {
public:
  explicit TextFeaturizer(int buckets = 128) : buckets_(buckets) {
    if (buckets <= 0) throw InvalidInputError("featurizer buckets must be positive");
  }

  int buckets() const { return buckets_; }
  int dim() const { return buckets_; }

  static std::vector<std::string> tokenize(const std::string& text) {
    std::vector<std::string> tokens;
    std::string current;
    for (unsigned char c : text) {
      if (std::isalnum(c)) {
        current.push_back(char(std::tolower(c)));
      } else if (!current.empty()) {
        tokens.push_back(std::move(current));
        current.clear();
      }
    }
    if (!current.empty()) tokens.push_back(std::move(current));
    return tokens;
  }

  Eigen::VectorXd operator()(const std::string& text) const {
    Eigen::VectorXd f = Eigen::VectorXd::Zero(buckets_);
    for (const auto& token : tokenize(text))
      f[static_cast<int>(fnv1a64(token) % std::uint64_t(buckets_))] += 1.0;
    double norm = f.norm();
    if (norm > 0.0) f /= norm;
    return f;
  }

private:
  int buckets_;
};

}  // namespace realm::core
