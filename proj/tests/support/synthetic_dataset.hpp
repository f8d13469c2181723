#pragma once

// Deterministic 32-sample smoke set for training tests. The score is an
// exact function of two planted signals, one per modality:
//   - image: a horizontal ramp whose overall brightness level g has 8 steps
//   - text: a description carrying k in {0..3} distinct artifact words
//   - score = 0.2 + 0.5 * (g_step / 7) + 0.2 * (k / 3)
// Joint models can explain all of the variance; image-only or text-only
// models top out at their own component, which is what the ablation sanity
// checks lean on.

#include <cstdio>
#include <string>
#include <vector>

#include "realm/core/train.hpp"
#include "realm/dataset.hpp"
#include "realm/image.hpp"
#include "realm/image_io.hpp"

namespace support {

inline realm::ImageF smoke_image(int g_step) {
  const int side = 24;
  double g = 0.15 + 0.8 * double(g_step) / 7.0;
  realm::ImageF img(side, side, 1);
  for (int y = 0; y < side; ++y)
    for (int x = 0; x < side; ++x)
      img.at(y, x) = g * (0.7 + 0.3 * double(x) / double(side - 1));
  return img;
}

inline std::string smoke_description(int k) {
  static const char* artifact_words[3] = {"warped", "distorted", "smeared"};
  std::string text = "the scene layout and lighting look plausible";
  for (int i = 0; i < k; ++i) text += std::string(" with ") + artifact_words[i] + " regions";
  return text;
}

inline double smoke_score(int g_step, int k) {
  return 0.2 + 0.5 * double(g_step) / 7.0 + 0.2 * double(k) / 3.0;
}

/// All 32 samples, ordered with the text signal in the low bits so any
/// stride-based split sees the full range of both planted factors.
inline std::vector<realm::core::TrainSample> smoke_samples() {
  std::vector<realm::core::TrainSample> samples;
  for (int g_step = 0; g_step < 8; ++g_step) {
    for (int k = 0; k < 4; ++k) {
      realm::core::TrainSample s;
      char id[16];
      std::snprintf(id, sizeof id, "smoke_%02d", g_step * 4 + k);
      s.id = id;
      s.image = smoke_image(g_step);
      s.description = smoke_description(k);
      s.target = smoke_score(g_step, k);
      samples.push_back(std::move(s));
    }
  }
  return samples;
}

/// Every 5th sample held out: 26 train / 6 validation, both covering the
/// range of each planted factor.
inline void smoke_split(const std::vector<realm::core::TrainSample>& all,
                        std::vector<realm::core::TrainSample>& train,
                        std::vector<realm::core::TrainSample>& val) {
  train.clear();
  val.clear();
  for (std::size_t i = 0; i < all.size(); ++i)
    (i % 5 == 2 ? val : train).push_back(all[i]);
}

/// Materializes the smoke set as PGM files plus a manifest, for exercising
/// the record-loading and CLI paths. Returns the manifest path.
inline std::string write_smoke_dataset(const std::string& dir) {
  realm::dataset::DatasetManifest manifest;
  manifest.provenance = "synthetic smoke set";
  auto& records = manifest.records;
  for (const auto& s : smoke_samples()) {
    std::string image_name = s.id + ".pgm";
    realm::save_image(dir + "/" + image_name, realm::to_u8(s.image));
    realm::dataset::RealnessRecord r;
    r.id = s.id;
    r.image_ref = image_name;
    r.mos = s.target;
    r.verdict = s.description.find("warped") != std::string::npos
                    ? realm::dataset::Verdict::kYes
                    : realm::dataset::Verdict::kNo;
    r.description = s.description;
    r.source = realm::dataset::Source::kSynthetic;
    records.push_back(std::move(r));
  }
  std::string manifest_path = dir + "/smoke_manifest.jsonl";
  realm::dataset::save_manifest(manifest_path, manifest);
  return manifest_path;
}

}  // namespace support
