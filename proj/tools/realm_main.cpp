// Command line front end. Subcommands cover the full workflow: manifest
// validation and split generation, VLM annotation, regressor training and
// ablation, evaluation, dense realness maps, and scatter plots.
//
// Exit codes: 0 success, 2 configuration/usage, 3 data, 4 backend/compute.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "realm/annotator/annotate.hpp"
#include "realm/annotator/cache.hpp"
#include "realm/annotator/prompt.hpp"
#include "realm/annotator/provider.hpp"
#include "realm/backends/factory.hpp"
#include "realm/core/model.hpp"
#include "realm/core/train.hpp"
#include "realm/dataset.hpp"
#include "realm/dream/grid_io.hpp"
#include "realm/dream/heatmap.hpp"
#include "realm/dream/pipeline.hpp"
#include "realm/error.hpp"
#include "realm/image_io.hpp"
#include "realm/metrics.hpp"
#include "realm/paths.hpp"
#include "realm/plot.hpp"

namespace {

using nlohmann::ordered_json;

// --- shared plumbing ---

void ensure_dir(const std::string& dir) {
  if (dir.empty()) throw realm::ConfigError("output directory must not be empty");
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec)
    throw realm::ConfigError("cannot create output directory " + dir + ": " + ec.message());
}

void ensure_parent_dir(const std::string& file) {
  auto parent = std::filesystem::path(file).parent_path();
  if (parent.empty()) return;
  std::error_code ec;
  std::filesystem::create_directories(parent, ec);
  if (ec)
    throw realm::ConfigError("cannot create directory " + parent.string() + ": " + ec.message());
}

nlohmann::json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw realm::ConfigError("cannot open config file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw realm::ConfigError("malformed config " + path + ": " + e.what());
  }
  return j;
}

void write_json_file(const std::string& path, const ordered_json& j) {
  std::ofstream out(path);
  if (!out) throw realm::DataError("cannot open for writing: " + path);
  out << j.dump(2) << '\n';
  if (!out) throw realm::DataError("short write: " + path);
}

/// Every run leaves a manifest of its resolved settings next to (or inside)
/// its output, so any artifact can be traced back to the exact invocation.
void write_run_manifest(const std::string& path, const std::string& subcommand,
                        ordered_json resolved) {
  ordered_json j;
  j["tool"] = "realm";
  j["schema_version"] = 1;
  j["subcommand"] = subcommand;
  j["resolved"] = std::move(resolved);
  write_json_file(path, j);
}

void write_split_file(const std::string& path, const realm::dataset::Split& split) {
  ordered_json j;
  auto ids = [](const std::vector<realm::dataset::RealnessRecord>& side) {
    ordered_json a = ordered_json::array();
    for (const auto& r : side) a.push_back(r.id);
    return a;
  };
  j["train"] = ids(split.first);
  j["test"] = ids(split.second);
  write_json_file(path, j);
}

/// Record ids become file stems; keep them path-safe.
std::string sanitize_stem(const std::string& id) {
  std::string out = id;
  for (char& c : out)
    if (c == '/' || c == '\\' || c == ' ') c = '_';
  return out;
}

/// Appends history lines as epochs finish and flushes each one, so an
/// interrupted run still leaves a readable prefix. Line format matches
/// save_history byte for byte.
class HistoryWriter {
public:
  explicit HistoryWriter(const std::string& path) : out_(path) {
    if (!out_) throw realm::DataError("cannot open for writing: " + path);
  }
  void append(const realm::core::EpochStats& e) {
    out_ << realm::core::epoch_stats_to_json(e).dump() << '\n';
    out_.flush();
  }

private:
  std::ofstream out_;
};

// --- dataset validate ---

struct ValidateOpts {
  std::string manifest;
  std::string image_root;
  bool check_images = false;
  std::string out;
};

int run_dataset_validate(const ValidateOpts& o) {
  auto manifest = realm::dataset::load_manifest(o.manifest);
  std::vector<std::pair<std::string, std::string>> violations;
  for (const auto& r : manifest.records) {
    auto rec = r;
    if (o.check_images) rec.image_ref = realm::join_path(o.image_root, r.image_ref);
    for (const auto& v : realm::dataset::validate_record(rec, o.check_images))
      violations.emplace_back(r.id, v);
  }

  std::cout << o.manifest << ": " << manifest.records.size() << " record(s), "
            << violations.size() << " violation(s)\n";
  for (const auto& [id, what] : violations) std::cout << "  " << id << ": " << what << '\n';

  if (!o.out.empty()) {
    ensure_dir(o.out);
    ordered_json report;
    report["manifest"] = o.manifest;
    report["records"] = manifest.records.size();
    report["violations"] = ordered_json::array();
    for (const auto& [id, what] : violations)
      report["violations"].push_back({{"id", id}, {"problem", what}});
    write_json_file(realm::join_path(o.out, "validation.json"), report);

    ordered_json resolved;
    resolved["manifest"] = o.manifest;
    resolved["image_root"] = o.image_root;
    resolved["check_images"] = o.check_images;
    resolved["out"] = o.out;
    write_run_manifest(realm::join_path(o.out, "run.json"), "dataset validate",
                       std::move(resolved));
  }
  return violations.empty() ? 0 : 3;
}

// --- dataset split ---

struct SplitOpts {
  std::string manifest;
  std::string scheme = "holdout";
  int test_count = 0;  // 0: derive from train_fraction
  double train_fraction = 0.85;
  int folds = 5;
  std::uint64_t seed = 0;
  std::string out;
};

int run_dataset_split(const SplitOpts& o) {
  auto manifest = realm::dataset::load_manifest(o.manifest);
  const std::size_t n = manifest.records.size();

  realm::dataset::SplitSpec spec;
  spec.seed = o.seed;
  std::vector<std::string> written;

  ensure_dir(o.out);
  if (o.scheme == "holdout") {
    spec.kind = realm::dataset::SplitKind::kHoldout;
    std::size_t test = o.test_count > 0
                           ? std::size_t(o.test_count)
                           : n - std::size_t(std::llround(o.train_fraction * double(n)));
    spec.test_count = test;
    auto split = realm::dataset::split_holdout(manifest, spec);
    std::string path = realm::join_path(o.out, "split_holdout.json");
    write_split_file(path, split);
    written.push_back(path);
    std::cout << path << ": " << split.first.size() << " train / " << split.second.size()
              << " test\n";
  } else if (o.scheme == "kfold") {
    spec.kind = realm::dataset::SplitKind::kKfold;
    spec.k = std::size_t(o.folds);
    if (o.test_count > 0) spec.test_count = std::size_t(o.test_count);
    auto folds = realm::dataset::split_kfold(manifest, spec);
    for (std::size_t f = 0; f < folds.size(); ++f) {
      std::string path = realm::join_path(o.out, "fold_" + std::to_string(f + 1) + ".json");
      write_split_file(path, folds[f]);
      written.push_back(path);
      std::cout << path << ": " << folds[f].first.size() << " train / "
                << folds[f].second.size() << " test\n";
    }
  } else {
    throw realm::ConfigError("unknown split scheme: " + o.scheme + " (holdout, kfold)");
  }

  ordered_json resolved;
  resolved["manifest"] = o.manifest;
  resolved["scheme"] = o.scheme;
  resolved["records"] = n;
  if (o.test_count > 0)
    resolved["test_count"] = o.test_count;
  else
    resolved["train_fraction"] = o.train_fraction;
  if (o.scheme == "kfold") resolved["folds"] = o.folds;
  resolved["seed"] = o.seed;
  resolved["out"] = o.out;
  resolved["files"] = written;
  write_run_manifest(realm::join_path(o.out, "run.json"), "dataset split", std::move(resolved));
  return 0;
}

// --- annotate ---

struct AnnotateOpts {
  std::string manifest;
  std::string image_root;
  std::string provider;  // overrides the config file when set
  std::string provider_config;
  std::string cache_dir;  // overrides the config file when set
  int concurrency = 1;
  bool force = false;
  std::string out;  // defaults to in-place
};

int run_annotate(const AnnotateOpts& o) {
  realm::annotator::ProviderConfig cfg;
  if (!o.provider_config.empty())
    cfg = realm::annotator::provider_config_from_json(load_json_file(o.provider_config));
  if (!o.provider.empty()) cfg.provider = o.provider;
  if (!o.cache_dir.empty()) cfg.cache_dir = o.cache_dir;
  cfg.validate();

  auto manifest = realm::dataset::load_manifest(o.manifest);
  auto provider = realm::annotator::make_provider(cfg);
  realm::annotator::PromptTemplate tmpl;

  std::optional<realm::annotator::AnnotationCache> cache;
  if (!cfg.cache_dir.empty()) cache.emplace(cfg.cache_dir);

  auto report = realm::annotator::annotate_manifest(manifest, o.image_root, *provider, tmpl,
                                                    cache ? &*cache : nullptr, o.force,
                                                    o.concurrency);

  const std::string out_path = o.out.empty() ? o.manifest : o.out;
  ensure_parent_dir(out_path);
  realm::dataset::save_manifest(out_path, manifest);
  std::cout << report.summary() << '\n';
  std::cout << "saved " << out_path << '\n';

  ordered_json resolved;
  resolved["manifest"] = o.manifest;
  resolved["image_root"] = o.image_root;
  resolved["provider"] = realm::annotator::provider_config_to_json(cfg);
  resolved["prompt_version"] = tmpl.version;
  resolved["prompt_digest"] = realm::annotator::prompt_digest(tmpl);
  resolved["concurrency"] = o.concurrency;
  resolved["force"] = o.force;
  resolved["out"] = out_path;
  resolved["annotated"] = report.annotated;
  resolved["skipped"] = report.skipped;
  resolved["failed"] = report.failures.size();
  write_run_manifest(out_path + ".run.json", "annotate", std::move(resolved));
  return report.ok() ? 0 : 4;
}

// --- shared train/ablate/eval plumbing ---

struct DataOpts {
  std::string manifest;
  std::string image_root;
  std::string split_file;     // id-list file; test side becomes validation
  double val_fraction = 0.0;  // used when no split file is given
};

/// Resolves manifest + optional split into (train records, val records).
std::pair<std::vector<realm::dataset::RealnessRecord>, std::vector<realm::dataset::RealnessRecord>>
resolve_data(const DataOpts& d, std::uint64_t seed) {
  auto manifest = realm::dataset::load_manifest(d.manifest);
  if (!d.split_file.empty())
    return realm::dataset::split_from_id_file(manifest, d.split_file);
  if (d.val_fraction > 0.0) {
    realm::dataset::SplitSpec spec;
    spec.kind = realm::dataset::SplitKind::kHoldout;
    spec.seed = seed;
    auto count = std::size_t(std::llround(d.val_fraction * double(manifest.records.size())));
    spec.test_count = std::max<std::size_t>(count, 1);
    return realm::dataset::split_holdout(manifest, spec);
  }
  return {manifest.records, {}};
}

struct TrainCliOpts {
  DataOpts data;
  std::string train_config;
  std::string model_config;
  // command line overrides; negative = keep the config file's value
  std::string mode;
  std::int64_t seed = -1;
  int epochs = -1;
  double learning_rate = -1.0;
  int batch_size = -1;
  std::string out;
  int verbosity = 0;
};

realm::core::TrainConfig resolve_train_config(const TrainCliOpts& o) {
  realm::core::TrainConfig tc;
  if (!o.train_config.empty())
    tc = realm::core::train_config_from_json(load_json_file(o.train_config));
  if (!o.mode.empty()) tc.mode = o.mode;
  if (o.seed >= 0) tc.seed = std::uint64_t(o.seed);
  if (o.epochs >= 0) tc.epochs = o.epochs;
  if (o.learning_rate >= 0.0) tc.learning_rate = o.learning_rate;
  if (o.batch_size >= 0) tc.batch_size = o.batch_size;
  tc.validate();
  return tc;
}

realm::core::FusionRegressorConfig resolve_model_config(const std::string& path) {
  if (path.empty()) return {};
  return realm::core::config_from_json(load_json_file(path));
}

ordered_json train_opts_json(const TrainCliOpts& o, const realm::core::TrainConfig& tc,
                             const realm::core::FusionRegressorConfig& mc) {
  ordered_json resolved;
  resolved["manifest"] = o.data.manifest;
  resolved["image_root"] = o.data.image_root;
  if (!o.data.split_file.empty())
    resolved["split_file"] = o.data.split_file;
  else
    resolved["val_fraction"] = o.data.val_fraction;
  resolved["train"] = realm::core::train_config_to_json(tc);
  resolved["model"] = realm::core::config_to_json(mc);
  resolved["out"] = o.out;
  return resolved;
}

void print_epoch(const realm::core::EpochStats& e, int total) {
  std::ostringstream line;
  line << "epoch " << e.epoch << "/" << total << "  train_mse " << e.train_mse;
  if (std::isfinite(e.val_mse)) line << "  val_mse " << e.val_mse;
  if (std::isfinite(e.val_srocc)) line << "  val_srocc " << e.val_srocc;
  std::cout << line.str() << '\n';
}

// --- train ---

int run_train(const TrainCliOpts& o) {
  auto tc = resolve_train_config(o);
  auto mc = resolve_model_config(o.model_config);
  auto [train_records, val_records] = resolve_data(o.data, tc.seed);

  ensure_dir(o.out);
  write_run_manifest(realm::join_path(o.out, "run.json"), "train", train_opts_json(o, tc, mc));

  auto train_set = realm::core::load_samples(train_records, o.data.image_root);
  std::vector<realm::core::TrainSample> val_set;
  if (!val_records.empty()) val_set = realm::core::load_samples(val_records, o.data.image_root);

  auto model = realm::core::FusionRegressor::build(mc);
  HistoryWriter history(realm::join_path(o.out, "history.jsonl"));
  auto result = realm::core::train(model, train_set, val_set, tc,
                                   [&](const realm::core::EpochStats& e) {
                                     history.append(e);
                                     if (o.verbosity > 0) print_epoch(e, tc.epochs);
                                   });

  const std::string ckpt = realm::join_path(o.out, "model.rlmc");
  realm::core::save_checkpoint(ckpt, model);

  ordered_json summary;
  summary["epochs_run"] = result.history.size();
  summary["best_epoch"] = result.best_epoch;
  summary["best_val_srocc"] = result.best_val_srocc;
  summary["target_lo"] = result.target_lo;
  summary["target_hi"] = result.target_hi;
  summary["checkpoint"] = ckpt;
  summary["history"] = realm::join_path(o.out, "history.jsonl");
  write_json_file(realm::join_path(o.out, "train_result.json"), summary);

  std::cout << "trained " << result.history.size() << " epoch(s)";
  if (std::isfinite(result.best_val_srocc))
    std::cout << ", best val srocc " << result.best_val_srocc << " at epoch "
              << result.best_epoch;
  std::cout << "\nsaved " << ckpt << '\n';
  return 0;
}

// --- ablate ---

int run_ablate(const TrainCliOpts& o) {
  auto tc = resolve_train_config(o);  // o.mode stays empty: each run sets its own
  auto mc = resolve_model_config(o.model_config);
  auto [train_records, val_records] = resolve_data(o.data, tc.seed);
  if (val_records.empty())
    throw realm::ConfigError("ablate needs a validation side: pass --split or --val-fraction");

  ensure_dir(o.out);
  write_run_manifest(realm::join_path(o.out, "run.json"), "ablate", train_opts_json(o, tc, mc));

  auto train_set = realm::core::load_samples(train_records, o.data.image_root);
  auto val_set = realm::core::load_samples(val_records, o.data.image_root);

  const realm::core::AblationMode modes[] = {realm::core::AblationMode::kJoint,
                                             realm::core::AblationMode::kImageOnly,
                                             realm::core::AblationMode::kTextOnly};
  ordered_json comparison = ordered_json::array();
  std::vector<realm::metrics::EvalReport> reports;

  for (auto mode : modes) {
    const std::string name = realm::core::ablation_name(mode);
    realm::core::TrainConfig mode_tc = tc;
    mode_tc.mode = name;

    auto model = realm::core::FusionRegressor::build(mc);
    HistoryWriter history(realm::join_path(o.out, "history_" + name + ".jsonl"));
    auto result = realm::core::train(model, train_set, val_set, mode_tc,
                                     [&](const realm::core::EpochStats& e) {
                                       history.append(e);
                                       if (o.verbosity > 0) print_epoch(e, mode_tc.epochs);
                                     });
    realm::core::save_checkpoint(realm::join_path(o.out, "model_" + name + ".rlmc"), model);

    auto predictions = realm::core::predict_samples(model, val_set, mode);
    std::size_t at = 0;
    auto report = realm::metrics::evaluate(
        val_records, [&](const realm::dataset::RealnessRecord&) { return predictions[at++]; },
        name);
    realm::metrics::save_report(realm::join_path(o.out, "report_" + name + ".jsonl"), report);

    reports.push_back(report);
    ordered_json row;
    row["mode"] = name;
    row["n"] = report.n;
    row["srocc"] = report.srocc;
    row["plcc"] = report.plcc;
    row["best_epoch"] = result.best_epoch;
    comparison.push_back(std::move(row));
  }

  ordered_json cmp;
  cmp["modes"] = std::move(comparison);
  write_json_file(realm::join_path(o.out, "ablation.json"), cmp);
  std::cout << realm::metrics::format_summary(reports);
  std::cout << "saved " << realm::join_path(o.out, "ablation.json") << '\n';
  return 0;
}

// --- eval ---

struct EvalOpts {
  DataOpts data;
  std::string checkpoint;
  std::string side = "test";  // which side of the split file to score
  std::string mode = "joint";
  std::string split_name;
  std::string out;
};

int run_eval(const EvalOpts& o) {
  auto model = realm::core::load_checkpoint(o.checkpoint);
  auto mode = realm::core::ablation_from_name(o.mode);

  std::vector<realm::dataset::RealnessRecord> records;
  if (!o.data.split_file.empty()) {
    auto manifest = realm::dataset::load_manifest(o.data.manifest);
    auto split = realm::dataset::split_from_id_file(manifest, o.data.split_file);
    if (o.side == "test")
      records = std::move(split.second);
    else if (o.side == "train")
      records = std::move(split.first);
    else
      throw realm::ConfigError("unknown split side: " + o.side + " (train, test)");
  } else {
    records = realm::dataset::load_manifest(o.data.manifest).records;
  }

  auto samples = realm::core::load_samples(records, o.data.image_root);
  auto predictions = realm::core::predict_samples(model, samples, mode);

  std::string split_name = o.split_name;
  if (split_name.empty())
    split_name = o.data.split_file.empty() ? "full" : o.side;

  std::size_t at = 0;
  auto report = realm::metrics::evaluate(
      records, [&](const realm::dataset::RealnessRecord&) { return predictions[at++]; },
      split_name);

  ensure_dir(o.out);
  const std::string report_path = realm::join_path(o.out, "report.jsonl");
  realm::metrics::save_report(report_path, report);
  std::cout << realm::metrics::format_summary({report});
  std::cout << "saved " << report_path << '\n';

  ordered_json resolved;
  resolved["manifest"] = o.data.manifest;
  resolved["image_root"] = o.data.image_root;
  if (!o.data.split_file.empty()) {
    resolved["split_file"] = o.data.split_file;
    resolved["side"] = o.side;
  }
  resolved["checkpoint"] = o.checkpoint;
  resolved["mode"] = o.mode;
  resolved["split_name"] = split_name;
  resolved["n"] = report.n;
  resolved["srocc"] = report.srocc;
  resolved["plcc"] = report.plcc;
  resolved["out"] = o.out;
  write_run_manifest(realm::join_path(o.out, "run.json"), "eval", std::move(resolved));
  return 0;
}

// --- map ---

struct MapOpts {
  std::string image;
  std::string text;
  std::string manifest;
  std::string image_root;
  std::string backend_config;
  std::vector<int> windows = {128, 64, 32};
  int stride = 4;
  std::string fusion = "max";
  int threads = 1;
  double blend = 0.35;
  std::string out;
};

/// Computes the map for one image and writes the grid + heatmap pair.
void map_one(const std::string& image_path, const std::string& text, const std::string& stem,
             const realm::EmbeddingBackend& backend, const realm::dream::DreamConfig& config,
             double blend, const std::string& out_dir) {
  auto image = realm::load_image(image_path);
  auto map = realm::dream::compute_realness_map(image, text, backend, config);

  auto grid = realm::dream::grid_file_from(map, realm::dream::GridFile::Kind::kFinal);
  realm::dream::save_grid(realm::join_path(out_dir, stem + ".rlmg"), grid);

  realm::dream::HeatmapOptions hm;
  hm.image_blend = blend;
  auto heat = realm::dream::render_heatmap(map, image, hm);
  realm::save_image(realm::join_path(out_dir, stem + "_heatmap.png"), heat);
}

int run_map(const MapOpts& o) {
  const bool single = !o.image.empty();
  if (single == !o.manifest.empty())
    throw realm::ConfigError("map needs either --image with --text, or --manifest");
  if (single && o.text.empty())
    throw realm::ConfigError("map --image needs a --text description");

  realm::backends::BackendConfig bc;
  if (!o.backend_config.empty())
    bc = realm::backends::backend_config_from_json(load_json_file(o.backend_config));
  auto backend = realm::backends::make_backend(bc);

  realm::dream::DreamConfig dc;
  dc.windows = o.windows;
  dc.stride = o.stride;
  dc.fusion = realm::dream::fusion_from_name(o.fusion);
  dc.threads = o.threads;
  dc.validate();
  if (o.blend < 0.0 || o.blend > 1.0)
    throw realm::ConfigError("blend must be within [0, 1]");

  ensure_dir(o.out);
  ordered_json resolved;
  resolved["backend"] = realm::backends::backend_config_to_json(bc);
  resolved["windows"] = o.windows;
  resolved["stride"] = o.stride;
  resolved["fusion"] = o.fusion;
  resolved["threads"] = o.threads;
  resolved["blend"] = o.blend;
  resolved["out"] = o.out;

  if (single) {
    resolved["image"] = o.image;
    resolved["text"] = o.text;
    write_run_manifest(realm::join_path(o.out, "run.json"), "map", std::move(resolved));
    std::string stem = sanitize_stem(std::filesystem::path(o.image).stem().string());
    map_one(o.image, o.text, stem, *backend, dc, o.blend, o.out);
    std::cout << "wrote " << realm::join_path(o.out, stem + ".rlmg") << " and "
              << realm::join_path(o.out, stem + "_heatmap.png") << '\n';
    return 0;
  }

  auto manifest = realm::dataset::load_manifest(o.manifest);
  resolved["manifest"] = o.manifest;
  resolved["image_root"] = o.image_root;
  resolved["records"] = manifest.records.size();
  write_run_manifest(realm::join_path(o.out, "run.json"), "map", std::move(resolved));

  std::vector<std::pair<std::string, std::string>> failures;
  int mapped = 0;
  for (const auto& r : manifest.records) {
    if (r.description.empty()) {
      failures.emplace_back(r.id, "no description to embed");
      continue;
    }
    try {
      map_one(realm::join_path(o.image_root, r.image_ref), r.description, sanitize_stem(r.id),
              *backend, dc, o.blend, o.out);
      ++mapped;
    } catch (const realm::Error& e) {
      failures.emplace_back(r.id, e.what());
    }
  }

  std::cout << mapped << " mapped, " << failures.size() << " failed\n";
  for (const auto& [id, reason] : failures) std::cout << "  failed " << id << ": " << reason << '\n';
  return failures.empty() ? 0 : 4;
}

// --- plot ---

struct PlotOpts {
  std::vector<std::string> reports;
  std::string out;
  std::string title;
  int width = 640;
  int height = 640;
  bool no_identity = false;
};

int run_plot(const PlotOpts& o) {
  std::vector<realm::plot::Series> series;
  for (const auto& path : o.reports)
    series.push_back(realm::plot::series_from_report(realm::metrics::load_report(path)));

  realm::plot::ScatterOptions opts;
  opts.width = o.width;
  opts.height = o.height;
  opts.identity_line = !o.no_identity;
  opts.title = o.title;
  auto image = realm::plot::render_scatter(series, opts);

  ensure_parent_dir(o.out);
  realm::save_image(o.out, image);
  std::cout << "wrote " << o.out << '\n';

  ordered_json resolved;
  resolved["reports"] = o.reports;
  resolved["out"] = o.out;
  resolved["title"] = o.title;
  resolved["width"] = o.width;
  resolved["height"] = o.height;
  resolved["identity_line"] = opts.identity_line;
  write_run_manifest(o.out + ".run.json", "plot", std::move(resolved));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"realness assessment toolkit: annotation, training, evaluation, dense maps"};
  app.require_subcommand(1);
  int verbosity = 0;
  app.add_flag("-v,--verbose", verbosity, "more progress output");

  // dataset
  auto* ds = app.add_subcommand("dataset", "manifest validation and split generation");
  ds->require_subcommand(1);
  ds->fallthrough();

  ValidateOpts vo;
  auto* ds_validate = ds->add_subcommand("validate", "check manifest records for violations");
  ds_validate->fallthrough();
  ds_validate->add_option("--manifest", vo.manifest, "line-delimited record manifest")
      ->required();
  ds_validate->add_option("--image-root", vo.image_root, "base directory for image refs");
  ds_validate->add_flag("--check-images", vo.check_images, "verify image refs resolve");
  ds_validate->add_option("--out", vo.out, "directory for validation.json (default: print only)");

  SplitOpts so;
  auto* ds_split = ds->add_subcommand("split", "write seed-deterministic split files");
  ds_split->fallthrough();
  ds_split->add_option("--manifest", so.manifest, "line-delimited record manifest")->required();
  ds_split->add_option("--scheme", so.scheme, "holdout or kfold (default holdout)");
  ds_split->add_option("--test-count", so.test_count, "test records (holdout) or per-fold size");
  ds_split->add_option("--train-fraction", so.train_fraction,
                       "holdout train share when --test-count is unset (default 0.85)");
  ds_split->add_option("--folds", so.folds, "fold count for kfold (default 5)");
  ds_split->add_option("--seed", so.seed, "shuffle seed (default 0)");
  ds_split->add_option("--out", so.out, "directory for split files")->required();

  // annotate
  AnnotateOpts ao;
  auto* an = app.add_subcommand("annotate", "fill manifest verdicts/descriptions via a provider");
  an->fallthrough();
  an->add_option("--manifest", ao.manifest, "manifest to annotate")->required();
  an->add_option("--image-root", ao.image_root, "base directory for image refs");
  an->add_option("--provider", ao.provider, "stub or http (overrides --provider-config)");
  an->add_option("--provider-config", ao.provider_config, "provider settings JSON");
  an->add_option("--cache", ao.cache_dir, "response cache directory");
  an->add_option("--concurrency", ao.concurrency, "parallel requests (default 1)");
  an->add_flag("--force", ao.force, "re-annotate records that already carry a verdict");
  an->add_option("--out", ao.out, "output manifest (default: in place)");

  // train
  TrainCliOpts to;
  auto* tr = app.add_subcommand("train", "fit the fusion regressor on a manifest");
  tr->fallthrough();
  tr->add_option("--manifest", to.data.manifest, "training manifest")->required();
  tr->add_option("--image-root", to.data.image_root, "base directory for image refs");
  tr->add_option("--split", to.data.split_file, "id-list split file; test side is validation");
  tr->add_option("--val-fraction", to.data.val_fraction,
                 "carve a validation side when no --split is given (default 0)");
  tr->add_option("--train-config", to.train_config, "training settings JSON");
  tr->add_option("--model-config", to.model_config, "model architecture JSON");
  tr->add_option("--mode", to.mode, "joint, image_only, or text_only");
  tr->add_option("--seed", to.seed, "training seed override");
  tr->add_option("--epochs", to.epochs, "epoch count override");
  tr->add_option("--lr", to.learning_rate, "learning rate override");
  tr->add_option("--batch", to.batch_size, "batch size override");
  tr->add_option("--out", to.out, "output directory")->required();

  // ablate
  TrainCliOpts bo;
  auto* ab = app.add_subcommand("ablate",
                                "train joint, image-only, and text-only variants and compare");
  ab->fallthrough();
  ab->add_option("--manifest", bo.data.manifest, "training manifest")->required();
  ab->add_option("--image-root", bo.data.image_root, "base directory for image refs");
  ab->add_option("--split", bo.data.split_file, "id-list split file; test side is validation");
  ab->add_option("--val-fraction", bo.data.val_fraction,
                 "carve a validation side when no --split is given (default 0)");
  ab->add_option("--train-config", bo.train_config, "training settings JSON");
  ab->add_option("--model-config", bo.model_config, "model architecture JSON");
  ab->add_option("--seed", bo.seed, "training seed override");
  ab->add_option("--epochs", bo.epochs, "epoch count override");
  ab->add_option("--lr", bo.learning_rate, "learning rate override");
  ab->add_option("--batch", bo.batch_size, "batch size override");
  ab->add_option("--out", bo.out, "output directory")->required();

  // eval
  EvalOpts eo;
  auto* ev = app.add_subcommand("eval", "score a checkpoint against manifest targets");
  ev->fallthrough();
  ev->add_option("--manifest", eo.data.manifest, "evaluation manifest")->required();
  ev->add_option("--image-root", eo.data.image_root, "base directory for image refs");
  ev->add_option("--checkpoint", eo.checkpoint, "model checkpoint")->required();
  ev->add_option("--split", eo.data.split_file, "id-list split file");
  ev->add_option("--side", eo.side, "train or test side of --split (default test)");
  ev->add_option("--mode", eo.mode, "joint, image_only, or text_only (default joint)");
  ev->add_option("--split-name", eo.split_name, "label for the report");
  ev->add_option("--out", eo.out, "output directory")->required();

  // map
  MapOpts mo;
  auto* mp = app.add_subcommand("map", "dense realness grid + heatmap per image");
  mp->fallthrough();
  mp->add_option("--image", mo.image, "single image to map (needs --text)");
  mp->add_option("--text", mo.text, "description to score the image against");
  mp->add_option("--manifest", mo.manifest, "map every described record in a manifest");
  mp->add_option("--image-root", mo.image_root, "base directory for image refs");
  mp->add_option("--backend-config", mo.backend_config, "embedding backend JSON");
  mp->add_option("--windows", mo.windows, "square window sizes (default 128,64,32)")
      ->delimiter(',');
  mp->add_option("--stride", mo.stride, "patch stride in pixels (default 4)");
  mp->add_option("--fusion", mo.fusion, "cross-scale fusion: max or min (default max)");
  mp->add_option("--threads", mo.threads, "worker threads (default 1)");
  mp->add_option("--blend", mo.blend, "image share in the heatmap, 0..1 (default 0.35)");
  mp->add_option("--out", mo.out, "output directory")->required();

  // plot
  PlotOpts po;
  auto* pl = app.add_subcommand("plot", "scatter MOS against predictions from eval reports");
  pl->fallthrough();
  pl->add_option("--report", po.reports, "eval report (repeat to overlay)")->required();
  pl->add_option("--out", po.out, "output image file")->required();
  pl->add_option("--title", po.title, "plot title");
  pl->add_option("--width", po.width, "canvas width (default 640)");
  pl->add_option("--height", po.height, "canvas height (default 640)");
  pl->add_flag("--no-identity", po.no_identity, "suppress the y=x reference line");

  try {
    app.parse(argc, argv);
    to.verbosity = verbosity;
    bo.verbosity = verbosity;

    if (*ds_validate) return run_dataset_validate(vo);
    if (*ds_split) return run_dataset_split(so);
    if (*an) return run_annotate(ao);
    if (*tr) return run_train(to);
    if (*ab) return run_ablate(bo);
    if (*ev) return run_eval(eo);
    if (*mp) return run_map(mo);
    if (*pl) return run_plot(po);
    return 0;
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  } catch (const realm::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const realm::InvalidInputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const realm::DataError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  } catch (const realm::ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  } catch (const realm::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
