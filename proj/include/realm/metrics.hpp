#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <string>
#include <vector>

#include "realm/error.hpp"

#include "json.hpp"

namespace realm::metrics {

/// Fractional (average-tie) ranks, 1-based.
inline std::vector<double> average_ranks(const std::vector<double>& values) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(n, 0.0);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
    double r = 0.5 * (double(i) + double(j)) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = r;
    i = j + 1;
  }
  return ranks;
}

namespace detail {

inline void check_pair(const std::vector<double>& a, const std::vector<double>& b,
                       const char* op) {
  if (a.size() != b.size())
    throw InvalidInputError(std::string(op) + ": length mismatch (" + std::to_string(a.size()) +
                            " vs " + std::to_string(b.size()) + ")");
  if (a.size() < 2) throw InvalidInputError(std::string(op) + ": need at least 2 samples");
  for (double v : a)
    if (!std::isfinite(v)) throw InvalidInputError(std::string(op) + ": non-finite value");
  for (double v : b)
    if (!std::isfinite(v)) throw InvalidInputError(std::string(op) + ": non-finite value");
}

inline double pearson(const std::vector<double>& a, const std::vector<double>& b,
                      const char* op) {
  const std::size_t n = a.size();
  double mean_a = std::accumulate(a.begin(), a.end(), 0.0) / double(n);
  double mean_b = std::accumulate(b.begin(), b.end(), 0.0) / double(n);
  double cov = 0.0, var_a = 0.0, var_b = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double da = a[i] - mean_a;
    double db = b[i] - mean_b;
    cov += da * db;
    var_a += da * da;
    var_b += db * db;
  }
  if (var_a == 0.0 || var_b == 0.0)
    throw InvalidInputError(std::string(op) + ": correlation undefined for constant input");
  return cov / std::sqrt(var_a * var_b);
}

}  // namespace detail

/// Pearson correlation of raw values.
inline double plcc(const std::vector<double>& predictions, const std::vector<double>& targets) {
  detail::check_pair(predictions, targets, "plcc");
  return detail::pearson(predictions, targets, "plcc");
}

/// Spearman rank-order correlation: Pearson over average-tie ranks.
inline double srocc(const std::vector<double>& predictions, const std::vector<double>& targets) {
  detail::check_pair(predictions, targets, "srocc");
  return detail::pearson(average_ranks(predictions), average_ranks(targets), "srocc");
}

struct EvalSample {
  std::string id;
  double mos = 0.0;
  double prediction = 0.0;
};

struct EvalReport {
  std::string split_name;
  std::size_t n = 0;
  double srocc = 0.0;
  double plcc = 0.0;
  std::vector<EvalSample> samples;
};

/// Runs `predict(record)` over every record and assembles the report.
/// Records must expose .id and .mos.
template <typename Record, typename PredictFn>
EvalReport evaluate(const std::vector<Record>& records, PredictFn&& predict,
                    const std::string& split_name) {
  if (records.empty()) throw InvalidInputError("evaluate: empty record set");
  EvalReport report;
  report.split_name = split_name;
  report.n = records.size();
  std::vector<double> predictions, targets;
  predictions.reserve(records.size());
  targets.reserve(records.size());
  for (const auto& r : records) {
    double p = predict(r);
    report.samples.push_back(EvalSample{r.id, r.mos, p});
    predictions.push_back(p);
    targets.push_back(r.mos);
  }
  report.srocc = srocc(predictions, targets);
  report.plcc = plcc(predictions, targets);
  return report;
}

/// Line-delimited report: one header line, then one record per sample.
inline void save_report(const std::string& path, const EvalReport& report) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot open for writing: " + path);
  nlohmann::ordered_json header;
  header["split"] = report.split_name;
  header["n"] = report.n;
  header["srocc"] = report.srocc;
  header["plcc"] = report.plcc;
  out << header.dump() << "\n";
  for (const auto& s : report.samples) {
    nlohmann::ordered_json row;
    row["id"] = s.id;
    row["mos"] = s.mos;
    row["prediction"] = s.prediction;
    out << row.dump() << "\n";
  }
  if (!out) throw DataError("short write: " + path);
}

inline EvalReport load_report(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open report: " + path);
  std::string line;
  if (!std::getline(in, line)) throw DataError("empty report: " + path);
  EvalReport report;
  try {
    auto header = nlohmann::json::parse(line);
    report.split_name = header.at("split").get<std::string>();
    report.n = header.at("n").get<std::size_t>();
    report.srocc = header.at("srocc").get<double>();
    report.plcc = header.at("plcc").get<double>();
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      auto row = nlohmann::json::parse(line);
      report.samples.push_back(EvalSample{row.at("id").get<std::string>(),
                                          row.at("mos").get<double>(),
                                          row.at("prediction").get<double>()});
    }
  } catch (const nlohmann::json::exception& e) {
    throw DataError("malformed report " + path + ": " + e.what());
  }
  return report;
}

/// Human-readable summary block for one or more reports.
inline std::string format_summary(const std::vector<EvalReport>& reports) {
  std::string out;
  out += "split                            n    SROCC     PLCC\n";
  out += "------------------------------ ---- -------- --------\n";
  char buf[160];
  for (const auto& r : reports) {
    std::snprintf(buf, sizeof(buf), "%-30s %4zu %8.4f %8.4f\n", r.split_name.c_str(), r.n,
                  r.srocc, r.plcc);
    out += buf;
  }
  return out;
}

}  // namespace realm::metrics
