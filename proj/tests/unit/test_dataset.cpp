#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <catch2/catch_amalgamated.hpp>

#include "realm/dataset.hpp"

using namespace realm;
using namespace realm::dataset;

namespace {

std::filesystem::path temp_dir() {
  auto dir = std::filesystem::temp_directory_path() / "realm_dataset_test";
  std::filesystem::create_directories(dir);
  return dir;
}

DatasetManifest make_manifest(std::size_t n, Source source = Source::kRaise) {
  DatasetManifest m;
  m.provenance = "unit-test";
  for (std::size_t i = 0; i < n; ++i) {
    RealnessRecord r;
    r.id = "img-" + std::to_string(1000 + i);
    r.image_ref = "images/" + r.id + ".png";
    r.mos = double(i % 100) / 100.0;
    r.verdict = i % 3 == 0 ? Verdict::kYes : (i % 3 == 1 ? Verdict::kNo : Verdict::kSomewhat);
    r.description = i % 3 == 1 ? "" : "sample inconsistency " + std::to_string(i);
    r.source = source;
    m.records.push_back(std::move(r));
  }
  return m;
}

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::set<std::string> ids_of(const std::vector<RealnessRecord>& records) {
  std::set<std::string> out;
  for (const auto& r : records) out.insert(r.id);
  return out;
}

}  // namespace

TEST_CASE("verdict and source names round-trip; junk is rejected") {
  for (auto v : {Verdict::kYes, Verdict::kNo, Verdict::kSomewhat, Verdict::kUnknown})
    CHECK(verdict_from_name(verdict_name(v)) == v);
  for (auto s : {Source::kRaise, Source::kAgin, Source::kSynthetic, Source::kOther})
    CHECK(source_from_name(source_name(s)) == s);
  CHECK_THROWS_AS(verdict_from_name("maybe"), DataError);
  CHECK_THROWS_AS(source_from_name("imagenet"), DataError);
}

TEST_CASE("record validation lists each violation") {
  RealnessRecord good{"id1", "img.png", 0.5, Verdict::kYes, "desc", Source::kRaise};
  CHECK(validate_record(good).empty());

  RealnessRecord bad;
  bad.mos = std::nan("");
  auto v = validate_record(bad);
  REQUIRE(v.size() == 3);  // empty id, empty image_ref, non-finite mos

  RealnessRecord missing{"id2", "/definitely/not/here.png", 0.5, Verdict::kNo, "", Source::kRaise};
  CHECK(validate_record(missing).empty());
  CHECK(validate_record(missing, /*check_image_refs=*/true).size() == 1);
}

TEST_CASE("manifest save -> load -> save is byte-identical") {
  auto m = make_manifest(25);
  auto p1 = temp_dir() / "m1.jsonl";
  auto p2 = temp_dir() / "m2.jsonl";
  save_manifest(p1.string(), m);
  auto loaded = load_manifest(p1.string());
  CHECK(loaded.records == m.records);
  CHECK(loaded.provenance == "unit-test");
  save_manifest(p2.string(), loaded);
  CHECK(read_file(p1) == read_file(p2));
  std::filesystem::remove(p1);
  std::filesystem::remove(p2);
}

TEST_CASE("manifest loader reports every bad line with its number") {
  auto p = temp_dir() / "broken.jsonl";
  {
    std::ofstream out(p);
    out << R"({"id":"a","image_ref":"a.png","mos":0.5})" << "\n";
    out << "this is not json\n";
    out << R"({"id":"b","image_ref":"b.png"})" << "\n";          // missing mos
    out << R"({"id":"a","image_ref":"c.png","mos":0.1})" << "\n";  // duplicate id
  }
  try {
    load_manifest(p.string());
    FAIL("expected DataError");
  } catch (const DataError& e) {
    std::string msg = e.what();
    CHECK(msg.find("3 schema error(s)") != std::string::npos);
    CHECK(msg.find("line 2") != std::string::npos);
    CHECK(msg.find("line 3") != std::string::npos);
    CHECK(msg.find("duplicate id 'a'") != std::string::npos);
  }
  std::filesystem::remove(p);
}

TEST_CASE("manifest loader accepts a header line and blank lines") {
  auto p = temp_dir() / "header.jsonl";
  {
    std::ofstream out(p);
    out << R"({"schema_version":1,"provenance":"curated-2025"})" << "\n\n";
    out << R"({"id":"a","image_ref":"a.png","mos":0.5,"verdict":"yes","description":"d","source":"raise"})"
        << "\n";
  }
  auto m = load_manifest(p.string());
  CHECK(m.provenance == "curated-2025");
  REQUIRE(m.records.size() == 1);
  CHECK(m.records[0].verdict == Verdict::kYes);

  // Optional fields default instead of failing.
  {
    std::ofstream out(p);
    out << R"({"id":"a","image_ref":"a.png","mos":0.25})" << "\n";
  }
  auto minimal = load_manifest(p.string());
  CHECK(minimal.records[0].verdict == Verdict::kUnknown);
  CHECK(minimal.records[0].source == Source::kOther);
  CHECK_FALSE(minimal.records[0].annotated());
  std::filesystem::remove(p);
}

TEST_CASE("empty or missing manifests are errors") {
  auto p = temp_dir() / "empty.jsonl";
  {
    std::ofstream out(p);
    out << R"({"schema_version":1,"provenance":""})" << "\n";
  }
  CHECK_THROWS_AS(load_manifest(p.string()), InvalidInputError);
  CHECK_THROWS_AS(load_manifest((temp_dir() / "nope.jsonl").string()), DataError);
  DatasetManifest empty;
  CHECK_THROWS_AS(save_manifest(p.string(), empty), InvalidInputError);
  std::filesystem::remove(p);
}

TEST_CASE("holdout split: 600 records -> 510 train / 90 test") {
  auto m = make_manifest(600);
  SplitSpec spec;
  spec.kind = SplitKind::kHoldout;
  spec.test_count = 90;
  spec.seed = 7;
  auto [train, test] = split_holdout(m, spec);
  CHECK(train.size() == 510);
  CHECK(test.size() == 90);

  // Disjoint and exhaustive.
  auto train_ids = ids_of(train);
  auto test_ids = ids_of(test);
  CHECK(train_ids.size() == 510);
  CHECK(test_ids.size() == 90);
  for (const auto& id : test_ids) CHECK(train_ids.count(id) == 0);

  // Deterministic in the seed; different seeds give different partitions.
  auto [train2, test2] = split_holdout(m, spec);
  CHECK(train2 == train);
  CHECK(test2 == test);
  spec.seed = 8;
  auto [train3, test3] = split_holdout(m, spec);
  CHECK(ids_of(test3) != test_ids);

  // Manifest order is preserved inside each side.
  for (std::size_t i = 1; i < train.size(); ++i) CHECK(train[i - 1].id < train[i].id);
}

TEST_CASE("holdout split rejects degenerate sizes") {
  auto m = make_manifest(10);
  SplitSpec spec;
  spec.test_count = 0;
  CHECK_THROWS_AS(split_holdout(m, spec), InvalidInputError);
  spec.test_count = 10;
  CHECK_THROWS_AS(split_holdout(m, spec), InvalidInputError);
  spec.test_count.reset();
  CHECK_THROWS_AS(split_holdout(m, spec), InvalidInputError);
}

TEST_CASE("k-fold split: test folds partition the manifest") {
  auto m = make_manifest(103);
  SplitSpec spec;
  spec.kind = SplitKind::kKfold;
  spec.k = 5;
  spec.seed = 11;
  auto folds = split_kfold(m, spec);
  REQUIRE(folds.size() == 5);

  // Sizes: 103 = 21+21+21+20+20, remainder on the first folds.
  CHECK(folds[0].second.size() == 21);
  CHECK(folds[1].second.size() == 21);
  CHECK(folds[2].second.size() == 21);
  CHECK(folds[3].second.size() == 20);
  CHECK(folds[4].second.size() == 20);

  std::set<std::string> all_test;
  for (const auto& [train, test] : folds) {
    CHECK(train.size() + test.size() == 103);
    auto train_ids = ids_of(train);
    for (const auto& r : test) {
      CHECK(train_ids.count(r.id) == 0);
      CHECK(all_test.insert(r.id).second);  // disjoint across folds
    }
  }
  CHECK(all_test.size() == 103);  // exhaustive

  // Deterministic in the seed.
  auto again = split_kfold(m, spec);
  for (std::size_t f = 0; f < 5; ++f) {
    CHECK(again[f].first == folds[f].first);
    CHECK(again[f].second == folds[f].second);
  }
}

TEST_CASE("k-fold with a fixed per-fold test size") {
  auto m = make_manifest(20);
  SplitSpec spec;
  spec.kind = SplitKind::kKfold;
  spec.k = 3;
  spec.test_count = 5;
  spec.seed = 3;
  auto folds = split_kfold(m, spec);
  REQUIRE(folds.size() == 3);
  std::set<std::string> all_test;
  for (const auto& [train, test] : folds) {
    CHECK(test.size() == 5);
    CHECK(train.size() == 15);  // complement of this fold's test set
    for (const auto& r : test) CHECK(all_test.insert(r.id).second);
  }
  CHECK(all_test.size() == 15);

  spec.test_count = 7;  // 3*7 > 20
  CHECK_THROWS_AS(split_kfold(m, spec), InvalidInputError);
}

TEST_CASE("k-fold at the published scale: 5439 records, five 605-record folds") {
  auto m = make_manifest(5439, Source::kAgin);
  SplitSpec spec;
  spec.kind = SplitKind::kKfold;
  spec.k = 5;
  spec.test_count = 605;
  spec.seed = 0;
  auto folds = split_kfold(m, spec);
  REQUIRE(folds.size() == 5);
  std::set<std::string> all_test;
  for (const auto& [train, test] : folds) {
    CHECK(train.size() == 4834);
    CHECK(test.size() == 605);
    for (const auto& r : test) CHECK(all_test.insert(r.id).second);
  }
  CHECK(all_test.size() == 5 * 605);
}

TEST_CASE("k-fold parameter validation") {
  auto m = make_manifest(10);
  SplitSpec spec;
  spec.k = 1;
  CHECK_THROWS_AS(split_kfold(m, spec), InvalidInputError);
  spec.k = 11;
  CHECK_THROWS_AS(split_kfold(m, spec), InvalidInputError);
}

TEST_CASE("explicit id-list split reproduces a published partition") {
  auto m = make_manifest(8);
  auto p = temp_dir() / "split.json";
  {
    std::ofstream out(p);
    out << R"({"train":["img-1000","img-1002","img-1004"],"test":["img-1001","img-1003"]})";
  }
  auto [train, test] = split_from_id_file(m, p.string());
  CHECK(ids_of(train) == std::set<std::string>{"img-1000", "img-1002", "img-1004"});
  CHECK(ids_of(test) == std::set<std::string>{"img-1001", "img-1003"});

  {
    std::ofstream out(p);
    out << R"({"train":["img-1000"],"test":["img-1000"]})";
  }
  CHECK_THROWS_AS(split_from_id_file(m, p.string()), DataError);

  {
    std::ofstream out(p);
    out << R"({"train":["zzz"],"test":["img-1001"]})";
  }
  CHECK_THROWS_AS(split_from_id_file(m, p.string()), DataError);

  CHECK_THROWS_AS(split_from_id_file(m, (temp_dir() / "nope.json").string()), DataError);
  std::filesystem::remove(p);
}
