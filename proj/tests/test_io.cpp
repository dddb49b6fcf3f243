#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "vigil/csv.hpp"
#include "vigil/model_json.hpp"
#include "vigil/synthetic.hpp"

using vigil::FeatureRow;
using vigil::Rng;
using vigil::VigilanceState;
using vigil::WindowedSample;

namespace {

namespace fs = std::filesystem;

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("vigil_test_" + std::to_string(std::rand()) + "_" +
            std::to_string(reinterpret_cast<std::uintptr_t>(this)));
    fs::create_directories(path);
  }
  ~TempDir() { std::error_code ec; fs::remove_all(path, ec); }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

std::vector<FeatureRow> random_rows(Rng& rng, std::size_t n) {
  std::vector<FeatureRow> rows(n);
  for (auto& row : rows) {
    for (double& v : row.values) v = rng.normal() * std::exp(10.0 * (rng.uniform() - 0.5));
    const auto pick = rng.index(4);
    if (pick < 3) row.label = vigil::state_from_index(static_cast<int>(pick));
  }
  return rows;
}

}  // namespace

TEST_CASE("feature CSV round-trips bit-exactly", "[io]") {
  TempDir dir;
  Rng rng(99);
  const auto rows = random_rows(rng, 1000);
  const std::string path = dir.file("features.csv");
  vigil::write_feature_csv(path, rows);
  const auto loaded = vigil::read_feature_csv(path);
  REQUIRE(loaded.size() == rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    REQUIRE(loaded[i].values == rows[i].values);
    REQUIRE(loaded[i].label == rows[i].label);
  }
}

TEST_CASE("feature CSV schema violations are named", "[io][errors]") {
  TempDir dir;

  SECTION("missing band column") {
    const std::string path = dir.file("short.csv");
    std::ofstream out(path);
    const auto header = vigil::feature_csv_header();
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (header[i] == "eeg_95_100") continue;  // drop one band column
      if (i) out << ',';
      out << header[i];
    }
    out << "\n";
    out.close();
    REQUIRE_THROWS_WITH(vigil::read_feature_csv(path),
                        Catch::Matchers::ContainsSubstring("eeg_95_100"));
  }

  SECTION("unknown label cites its row") {
    const std::string path = dir.file("badlabel.csv");
    Rng rng(7);
    auto rows = random_rows(rng, 10);
    for (auto& row : rows) row.label = VigilanceState::SlowWave;
    vigil::write_feature_csv(path, rows);
    // Corrupt row 7's label.
    std::ifstream in(path);
    std::string content((std::istreambuf_iterator<char>(in)), {});
    in.close();
    std::size_t pos = 0;
    for (int line = 0; line < 7; ++line) pos = content.find('\n', pos) + 1;
    const std::size_t line_end = content.find('\n', pos);
    content[line_end - 1] = 'R';
    std::ofstream(path) << content;
    REQUIRE_THROWS_WITH(vigil::read_feature_csv(path),
                        Catch::Matchers::ContainsSubstring("row 7") &&
                            Catch::Matchers::ContainsSubstring("R"));
  }

  SECTION("unparseable number cites row and column") {
    const std::string path = dir.file("badnum.csv");
    std::ofstream out(path);
    const auto header = vigil::feature_csv_header();
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (i) out << ',';
      out << header[i];
    }
    out << "\n";
    out << "oops";
    for (int i = 1; i < 42; ++i) out << ",0";
    out << ",P\n";
    out.close();
    REQUIRE_THROWS_WITH(vigil::read_feature_csv(path),
                        Catch::Matchers::ContainsSubstring("row 1") &&
                            Catch::Matchers::ContainsSubstring("eeg_00_05"));
  }
}

TEST_CASE("windowed CSV round-trips and tolerates missing labels", "[io]") {
  TempDir dir;
  Rng rng(41);
  std::vector<WindowedSample> samples;
  for (int i = 0; i < 50; ++i) {
    std::vector<double> features(210);
    for (double& v : features) v = rng.normal();
    samples.push_back({features, vigil::state_from_index(i % 3)});
  }
  const std::string path = dir.file("windowed.csv");
  vigil::write_windowed_csv(path, samples);
  const auto records = vigil::read_windowed_csv(path);
  REQUIRE(records.size() == samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    REQUIRE(records[i].features == samples[i].features);
    REQUIRE(records[i].label == samples[i].label);
  }
  const auto relabeled = vigil::require_labeled(records);
  REQUIRE(relabeled.size() == samples.size());

  SECTION("empty label field reads as unlabeled and require_labeled names it") {
    std::ifstream in(path);
    std::string content((std::istreambuf_iterator<char>(in)), {});
    in.close();
    const std::size_t first_row = content.find('\n') + 1;
    const std::size_t second_row = content.find('\n', first_row);
    content.erase(second_row - 1, 1);  // drop the first data row's label char
    std::ofstream(path) << content;
    const auto patched = vigil::read_windowed_csv(path);
    REQUIRE_FALSE(patched[0].label.has_value());
    REQUIRE_THROWS_WITH(vigil::require_labeled(patched),
                        Catch::Matchers::ContainsSubstring("row 1"));
  }
}

TEST_CASE("signal, activity, and label CSV round-trips", "[io]") {
  TempDir dir;
  Rng rng(17);
  std::vector<double> eeg(500), emg(500);
  for (std::size_t i = 0; i < eeg.size(); ++i) {
    eeg[i] = rng.normal();
    emg[i] = rng.normal();
  }
  const std::string signals = dir.file("signals.csv");
  vigil::write_signals_csv(signals, eeg, emg);
  const auto [eeg2, emg2] = vigil::read_signals_csv(signals);
  REQUIRE(eeg2 == eeg);
  REQUIRE(emg2 == emg);

  std::vector<double> activity = {0.0, 1.5, 300.25};
  const std::string act = dir.file("activity.csv");
  vigil::write_activity_csv(act, activity);
  REQUIRE(vigil::read_activity_csv(act) == activity);

  std::vector<VigilanceState> labels = {VigilanceState::Wake, VigilanceState::SlowWave,
                                        VigilanceState::Paradoxical};
  const std::string lab = dir.file("labels.csv");
  vigil::write_labels_csv(lab, labels);
  REQUIRE(vigil::read_labels_csv(lab) == labels);
}

TEST_CASE("split manifest round-trips", "[io]") {
  TempDir dir;
  vigil::DataSplit split_result;
  split_result.seed = 4242;
  split_result.test_fraction = 0.2;
  split_result.validation_fraction_of_train = 0.25;
  split_result.train_indices = {5, 3, 9};
  split_result.validation_indices = {1};
  split_result.test_indices = {0, 2};
  const std::string path = dir.file("manifest.txt");
  vigil::write_split_manifest(path, split_result, "fnv1a64:0011223344556677");

  const auto manifest = vigil::read_split_manifest(path);
  REQUIRE(manifest.seed == 4242);
  REQUIRE(manifest.test_fraction == 0.2);
  REQUIRE(manifest.validation_fraction_of_train == 0.25);
  REQUIRE(manifest.input_digest == "fnv1a64:0011223344556677");
  REQUIRE(manifest.train_indices == split_result.train_indices);
  REQUIRE(manifest.validation_indices == split_result.validation_indices);
  REQUIRE(manifest.test_indices == split_result.test_indices);
}

TEST_CASE("file digest is stable and content-sensitive", "[io]") {
  TempDir dir;
  const std::string path = dir.file("blob.bin");
  std::ofstream(path) << "some bytes";
  const std::string digest = vigil::digest_file(path);
  REQUIRE(digest.rfind("fnv1a64:", 0) == 0);
  REQUIRE(digest == vigil::digest_file(path));
  std::ofstream(path) << "other bytes";
  REQUIRE(digest != vigil::digest_file(path));
}

TEST_CASE("saved models reload with bit-identical predictions", "[io][model]") {
  TempDir dir;
  vigil::SyntheticSpec spec;
  spec.epochs_per_class = 60;
  spec.seed = 10;
  spec.separability = 0.8;
  const auto rows = vigil::generate_features(spec);
  const auto windowed = vigil::window(rows);
  const auto split_result = vigil::split(windowed, 1, 0.25, 0.2);

  std::vector<std::unique_ptr<vigil::Classifier>> models;
  {
    vigil::TreeParams tree_params;
    tree_params.max_depth = 8;
    models.push_back(std::make_unique<vigil::DecisionTreeClassifier>(tree_params));
    vigil::ForestParams forest_params;
    forest_params.n_trees = 5;
    forest_params.seed = 3;
    models.push_back(std::make_unique<vigil::RandomForestClassifier>(forest_params));
    models.push_back(std::make_unique<vigil::NaiveBayesClassifier>());
    vigil::LogRegParams logreg_params;
    logreg_params.epochs = 20;
    models.push_back(std::make_unique<vigil::LogisticRegressionClassifier>(logreg_params));
    vigil::MlpParams mlp_params;
    mlp_params.hidden_units = 16;
    mlp_params.epochs = 3;
    mlp_params.seed = 5;
    models.push_back(std::make_unique<vigil::MlpClassifier>(mlp_params));
  }

  for (auto& model : models) {
    model->fit(split_result.train, split_result.validation);
    const std::string path = dir.file("model_" + model->kind() + ".json");
    vigil::TrainingMeta meta;
    meta.seed = 3;
    vigil::save_model(*model, path, meta);
    const auto loaded = vigil::load_model(path);
    REQUIRE(loaded->kind() == model->kind());
    for (const auto& sample : split_result.test) {
      const auto a = model->predict_proba(sample.features);
      const auto b = loaded->predict_proba(sample.features);
      REQUIRE(a == b);  // bitwise
    }
  }
}

TEST_CASE("model loader rejects junk", "[io][model][errors]") {
  TempDir dir;
  const std::string path = dir.file("bad.json");
  std::ofstream(path) << "{ not json";
  REQUIRE_THROWS_AS(vigil::load_model(path), vigil::SchemaError);
  std::ofstream(path) << R"({"format_version": 999, "model_kind": "decision_tree", "params": {}, "scaler": null})";
  REQUIRE_THROWS_AS(vigil::load_model(path), vigil::SchemaError);
  std::ofstream(path) << R"({"format_version": 1, "model_kind": "quantum", "params": {}, "scaler": null})";
  REQUIRE_THROWS_AS(vigil::load_model(path), vigil::SchemaError);
}
