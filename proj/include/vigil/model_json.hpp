#pragma once

#include <ctime>
#include <fstream>
#include <memory>
#include <optional>
#include <string>

#include "vigil/decision_tree.hpp"
#include "vigil/logistic_regression.hpp"
#include "vigil/mlp.hpp"
#include "vigil/model.hpp"
#include "vigil/naive_bayes.hpp"
#include "vigil/random_forest.hpp"

#include <json.hpp>

namespace vigil {

inline constexpr int kModelFormatVersion = 1;

struct TrainingMeta {
  std::uint64_t seed = 0;
  std::optional<int> epochs;
};

namespace detail {

inline std::string utc_timestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buffer[32];
  std::strftime(buffer, sizeof(buffer), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buffer;
}

}  // namespace detail

// Versioned JSON model document; `load_model` + predict reproduces the saved
// model's predictions bit for bit (doubles survive the JSON round trip).
inline void save_model(const Classifier& model, const std::string& path,
                       const TrainingMeta& meta = {}) {
  nlohmann::json doc;
  doc["format_version"] = kModelFormatVersion;
  doc["model_kind"] = model.kind();
  if (const FeatureScaler* scaler = model.scaler()) {
    doc["scaler"] = {{"mean", scaler->mean}, {"stddev", scaler->stddev}};
  } else {
    doc["scaler"] = nullptr;
  }
  doc["params"] = model.params_to_json();
  nlohmann::json training;
  training["seed"] = meta.seed;
  if (meta.epochs) training["epochs"] = *meta.epochs;
  else training["epochs"] = nullptr;
  training["timestamp"] = detail::utc_timestamp();
  doc["training"] = std::move(training);

  std::ofstream out(path);
  if (!out) throw SchemaError("cannot write model file: " + path);
  out << doc.dump(2) << '\n';
  if (!out) throw SchemaError("write failed: " + path);
}

inline std::unique_ptr<Classifier> make_classifier(const std::string& kind) {
  if (kind == "decision_tree") return std::make_unique<DecisionTreeClassifier>();
  if (kind == "random_forest") return std::make_unique<RandomForestClassifier>();
  if (kind == "gaussian_nb") return std::make_unique<NaiveBayesClassifier>();
  if (kind == "logistic_regression") return std::make_unique<LogisticRegressionClassifier>();
  if (kind == "mlp") return std::make_unique<MlpClassifier>();
  throw SchemaError("unknown model kind \"" + kind + "\"");
}

inline std::unique_ptr<Classifier> load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError("cannot open model file: " + path);
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(path + ": invalid JSON: " + e.what());
  }
  try {
    const int version = doc.at("format_version").get<int>();
    if (version != kModelFormatVersion) {
      throw SchemaError(path + ": unsupported format_version " + std::to_string(version));
    }
    auto model = make_classifier(doc.at("model_kind").get<std::string>());
    model->params_from_json(doc.at("params"));
    if (!doc.at("scaler").is_null()) {
      FeatureScaler scaler;
      scaler.mean = doc.at("scaler").at("mean").get<std::vector<double>>();
      scaler.stddev = doc.at("scaler").at("stddev").get<std::vector<double>>();
      if (auto* logreg = dynamic_cast<LogisticRegressionClassifier*>(model.get())) {
        logreg->set_scaler(std::move(scaler));
      } else if (auto* mlp = dynamic_cast<MlpClassifier*>(model.get())) {
        mlp->set_scaler(std::move(scaler));
      }
    }
    return model;
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(path + ": malformed model document: " + e.what());
  }
}

}  // namespace vigil
