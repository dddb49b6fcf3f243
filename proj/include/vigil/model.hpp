#pragma once

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "vigil/common.hpp"
#include "vigil/dataset.hpp"
#include "vigil/scaler.hpp"

#include <json.hpp>

namespace vigil {

struct TrainingEpochStats {
  int epoch = 0;  // 1-based
  double train_loss = 0.0;
  double train_accuracy = 0.0;
  double train_precision = 0.0;  // macro
  double train_recall = 0.0;     // macro
  double val_loss = 0.0;
  double val_accuracy = 0.0;
  double val_precision = 0.0;
  double val_recall = 0.0;
};

// Unified contract over the five classifier families: fit on windowed samples,
// emit class probabilities, predict by lowest-index argmax.
class Classifier {
 public:
  virtual ~Classifier() = default;

  virtual std::string kind() const = 0;

  // `validation` may be empty; only the MLP consumes it.
  virtual void fit(std::span<const WindowedSample> train,
                   std::span<const WindowedSample> validation = {}) = 0;

  virtual ClassProbabilities predict_proba(std::span<const double> features) const = 0;

  VigilanceState predict(std::span<const double> features) const {
    return predicted_class(predict_proba(features));
  }

  // Standardization parameters, when the family uses them.
  virtual const FeatureScaler* scaler() const { return nullptr; }

  // Per-epoch curves; non-null only for iterative trainers that record them.
  virtual const std::vector<TrainingEpochStats>* training_history() const {
    return nullptr;
  }

  virtual nlohmann::json params_to_json() const = 0;
  virtual void params_from_json(const nlohmann::json& doc) = 0;
};

}  // namespace vigil
