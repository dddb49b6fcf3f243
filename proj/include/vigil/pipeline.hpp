#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "vigil/csv.hpp"
#include "vigil/dataset.hpp"
#include "vigil/metrics.hpp"
#include "vigil/model_json.hpp"
#include "vigil/report.hpp"
#include "vigil/synthetic.hpp"

namespace vigil {

enum class BalanceMode {
  kPaper,     // balance everything, then split (replicated rows can cross parts)
  kLeakFree,  // split first, then balance the training partition only
  kOff,
};

inline std::string balance_mode_name(BalanceMode mode) {
  switch (mode) {
    case BalanceMode::kPaper: return "paper";
    case BalanceMode::kLeakFree: return "leak-free";
    case BalanceMode::kOff: return "off";
  }
  return "?";
}

inline std::optional<BalanceMode> parse_balance_mode(const std::string& text) {
  if (text == "paper") return BalanceMode::kPaper;
  if (text == "leak-free") return BalanceMode::kLeakFree;
  if (text == "off") return BalanceMode::kOff;
  return std::nullopt;
}

struct ClassifierHyperparams {
  TreeParams tree;
  ForestParams forest;
  GaussianNBParams nb;
  LogRegParams logreg;
  MlpParams mlp;
};

// End-to-end run configuration. Every default matches the headline pipeline:
// width-5 windows, balance-then-split, 80/20 split (with a 20%-of-train
// validation carve-out consumed by the MLP), seed-driven determinism.
struct PipelineConfig {
  // Input: exactly one of feature CSV, raw signal triplet, or synthetic spec.
  std::string features_csv;
  std::string signals_csv;
  std::string activity_csv;
  std::string labels_csv;
  bool synthetic = false;
  SyntheticSpec synthetic_spec;

  double sample_rate_hz = 500.0;
  EmgSummary emg_summary = EmgSummary::kRectifiedMean;

  std::string output_dir = "out";
  std::uint64_t seed = 42;
  int window_width = kDefaultWindowWidth;
  double test_fraction = 0.2;
  double validation_fraction_of_train = 0.2;
  BalanceMode balance_mode = BalanceMode::kPaper;
  std::vector<std::string> classifiers = {"random_forest"};
  ClassifierHyperparams hp;
};

struct ModelRunResult {
  std::string kind;
  ConfusionMatrix cm;
  MetricsReport metrics;
  std::string model_path;
  std::string metrics_text_path;
  std::string metrics_csv_path;
  std::string confusion_csv_path;
  std::string predictions_csv_path;
  std::string history_csv_path;  // MLP only
};

struct PipelineResult {
  std::size_t windowed_samples = 0;
  std::size_t train_size = 0;
  std::size_t validation_size = 0;
  std::size_t test_size = 0;
  std::string split_manifest_path;
  std::string summary_csv_path;  // written when more than one classifier runs
  std::string summary_text_path;
  std::vector<ModelRunResult> models;
};

inline const std::vector<std::string>& all_classifier_kinds() {
  static const std::vector<std::string> kinds = {
      "decision_tree", "random_forest", "gaussian_nb", "logistic_regression", "mlp"};
  return kinds;
}

namespace detail {

template <typename F>
auto pipeline_stage(const char* stage, F&& body) -> decltype(body()) {
  try {
    return body();
  } catch (const SchemaError& e) {
    throw SchemaError(std::string("[") + stage + "] " + e.what());
  } catch (const NumericError& e) {
    throw NumericError(std::string("[") + stage + "] " + e.what());
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument(std::string("[") + stage + "] " + e.what());
  } catch (const std::logic_error& e) {
    throw std::logic_error(std::string("[") + stage + "] " + e.what());
  }
}

inline std::unique_ptr<Classifier> build_classifier(const std::string& kind,
                                                    const ClassifierHyperparams& hp,
                                                    std::uint64_t seed) {
  if (kind == "decision_tree") return std::make_unique<DecisionTreeClassifier>(hp.tree);
  if (kind == "random_forest") {
    ForestParams params = hp.forest;
    params.seed = seed;
    return std::make_unique<RandomForestClassifier>(params);
  }
  if (kind == "gaussian_nb") return std::make_unique<NaiveBayesClassifier>(hp.nb);
  if (kind == "logistic_regression") {
    return std::make_unique<LogisticRegressionClassifier>(hp.logreg);
  }
  if (kind == "mlp") {
    MlpParams params = hp.mlp;
    params.seed = seed;
    return std::make_unique<MlpClassifier>(params);
  }
  throw std::invalid_argument("unknown classifier \"" + kind + "\"");
}

inline std::string synthetic_digest(const SyntheticSpec& spec) {
  std::string text = "synthetic;epochs_per_class=" + std::to_string(spec.epochs_per_class) +
                     ";seed=" + std::to_string(spec.seed) +
                     ";separability=" + csv::format_double(spec.separability);
  for (const ClassPrototype& p : spec.prototypes) {
    text += ";" + std::string(1, state_code(p.label)) + ":" +
            csv::format_double(p.band_lo_hz) + "," + csv::format_double(p.band_hi_hz) +
            "," + csv::format_double(p.eeg_amplitude) + "," +
            csv::format_double(p.emg_level) + "," + csv::format_double(p.activity_level) +
            "," + csv::format_double(p.noise_scale);
  }
  char out[32];
  std::snprintf(out, sizeof(out), "fnv1a64:%016llx",
                static_cast<unsigned long long>(fnv1a64(text)));
  return out;
}

}  // namespace detail

// extract -> window -> balance -> split -> train -> evaluate, with every
// artifact written under config.output_dir. Deterministic given identical
// config and inputs: reruns produce byte-identical metrics and predictions.
inline PipelineResult run_pipeline(const PipelineConfig& config) {
  require_arg(config.window_width >= 1, "run_pipeline: window_width must be >= 1");
  require_arg(config.test_fraction >= 0.0 && config.test_fraction < 1.0,
              "run_pipeline: test_fraction must lie in [0, 1)");
  require_arg(config.validation_fraction_of_train >= 0.0 &&
                  config.validation_fraction_of_train < 1.0,
              "run_pipeline: validation_fraction_of_train must lie in [0, 1)");
  require_arg(!config.classifiers.empty(), "run_pipeline: no classifiers requested");

  namespace fs = std::filesystem;
  fs::create_directories(config.output_dir);
  const auto artifact = [&config](const std::string& name) {
    return (fs::path(config.output_dir) / name).string();
  };

  // Stage: input. Either labeled feature rows from CSV, extraction from raw
  // signals plus label sidecar, or the synthetic feature generator.
  std::string input_digest;
  std::vector<FeatureRow> rows = detail::pipeline_stage("input", [&] {
    std::vector<FeatureRow> out;
    const int sources = (config.features_csv.empty() ? 0 : 1) +
                        (config.signals_csv.empty() ? 0 : 1) + (config.synthetic ? 1 : 0);
    require_arg(sources == 1,
                "exactly one input source required (features CSV, raw signals, or synthetic)");
    if (config.synthetic) {
      out = generate_features(config.synthetic_spec);
      input_digest = detail::synthetic_digest(config.synthetic_spec);
      return out;
    }
    if (!config.features_csv.empty()) {
      out = read_feature_csv(config.features_csv);
      input_digest = digest_file(config.features_csv);
      return out;
    }
    require_arg(!config.activity_csv.empty(),
                "raw input needs --activity alongside --signals");
    require_arg(!config.labels_csv.empty(),
                "raw input needs --labels to train on");
    const auto [eeg, emg] = read_signals_csv(config.signals_csv);
    const std::vector<double> activity = read_activity_csv(config.activity_csv);
    const std::vector<VigilanceState> labels = read_labels_csv(config.labels_csv);
    const std::vector<RawEpoch> epochs =
        segment_recording(eeg, emg, activity, config.sample_rate_hz);
    require_arg(labels.size() >= epochs.size(),
                "labels CSV has fewer rows than epochs");
    out.reserve(epochs.size());
    for (std::size_t i = 0; i < epochs.size(); ++i) {
      FeatureRow row = extract_features(epochs[i], config.emg_summary);
      row.label = labels[i];
      out.push_back(std::move(row));
    }
    input_digest = digest_file(config.signals_csv);
    return out;
  });

  // Stage: window.
  std::vector<WindowedSample> windowed = detail::pipeline_stage(
      "window", [&] { return window(rows, config.window_width); });
  rows.clear();
  rows.shrink_to_fit();

  PipelineResult result;
  result.windowed_samples = windowed.size();

  // Stage: balance + split. Paper mode balances before the split, which leaks
  // replicated minority samples across partitions; leak-free balances the
  // training partition only.
  DataSplit data_split = detail::pipeline_stage("split", [&] {
    if (config.balance_mode == BalanceMode::kPaper) {
      const std::vector<WindowedSample> balanced = balance(windowed);
      return split(balanced, config.seed, config.test_fraction,
                   config.validation_fraction_of_train);
    }
    DataSplit s = split(windowed, config.seed, config.test_fraction,
                        config.validation_fraction_of_train);
    if (config.balance_mode == BalanceMode::kLeakFree) {
      s.train = balance(s.train);
    }
    return s;
  });
  windowed.clear();
  windowed.shrink_to_fit();

  result.train_size = data_split.train.size();
  result.validation_size = data_split.validation.size();
  result.test_size = data_split.test.size();
  result.split_manifest_path = artifact("split_manifest.txt");
  write_split_manifest(result.split_manifest_path, data_split, input_digest);
  require_arg(!data_split.test.empty(), "run_pipeline: empty test partition");

  // Non-MLP families train on train + validation, so every family sees the
  // same 80% and is scored on the same held-out 20%.
  std::vector<WindowedSample> merged_train = data_split.train;
  merged_train.insert(merged_train.end(), data_split.validation.begin(),
                      data_split.validation.end());

  std::vector<std::string> kinds = config.classifiers;
  if (kinds.size() == 1 && kinds.front() == "all") kinds = all_classifier_kinds();

  std::vector<SummaryRow> summary;
  for (const std::string& kind : kinds) {
    ModelRunResult run;
    run.kind = kind;

    std::unique_ptr<Classifier> model = detail::pipeline_stage("train", [&] {
      auto m = detail::build_classifier(kind, config.hp, config.seed);
      if (kind == "mlp") {
        m->fit(data_split.train, data_split.validation);
      } else {
        m->fit(merged_train);
      }
      return m;
    });

    detail::pipeline_stage("evaluate", [&] {
      std::vector<VigilanceState> truth(data_split.test.size());
      std::vector<VigilanceState> predicted(data_split.test.size());
      std::vector<ClassProbabilities> probabilities(data_split.test.size());
      for (std::size_t i = 0; i < data_split.test.size(); ++i) {
        truth[i] = data_split.test[i].label;
        probabilities[i] = model->predict_proba(data_split.test[i].features);
        predicted[i] = predicted_class(probabilities[i]);
      }
      run.metrics = evaluate_predictions(truth, predicted, probabilities, &run.cm);

      run.model_path = artifact("model_" + kind + ".json");
      TrainingMeta meta;
      meta.seed = config.seed;
      if (kind == "mlp") meta.epochs = config.hp.mlp.epochs;
      if (kind == "logistic_regression") meta.epochs = config.hp.logreg.epochs;
      save_model(*model, run.model_path, meta);

      run.metrics_text_path = artifact("metrics_" + kind + ".txt");
      write_metrics_text(run.metrics_text_path, kind, run.cm, run.metrics);
      run.metrics_csv_path = artifact("metrics_" + kind + ".csv");
      write_metrics_csv(run.metrics_csv_path, run.metrics);
      run.confusion_csv_path = artifact("confusion_" + kind + ".csv");
      write_confusion_csv(run.confusion_csv_path, run.cm);

      run.predictions_csv_path = artifact("predictions_" + kind + ".csv");
      std::vector<std::optional<VigilanceState>> truth_opt(truth.begin(), truth.end());
      write_predictions_csv(run.predictions_csv_path, predicted, probabilities, truth_opt);

      if (const auto* history = model->training_history(); history && !history->empty()) {
        run.history_csv_path = artifact("history_" + kind + ".csv");
        write_history_csv(run.history_csv_path, *history);
      }
      return 0;
    });

    summary.push_back(SummaryRow{kind, run.metrics.accuracy, run.metrics.macro_f1,
                                 run.metrics.macro_auc});
    result.models.push_back(std::move(run));
  }

  if (kinds.size() > 1) {
    result.summary_csv_path = artifact("summary.csv");
    result.summary_text_path = artifact("summary.txt");
    write_summary(result.summary_csv_path, result.summary_text_path, summary);
  }
  return result;
}

}  // namespace vigil
