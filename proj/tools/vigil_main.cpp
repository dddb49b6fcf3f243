// vigil: vigilance-state scoring toolkit.
//
// Subcommands cover the full pipeline: synth, extract, window, balance,
// split, train, evaluate, predict, and report (the one-shot end-to-end run).
// Exit codes: 0 success, 2 usage error, 3 data/schema error, 4 numeric or
// training failure.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "vigil/vigil.hpp"

#include <CLI11.hpp>

namespace {

namespace fs = std::filesystem;
using vigil::PipelineConfig;
using vigil::VigilanceState;
using vigil::WindowedSample;

constexpr int kExitUsage = 2;
constexpr int kExitData = 3;
constexpr int kExitNumeric = 4;

struct SynthOptions {
  std::string mode = "features";
  std::string out = "synthetic_features.csv";
  std::string out_dir = ".";
  int epochs_per_class = 1000;
  std::uint64_t seed = 42;
  double separability = 0.8;
  double sample_rate_hz = 500.0;
};

struct ExtractOptions {
  std::string signals, activity, labels, out = "features.csv";
  double sample_rate_hz = 500.0;
  std::string emg_summary = "rectified";
};

struct WindowOptions {
  std::string features, out = "windowed.csv";
  int width = vigil::kDefaultWindowWidth;
};

struct BalanceOptions {
  std::string windowed, out = "balanced.csv";
};

struct SplitOptions {
  std::string windowed, out_dir = ".";
  std::uint64_t seed = 42;
  double test_fraction = 0.2;
  double validation_fraction = 0.0;
};

struct TrainOptions {
  std::string train, validation, out = "model.json", history;
  std::string classifier = "random_forest";
  std::uint64_t seed = 42;
};

struct EvaluateOptions {
  std::string model, data, out_dir = ".", prefix;
};

struct PredictOptions {
  std::string model, data, out = "predictions.csv";
};

struct ReportOptions {
  std::string features, signals, activity, labels;
  bool synthetic = false;
  int epochs_per_class = 1000;
  double separability = 0.8;
  std::uint64_t synth_seed = 42;
  std::string out_dir = "out";
  std::uint64_t seed = 42;
  int window_width = vigil::kDefaultWindowWidth;
  double test_fraction = 0.2;
  double validation_fraction = 0.2;
  std::string balance_mode = "paper";
  std::vector<std::string> classifiers = {"random_forest"};
  double sample_rate_hz = 500.0;
  std::string emg_summary = "rectified";
};

vigil::EmgSummary parse_emg_summary(const std::string& text) {
  if (text == "rectified") return vigil::EmgSummary::kRectifiedMean;
  if (text == "rms") return vigil::EmgSummary::kRootMeanSquare;
  throw CLI::ValidationError("--emg-summary", "expected 'rectified' or 'rms'");
}

void add_hyperparam_flags(CLI::App* cmd, vigil::ClassifierHyperparams& hp) {
  cmd->add_option("--max-depth", hp.tree.max_depth, "Tree depth limit")
      ->capture_default_str();
  cmd->add_option("--min-samples-split", hp.tree.min_samples_split,
                  "Minimum node size eligible for splitting")
      ->capture_default_str();
  cmd->add_option("--n-trees", hp.forest.n_trees, "Forest size")->capture_default_str();
  cmd->add_option("--features-per-split", hp.forest.features_per_split,
                  "Candidate features per node; 0 = round(sqrt(feature count))")
      ->capture_default_str();
  cmd->add_flag_callback(
      "--no-bootstrap", [&hp]() { hp.forest.bootstrap = false; },
      "Disable bootstrap resampling in the forest");
  cmd->add_option("--variance-floor-scale", hp.nb.variance_floor_scale,
                  "Gaussian NB variance floor scale")
      ->capture_default_str();
  cmd->add_option("--learning-rate", hp.logreg.learning_rate,
                  "Logistic regression initial learning rate")
      ->capture_default_str();
  cmd->add_option("--logreg-epochs", hp.logreg.epochs, "Logistic regression epochs")
      ->capture_default_str();
  cmd->add_option("--l2", hp.logreg.l2, "Logistic regression L2 penalty")
      ->capture_default_str();
  cmd->add_flag_callback(
      "--one-vs-rest", [&hp]() { hp.logreg.one_vs_rest = true; },
      "Sigmoid one-vs-rest mode instead of softmax");
  cmd->add_option("--mlp-hidden", hp.mlp.hidden_units, "MLP hidden layer width")
      ->capture_default_str();
  cmd->add_option("--mlp-epochs", hp.mlp.epochs, "MLP training epochs")
      ->capture_default_str();
  cmd->add_option("--batch-size", hp.mlp.batch_size, "MLP minibatch size")
      ->capture_default_str();
  cmd->add_option("--adam-lr", hp.mlp.adam.alpha, "adam step size")->capture_default_str();
}

// The tree/forest/mlp trainers draw their seeds from the subcommand's --seed.
std::unique_ptr<vigil::Classifier> build_classifier(const std::string& kind,
                                                    vigil::ClassifierHyperparams hp,
                                                    std::uint64_t seed) {
  hp.forest.seed = seed;
  hp.mlp.seed = seed;
  if (kind == "decision_tree" || kind == "dt") {
    return std::make_unique<vigil::DecisionTreeClassifier>(hp.tree);
  }
  if (kind == "random_forest" || kind == "rf") {
    return std::make_unique<vigil::RandomForestClassifier>(hp.forest);
  }
  if (kind == "gaussian_nb" || kind == "nb") {
    return std::make_unique<vigil::NaiveBayesClassifier>(hp.nb);
  }
  if (kind == "logistic_regression" || kind == "logreg") {
    return std::make_unique<vigil::LogisticRegressionClassifier>(hp.logreg);
  }
  if (kind == "mlp") {
    return std::make_unique<vigil::MlpClassifier>(hp.mlp);
  }
  throw CLI::ValidationError("--classifier", "unknown classifier \"" + kind + "\"");
}

void write_synth_manifest(const std::string& path, const SynthOptions& opt) {
  std::ofstream out(path);
  if (!out) throw vigil::SchemaError("cannot write manifest: " + path);
  out << "mode=" << opt.mode << '\n'
      << "epochs_per_class=" << opt.epochs_per_class << '\n'
      << "seed=" << opt.seed << '\n'
      << "separability=" << vigil::csv::format_double(opt.separability) << '\n';
  if (opt.mode == "raw") {
    out << "sample_rate_hz=" << vigil::csv::format_double(opt.sample_rate_hz) << '\n';
  }
}

int run_synth(const SynthOptions& opt) {
  vigil::SyntheticSpec spec;
  spec.epochs_per_class = opt.epochs_per_class;
  spec.seed = opt.seed;
  spec.separability = opt.separability;

  if (opt.mode == "features") {
    const auto rows = vigil::generate_features(spec);
    vigil::write_feature_csv(opt.out, rows);
    write_synth_manifest(opt.out + ".manifest.txt", opt);
    std::cout << "wrote " << rows.size() << " labeled feature rows to " << opt.out << '\n';
    return 0;
  }
  if (opt.mode == "raw") {
    fs::create_directories(opt.out_dir);
    const auto epochs = vigil::generate_raw(spec, opt.sample_rate_hz);
    std::vector<double> eeg, emg, activity;
    std::vector<VigilanceState> labels;
    for (const auto& [epoch, label] : epochs) {
      eeg.insert(eeg.end(), epoch.eeg.begin(), epoch.eeg.end());
      emg.insert(emg.end(), epoch.emg.begin(), epoch.emg.end());
      activity.push_back(epoch.activity);
      labels.push_back(label);
    }
    const fs::path dir(opt.out_dir);
    vigil::write_signals_csv((dir / "signals.csv").string(), eeg, emg);
    vigil::write_activity_csv((dir / "activity.csv").string(), activity);
    vigil::write_labels_csv((dir / "labels.csv").string(), labels);
    write_synth_manifest((dir / "synth_manifest.txt").string(), opt);
    std::cout << "wrote " << epochs.size() << " raw epochs to " << opt.out_dir << '\n';
    return 0;
  }
  throw CLI::ValidationError("--mode", "expected 'features' or 'raw'");
}

int run_extract(const ExtractOptions& opt) {
  const auto [eeg, emg] = vigil::read_signals_csv(opt.signals);
  const auto activity = vigil::read_activity_csv(opt.activity);
  const auto epochs = vigil::segment_recording(eeg, emg, activity, opt.sample_rate_hz);

  std::vector<VigilanceState> labels;
  if (!opt.labels.empty()) {
    labels = vigil::read_labels_csv(opt.labels);
    if (labels.size() < epochs.size()) {
      throw vigil::SchemaError("labels CSV has " + std::to_string(labels.size()) +
                               " rows but the recording has " +
                               std::to_string(epochs.size()) + " epochs");
    }
  }

  std::vector<vigil::FeatureRow> rows;
  rows.reserve(epochs.size());
  const auto summary = parse_emg_summary(opt.emg_summary);
  for (std::size_t i = 0; i < epochs.size(); ++i) {
    vigil::FeatureRow row = vigil::extract_features(epochs[i], summary);
    if (!labels.empty()) row.label = labels[i];
    rows.push_back(std::move(row));
  }
  vigil::write_feature_csv(opt.out, rows);
  std::cout << "extracted " << rows.size() << " feature rows to " << opt.out << '\n';
  return 0;
}

int run_window(const WindowOptions& opt) {
  const auto rows = vigil::read_feature_csv(opt.features);
  const auto samples = vigil::window(rows, opt.width);
  vigil::write_windowed_csv(opt.out, samples);
  std::cout << "windowed " << rows.size() << " rows into " << samples.size()
            << " samples in " << opt.out << '\n';
  return 0;
}

int run_balance(const BalanceOptions& opt) {
  const auto records = vigil::read_windowed_csv(opt.windowed);
  const auto samples = vigil::require_labeled(records);
  const auto balanced = vigil::balance(samples);
  vigil::write_windowed_csv(opt.out, balanced);
  const auto dist =
      vigil::class_distribution(std::span<const WindowedSample>(balanced));
  std::cout << "balanced " << samples.size() << " samples to " << balanced.size()
            << " (P " << dist.counts[0] << ", S " << dist.counts[1] << ", W "
            << dist.counts[2] << ") in " << opt.out << '\n';
  return 0;
}

int run_split(const SplitOptions& opt) {
  const auto records = vigil::read_windowed_csv(opt.windowed);
  const auto samples = vigil::require_labeled(records);
  const auto result = vigil::split(samples, opt.seed, opt.test_fraction,
                                   opt.validation_fraction);
  fs::create_directories(opt.out_dir);
  const fs::path dir(opt.out_dir);
  vigil::write_windowed_csv((dir / "train.csv").string(), result.train);
  if (!result.validation.empty()) {
    vigil::write_windowed_csv((dir / "validation.csv").string(), result.validation);
  }
  vigil::write_windowed_csv((dir / "test.csv").string(), result.test);
  vigil::write_split_manifest((dir / "split_manifest.txt").string(), result,
                              vigil::digest_file(opt.windowed));
  std::cout << "split " << samples.size() << " samples into " << result.train.size()
            << "/" << result.validation.size() << "/" << result.test.size()
            << " under " << opt.out_dir << '\n';
  return 0;
}

int run_train(const TrainOptions& opt, const vigil::ClassifierHyperparams& hp) {
  const auto train_samples =
      vigil::require_labeled(vigil::read_windowed_csv(opt.train));
  std::vector<WindowedSample> validation_samples;
  if (!opt.validation.empty()) {
    validation_samples = vigil::require_labeled(vigil::read_windowed_csv(opt.validation));
  }

  auto model = build_classifier(opt.classifier, hp, opt.seed);
  model->fit(train_samples, validation_samples);

  vigil::TrainingMeta meta;
  meta.seed = opt.seed;
  if (model->kind() == "mlp") meta.epochs = hp.mlp.epochs;
  if (model->kind() == "logistic_regression") meta.epochs = hp.logreg.epochs;
  vigil::save_model(*model, opt.out, meta);
  std::cout << "trained " << model->kind() << " on " << train_samples.size()
            << " samples -> " << opt.out << '\n';

  if (const auto* history = model->training_history(); history && !history->empty()) {
    const std::string history_path =
        opt.history.empty() ? opt.out + ".history.csv" : opt.history;
    vigil::write_history_csv(history_path, *history);
    std::cout << "training history -> " << history_path << '\n';
  }
  return 0;
}

int run_evaluate(const EvaluateOptions& opt) {
  const auto model = vigil::load_model(opt.model);
  const auto samples = vigil::require_labeled(vigil::read_windowed_csv(opt.data));

  std::vector<VigilanceState> truth(samples.size()), predicted(samples.size());
  std::vector<vigil::ClassProbabilities> probabilities(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    truth[i] = samples[i].label;
    probabilities[i] = model->predict_proba(samples[i].features);
    predicted[i] = vigil::predicted_class(probabilities[i]);
  }
  vigil::ConfusionMatrix cm;
  const auto report = vigil::evaluate_predictions(truth, predicted, probabilities, &cm);

  fs::create_directories(opt.out_dir);
  const std::string prefix = opt.prefix.empty() ? model->kind() : opt.prefix;
  const fs::path dir(opt.out_dir);
  vigil::write_metrics_text((dir / ("metrics_" + prefix + ".txt")).string(),
                            model->kind(), cm, report);
  vigil::write_metrics_csv((dir / ("metrics_" + prefix + ".csv")).string(), report);
  vigil::write_confusion_csv((dir / ("confusion_" + prefix + ".csv")).string(), cm);
  std::cout << vigil::format_metrics_text(model->kind(), cm, report);
  return 0;
}

int run_predict(const PredictOptions& opt) {
  const auto model = vigil::load_model(opt.model);
  const auto records = vigil::read_windowed_csv(opt.data);

  std::vector<VigilanceState> predicted(records.size());
  std::vector<vigil::ClassProbabilities> probabilities(records.size());
  std::vector<std::optional<VigilanceState>> truth(records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    probabilities[i] = model->predict_proba(records[i].features);
    predicted[i] = vigil::predicted_class(probabilities[i]);
    truth[i] = records[i].label;
  }
  vigil::write_predictions_csv(opt.out, predicted, probabilities, truth);
  std::cout << "predicted " << records.size() << " samples -> " << opt.out << '\n';
  return 0;
}

int run_report(const ReportOptions& opt, const vigil::ClassifierHyperparams& hp) {
  PipelineConfig config;
  config.features_csv = opt.features;
  config.signals_csv = opt.signals;
  config.activity_csv = opt.activity;
  config.labels_csv = opt.labels;
  config.synthetic = opt.synthetic;
  config.synthetic_spec.epochs_per_class = opt.epochs_per_class;
  config.synthetic_spec.seed = opt.synth_seed;
  config.synthetic_spec.separability = opt.separability;
  config.sample_rate_hz = opt.sample_rate_hz;
  config.emg_summary = parse_emg_summary(opt.emg_summary);
  config.output_dir = opt.out_dir;
  config.seed = opt.seed;
  config.window_width = opt.window_width;
  config.test_fraction = opt.test_fraction;
  config.validation_fraction_of_train = opt.validation_fraction;
  const auto mode = vigil::parse_balance_mode(opt.balance_mode);
  if (!mode) {
    throw CLI::ValidationError("--balance-mode", "expected paper, leak-free, or off");
  }
  config.balance_mode = *mode;
  config.classifiers = opt.classifiers;
  config.hp = hp;

  const auto result = vigil::run_pipeline(config);
  std::cout << "windowed samples: " << result.windowed_samples << '\n'
            << "split: " << result.train_size << " train / " << result.validation_size
            << " validation / " << result.test_size << " test\n";
  for (const auto& run : result.models) {
    std::printf("%-22s accuracy %.4f  macro f1 %.4f\n", run.kind.c_str(),
                run.metrics.accuracy, run.metrics.macro_f1);
  }
  std::cout << "artifacts in " << opt.out_dir << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"vigilance-state scoring toolkit: EEG/EMG band-power features, "
               "windowed samples, five classifiers, and evaluation reports"};
  app.require_subcommand(1);

  SynthOptions synth_opt;
  ExtractOptions extract_opt;
  WindowOptions window_opt;
  BalanceOptions balance_opt;
  SplitOptions split_opt;
  TrainOptions train_opt;
  EvaluateOptions evaluate_opt;
  PredictOptions predict_opt;
  ReportOptions report_opt;
  vigil::ClassifierHyperparams train_hp, report_hp;

  auto* synth = app.add_subcommand("synth", "Generate synthetic labeled data");
  synth->add_option("--mode", synth_opt.mode, "features | raw")->capture_default_str();
  synth->add_option("--out", synth_opt.out, "Feature CSV path (features mode)")
      ->capture_default_str();
  synth->add_option("--out-dir", synth_opt.out_dir, "Output directory (raw mode)")
      ->capture_default_str();
  synth->add_option("--epochs-per-class", synth_opt.epochs_per_class)
      ->capture_default_str();
  synth->add_option("--seed", synth_opt.seed)->capture_default_str();
  synth->add_option("--separability", synth_opt.separability, "Class separation in (0, 1]")
      ->capture_default_str();
  synth->add_option("--sample-rate-hz", synth_opt.sample_rate_hz)->capture_default_str();

  auto* extract = app.add_subcommand("extract", "Raw signal CSVs -> 42-feature rows");
  extract->add_option("--signals", extract_opt.signals, "CSV: t_index,eeg,emg")
      ->required();
  extract->add_option("--activity", extract_opt.activity, "CSV: epoch_index,activity")
      ->required();
  extract->add_option("--labels", extract_opt.labels, "CSV: epoch_index,label (optional)");
  extract->add_option("--sample-rate-hz", extract_opt.sample_rate_hz)
      ->capture_default_str();
  extract->add_option("--emg-summary", extract_opt.emg_summary, "rectified | rms")
      ->capture_default_str();
  extract->add_option("--out", extract_opt.out)->capture_default_str();

  auto* window_cmd = app.add_subcommand("window", "Labeled feature rows -> windowed samples");
  window_cmd->add_option("--features", window_opt.features)->required();
  window_cmd->add_option("--width", window_opt.width)->capture_default_str();
  window_cmd->add_option("--out", window_opt.out)->capture_default_str();

  auto* balance_cmd = app.add_subcommand("balance", "Replicate whole minority classes");
  balance_cmd->add_option("--windowed", balance_opt.windowed)->required();
  balance_cmd->add_option("--out", balance_opt.out)->capture_default_str();

  auto* split_cmd = app.add_subcommand("split", "Seeded shuffle + train/validation/test split");
  split_cmd->add_option("--windowed", split_opt.windowed)->required();
  split_cmd->add_option("--seed", split_opt.seed)->capture_default_str();
  split_cmd->add_option("--test-fraction", split_opt.test_fraction)->capture_default_str();
  split_cmd->add_option("--validation-fraction", split_opt.validation_fraction,
                        "Fraction of the training part held out for validation")
      ->capture_default_str();
  split_cmd->add_option("--out-dir", split_opt.out_dir)->capture_default_str();

  auto* train = app.add_subcommand("train", "Fit one classifier on windowed samples");
  train->add_option("--train", train_opt.train)->required();
  train->add_option("--validation", train_opt.validation, "Required for --classifier mlp");
  train->add_option("--classifier", train_opt.classifier,
                    "decision_tree | random_forest | gaussian_nb | logistic_regression | mlp")
      ->capture_default_str();
  train->add_option("--seed", train_opt.seed)->capture_default_str();
  train->add_option("--out", train_opt.out)->capture_default_str();
  train->add_option("--history", train_opt.history,
                    "Training-history CSV (defaults next to the model file)");
  add_hyperparam_flags(train, train_hp);

  auto* evaluate = app.add_subcommand("evaluate", "Score a saved model on labeled samples");
  evaluate->add_option("--model", evaluate_opt.model)->required();
  evaluate->add_option("--data", evaluate_opt.data)->required();
  evaluate->add_option("--out-dir", evaluate_opt.out_dir)->capture_default_str();
  evaluate->add_option("--prefix", evaluate_opt.prefix, "Artifact name prefix");

  auto* predict = app.add_subcommand("predict", "Emit per-sample class probabilities");
  predict->add_option("--model", predict_opt.model)->required();
  predict->add_option("--data", predict_opt.data)->required();
  predict->add_option("--out", predict_opt.out)->capture_default_str();

  auto* report = app.add_subcommand(
      "report", "Full pipeline: input -> window -> balance -> split -> train -> evaluate");
  report->add_option("--features", report_opt.features, "Labeled feature CSV input");
  report->add_option("--signals", report_opt.signals, "Raw signal CSV input");
  report->add_option("--activity", report_opt.activity);
  report->add_option("--labels", report_opt.labels);
  report->add_flag("--synthetic", report_opt.synthetic, "Generate synthetic input");
  report->add_option("--epochs-per-class", report_opt.epochs_per_class)
      ->capture_default_str();
  report->add_option("--separability", report_opt.separability)->capture_default_str();
  report->add_option("--synth-seed", report_opt.synth_seed,
                     "Synthetic generator seed (defaults to --seed)")
      ->capture_default_str();
  report->add_option("--out-dir", report_opt.out_dir)->capture_default_str();
  report->add_option("--seed", report_opt.seed)->capture_default_str();
  report->add_option("--window-width", report_opt.window_width)->capture_default_str();
  report->add_option("--test-fraction", report_opt.test_fraction)->capture_default_str();
  report->add_option("--validation-fraction", report_opt.validation_fraction)
      ->capture_default_str();
  report->add_option("--balance-mode", report_opt.balance_mode, "paper | leak-free | off")
      ->capture_default_str();
  report->add_option("--classifier", report_opt.classifiers,
                     "Classifier kind(s); 'all' runs every family")
      ->capture_default_str();
  report->add_option("--sample-rate-hz", report_opt.sample_rate_hz)->capture_default_str();
  report->add_option("--emg-summary", report_opt.emg_summary)->capture_default_str();
  add_hyperparam_flags(report, report_hp);

  for (auto* cmd : app.get_subcommands({})) {
    cmd->set_config("--config", "", "Key=value config file; flags override it");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);  // prints the message or help text
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (synth->parsed()) return run_synth(synth_opt);
    if (extract->parsed()) return run_extract(extract_opt);
    if (window_cmd->parsed()) return run_window(window_opt);
    if (balance_cmd->parsed()) return run_balance(balance_opt);
    if (split_cmd->parsed()) return run_split(split_opt);
    if (train->parsed()) return run_train(train_opt, train_hp);
    if (evaluate->parsed()) return run_evaluate(evaluate_opt);
    if (predict->parsed()) return run_predict(predict_opt);
    if (report->parsed()) return run_report(report_opt, report_hp);
  } catch (const CLI::ValidationError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const vigil::NumericError& e) {
    std::cerr << "numeric error: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const vigil::SchemaError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kExitData;
  } catch (const std::invalid_argument& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return kExitUsage;
}
