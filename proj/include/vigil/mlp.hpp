#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "vigil/adam.hpp"
#include "vigil/metrics.hpp"
#include "vigil/model.hpp"
#include "vigil/rng.hpp"

namespace vigil {

// Fully connected net: input -> hidden (ReLU) -> 3 outputs (softmax).
// Default shape is 210-256-3. Weights are row-major: w1[in][hidden],
// w2[hidden][out].
struct MLPModel {
  int input_dim = 0;
  int hidden_dim = 256;
  std::vector<double> w1;
  std::vector<double> b1;
  std::vector<double> w2;
  std::vector<double> b2;
};

struct MlpParams {
  int hidden_units = 256;
  int epochs = 50;
  int batch_size = 128;
  std::uint64_t seed = 0;
  AdamParams adam;
};

struct MlpForward {
  std::vector<double> hidden;  // n x hidden, post-ReLU
  std::vector<double> probs;   // n x 3
};

inline MlpForward mlp_forward(const MLPModel& model, std::span<const double> x,
                              std::size_t n) {
  const auto in = static_cast<std::size_t>(model.input_dim);
  const auto hid = static_cast<std::size_t>(model.hidden_dim);
  require_arg(n > 0 && x.size() == n * in, "mlp_forward: shape mismatch");

  MlpForward out;
  out.hidden.assign(n * hid, 0.0);
  out.probs.assign(n * kNumClasses, 0.0);

  for (std::size_t i = 0; i < n; ++i) {
    double* h = out.hidden.data() + i * hid;
    const double* row = x.data() + i * in;
    for (std::size_t j = 0; j < hid; ++j) h[j] = model.b1[j];
    for (std::size_t k = 0; k < in; ++k) {
      const double xv = row[k];
      if (xv == 0.0) continue;
      const double* w = model.w1.data() + k * hid;
      for (std::size_t j = 0; j < hid; ++j) h[j] += xv * w[j];
    }
    for (std::size_t j = 0; j < hid; ++j) h[j] = h[j] > 0.0 ? h[j] : 0.0;

    std::array<double, kNumClasses> logits{};
    for (int c = 0; c < kNumClasses; ++c) logits[static_cast<std::size_t>(c)] = model.b2[static_cast<std::size_t>(c)];
    for (std::size_t j = 0; j < hid; ++j) {
      const double hv = h[j];
      if (hv == 0.0) continue;
      const double* w = model.w2.data() + j * kNumClasses;
      for (int c = 0; c < kNumClasses; ++c) logits[static_cast<std::size_t>(c)] += hv * w[static_cast<std::size_t>(c)];
    }
    for (double v : logits) {
      if (!std::isfinite(v)) throw NumericError("mlp_forward: non-finite logit");
    }
    const double max_logit = *std::max_element(logits.begin(), logits.end());
    double sum = 0.0;
    double* p = out.probs.data() + i * kNumClasses;
    for (int c = 0; c < kNumClasses; ++c) {
      p[c] = std::exp(logits[static_cast<std::size_t>(c)] - max_logit);
      sum += p[c];
    }
    for (int c = 0; c < kNumClasses; ++c) p[c] /= sum;
  }
  return out;
}

struct MlpGradients {
  std::vector<double> w1;
  std::vector<double> b1;
  std::vector<double> w2;
  std::vector<double> b2;
};

// Exact gradients of the mean cross-entropy over the batch.
inline MlpGradients mlp_backward(const MLPModel& model, std::span<const double> x,
                                 std::size_t n, const MlpForward& forward,
                                 std::span<const VigilanceState> labels) {
  const auto in = static_cast<std::size_t>(model.input_dim);
  const auto hid = static_cast<std::size_t>(model.hidden_dim);
  require_arg(labels.size() == n && x.size() == n * in, "mlp_backward: shape mismatch");

  MlpGradients grads;
  grads.w1.assign(in * hid, 0.0);
  grads.b1.assign(hid, 0.0);
  grads.w2.assign(hid * kNumClasses, 0.0);
  grads.b2.assign(kNumClasses, 0.0);

  std::vector<double> d_hidden(hid);
  const double inv_n = 1.0 / static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double* p = forward.probs.data() + i * kNumClasses;
    const double* h = forward.hidden.data() + i * hid;
    const double* row = x.data() + i * in;
    const auto yi = static_cast<std::size_t>(class_index(labels[i]));

    std::array<double, kNumClasses> d_logits{};
    for (int c = 0; c < kNumClasses; ++c) {
      const auto ci = static_cast<std::size_t>(c);
      d_logits[ci] = (p[ci] - (ci == yi ? 1.0 : 0.0)) * inv_n;
      grads.b2[ci] += d_logits[ci];
    }
    for (std::size_t j = 0; j < hid; ++j) {
      const double hv = h[j];
      double dh = 0.0;
      const double* w = model.w2.data() + j * kNumClasses;
      double* gw = grads.w2.data() + j * kNumClasses;
      for (int c = 0; c < kNumClasses; ++c) {
        const auto ci = static_cast<std::size_t>(c);
        gw[ci] += hv * d_logits[ci];
        dh += w[ci] * d_logits[ci];
      }
      d_hidden[j] = hv > 0.0 ? dh : 0.0;  // ReLU gradient, 0 at the kink
      grads.b1[j] += d_hidden[j];
    }
    for (std::size_t k = 0; k < in; ++k) {
      const double xv = row[k];
      if (xv == 0.0) continue;
      double* gw = grads.w1.data() + k * hid;
      for (std::size_t j = 0; j < hid; ++j) gw[j] += xv * d_hidden[j];
    }
  }
  return grads;
}

inline double mlp_loss(const MlpForward& forward, std::span<const VigilanceState> labels) {
  double loss = 0.0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const double p =
        forward.probs[i * kNumClasses + static_cast<std::size_t>(class_index(labels[i]))];
    loss += -std::log(std::max(p, 1e-300));
  }
  return loss / static_cast<double>(labels.size());
}

namespace detail {

inline constexpr std::uint64_t kMlpInitStream = 0x4D4C5049;   // "MLPI"
inline constexpr std::uint64_t kMlpEpochStream = 0x4D4C5045;  // "MLPE"

struct EpochEval {
  double loss = 0.0;
  double accuracy = 0.0;
  double macro_precision = 0.0;
  double macro_recall = 0.0;
};

inline EpochEval evaluate_mlp(const MLPModel& model, std::span<const double> x,
                              std::span<const VigilanceState> y) {
  const MlpForward fwd = mlp_forward(model, x, y.size());
  EpochEval eval;
  eval.loss = mlp_loss(fwd, y);
  std::vector<VigilanceState> predicted(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) {
    ClassProbabilities p{fwd.probs[i * 3], fwd.probs[i * 3 + 1], fwd.probs[i * 3 + 2]};
    predicted[i] = predicted_class(p);
  }
  const MetricsReport report = derive_metrics(confusion_matrix(y, predicted));
  eval.accuracy = report.accuracy;
  eval.macro_precision = (report.precision[0] + report.precision[1] + report.precision[2]) / 3.0;
  eval.macro_recall = (report.recall[0] + report.recall[1] + report.recall[2]) / 3.0;
  return eval;
}

}  // namespace detail

struct MlpFitResult {
  MLPModel model;
  std::vector<TrainingEpochStats> history;
};

// He-initialized, Adam-optimized minibatch training with a seeded shuffle per
// epoch. History gets one entry per epoch from a full pass over train and
// validation at epoch end. Inputs are expected standardized.
inline MlpFitResult fit_mlp(std::span<const double> x_train,
                            std::span<const VigilanceState> y_train,
                            std::span<const double> x_val,
                            std::span<const VigilanceState> y_val, std::size_t input_dim,
                            const MlpParams& params = {}) {
  require_arg(!y_train.empty(), "fit_mlp: empty training set");
  require_arg(!y_val.empty(), "fit_mlp: empty validation set");
  require_arg(x_train.size() == y_train.size() * input_dim, "fit_mlp: train shape mismatch");
  require_arg(x_val.size() == y_val.size() * input_dim, "fit_mlp: validation shape mismatch");
  require_arg(params.hidden_units > 0, "fit_mlp: hidden_units must be positive");
  require_arg(params.batch_size > 0, "fit_mlp: batch_size must be positive");
  require_arg(params.epochs >= 0, "fit_mlp: epochs must be non-negative");

  const std::size_t n = y_train.size();
  const auto in = input_dim;
  const auto hid = static_cast<std::size_t>(params.hidden_units);

  MlpFitResult result;
  MLPModel& model = result.model;
  model.input_dim = static_cast<int>(in);
  model.hidden_dim = params.hidden_units;
  model.w1.assign(in * hid, 0.0);
  model.b1.assign(hid, 0.0);
  model.w2.assign(hid * kNumClasses, 0.0);
  model.b2.assign(kNumClasses, 0.0);

  Rng init_rng = Rng::for_stream(params.seed, detail::kMlpInitStream);
  const double w1_scale = std::sqrt(2.0 / static_cast<double>(in));
  for (double& w : model.w1) w = init_rng.normal() * w1_scale;
  const double w2_scale = std::sqrt(2.0 / static_cast<double>(hid));
  for (double& w : model.w2) w = init_rng.normal() * w2_scale;

  AdamState state_w1(model.w1.size(), params.adam);
  AdamState state_b1(model.b1.size(), params.adam);
  AdamState state_w2(model.w2.size(), params.adam);
  AdamState state_b2(model.b2.size(), params.adam);

  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  const auto batch = static_cast<std::size_t>(params.batch_size);
  std::vector<double> batch_x(batch * in);
  std::vector<VigilanceState> batch_y(batch);

  for (int epoch = 1; epoch <= params.epochs; ++epoch) {
    Rng epoch_rng = Rng::for_stream(params.seed,
                                    detail::kMlpEpochStream + static_cast<std::uint64_t>(epoch));
    epoch_rng.shuffle(order);

    for (std::size_t start = 0; start < n; start += batch) {
      const std::size_t b = std::min(batch, n - start);
      for (std::size_t i = 0; i < b; ++i) {
        const std::size_t src = order[start + i];
        std::copy(x_train.begin() + static_cast<std::ptrdiff_t>(src * in),
                  x_train.begin() + static_cast<std::ptrdiff_t>((src + 1) * in),
                  batch_x.begin() + static_cast<std::ptrdiff_t>(i * in));
        batch_y[i] = y_train[src];
      }
      const std::span<const double> bx(batch_x.data(), b * in);
      const std::span<const VigilanceState> by(batch_y.data(), b);

      MlpForward fwd;
      MlpGradients grads;
      try {
        fwd = mlp_forward(model, bx, b);
        grads = mlp_backward(model, bx, b, fwd, by);
      } catch (const NumericError& e) {
        throw NumericError(std::string(e.what()) + " (epoch " + std::to_string(epoch) + ")");
      }
      adam_step(model.w1, grads.w1, state_w1);
      adam_step(model.b1, grads.b1, state_b1);
      adam_step(model.w2, grads.w2, state_w2);
      adam_step(model.b2, grads.b2, state_b2);
    }

    for (double w : model.w1) {
      if (!std::isfinite(w)) {
        throw NumericError("fit_mlp: non-finite parameter after epoch " +
                           std::to_string(epoch));
      }
    }

    const detail::EpochEval train_eval = detail::evaluate_mlp(model, x_train, y_train);
    const detail::EpochEval val_eval = detail::evaluate_mlp(model, x_val, y_val);
    TrainingEpochStats stats;
    stats.epoch = epoch;
    stats.train_loss = train_eval.loss;
    stats.train_accuracy = train_eval.accuracy;
    stats.train_precision = train_eval.macro_precision;
    stats.train_recall = train_eval.macro_recall;
    stats.val_loss = val_eval.loss;
    stats.val_accuracy = val_eval.accuracy;
    stats.val_precision = val_eval.macro_precision;
    stats.val_recall = val_eval.macro_recall;
    result.history.push_back(stats);
  }
  return result;
}

class MlpClassifier : public Classifier {
 public:
  explicit MlpClassifier(MlpParams params = {}) : params_(params) {}

  std::string kind() const override { return "mlp"; }

  void fit(std::span<const WindowedSample> train,
           std::span<const WindowedSample> validation = {}) override {
    require_arg(!train.empty(), "MlpClassifier: no training samples");
    require_arg(!validation.empty(),
                "MlpClassifier: the MLP requires a non-empty validation set");
    scaler_.fit(train);
    const std::size_t dim = train.front().features.size();

    auto flatten = [&](std::span<const WindowedSample> part, std::vector<double>& x,
                       std::vector<VigilanceState>& y) {
      x.resize(part.size() * dim);
      y.resize(part.size());
      for (std::size_t i = 0; i < part.size(); ++i) {
        std::vector<double> scaled = scaler_.transform(part[i].features);
        std::copy(scaled.begin(), scaled.end(), x.begin() + static_cast<std::ptrdiff_t>(i * dim));
        y[i] = part[i].label;
      }
    };
    std::vector<double> x_train, x_val;
    std::vector<VigilanceState> y_train, y_val;
    flatten(train, x_train, y_train);
    flatten(validation, x_val, y_val);

    auto fit_result = fit_mlp(x_train, y_train, x_val, y_val, dim, params_);
    model_ = std::move(fit_result.model);
    history_ = std::move(fit_result.history);
  }

  ClassProbabilities predict_proba(std::span<const double> features) const override {
    if (model_.input_dim == 0) throw std::logic_error("MlpClassifier: not fitted");
    const std::vector<double> scaled = scaler_.transform(features);
    const MlpForward fwd = mlp_forward(model_, scaled, 1);
    return {fwd.probs[0], fwd.probs[1], fwd.probs[2]};
  }

  const FeatureScaler* scaler() const override { return scaler_.fitted() ? &scaler_ : nullptr; }
  const std::vector<TrainingEpochStats>* training_history() const override {
    return &history_;
  }
  const MLPModel& model() const { return model_; }
  const MlpParams& params() const { return params_; }

  nlohmann::json params_to_json() const override {
    if (model_.input_dim == 0) throw std::logic_error("MlpClassifier: not fitted");
    return nlohmann::json{{"hidden_units", params_.hidden_units},
                          {"epochs", params_.epochs},
                          {"batch_size", params_.batch_size},
                          {"seed", params_.seed},
                          {"input_dim", model_.input_dim},
                          {"w1", model_.w1},
                          {"b1", model_.b1},
                          {"w2", model_.w2},
                          {"b2", model_.b2}};
  }

  void params_from_json(const nlohmann::json& doc) override {
    params_.hidden_units = doc.at("hidden_units").get<int>();
    params_.epochs = doc.at("epochs").get<int>();
    params_.batch_size = doc.at("batch_size").get<int>();
    params_.seed = doc.at("seed").get<std::uint64_t>();
    model_.input_dim = doc.at("input_dim").get<int>();
    model_.hidden_dim = params_.hidden_units;
    model_.w1 = doc.at("w1").get<std::vector<double>>();
    model_.b1 = doc.at("b1").get<std::vector<double>>();
    model_.w2 = doc.at("w2").get<std::vector<double>>();
    model_.b2 = doc.at("b2").get<std::vector<double>>();
  }

  void set_scaler(FeatureScaler scaler) { scaler_ = std::move(scaler); }

 private:
  MlpParams params_;
  FeatureScaler scaler_;
  MLPModel model_;
  std::vector<TrainingEpochStats> history_;
};

}  // namespace vigil
