#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "vigil/model.hpp"

namespace vigil {

namespace detail {

// Max-subtracted softmax over one logit row.
inline void stable_softmax(std::span<const double> logits, std::span<double> probs) {
  const double max_logit = *std::max_element(logits.begin(), logits.end());
  double sum = 0.0;
  for (std::size_t c = 0; c < logits.size(); ++c) {
    probs[c] = std::exp(logits[c] - max_logit);
    sum += probs[c];
  }
  for (std::size_t c = 0; c < logits.size(); ++c) probs[c] /= sum;
}

}  // namespace detail

struct LogRegParams {
  double learning_rate = 0.1;
  int epochs = 200;
  double l2 = 0.0;
  bool one_vs_rest = false;  // sigmoid one-vs-rest instead of softmax
};

// Linear scores weights[c * n_features + f] * x[f] + biases[c]. In softmax mode
// the rows form one multinomial model; in one-vs-rest mode each row is an
// independent binary sigmoid model.
struct LogRegModel {
  std::size_t n_features = 0;
  std::vector<double> weights;  // kNumClasses x n_features, row-major
  std::array<double, kNumClasses> biases{};
  bool one_vs_rest = false;
};

inline ClassProbabilities logreg_proba(const LogRegModel& model,
                                       std::span<const double> features) {
  require_arg(features.size() == model.n_features,
              "logreg_proba: feature dimension mismatch");
  std::array<double, kNumClasses> scores{};
  for (int c = 0; c < kNumClasses; ++c) {
    const double* row = model.weights.data() + static_cast<std::size_t>(c) * model.n_features;
    double s = model.biases[static_cast<std::size_t>(c)];
    for (std::size_t f = 0; f < model.n_features; ++f) s += row[f] * features[f];
    scores[static_cast<std::size_t>(c)] = s;
  }
  ClassProbabilities probs{};
  if (!model.one_vs_rest) {
    detail::stable_softmax(scores, probs);
    return probs;
  }
  double sum = 0.0;
  for (int c = 0; c < kNumClasses; ++c) {
    probs[static_cast<std::size_t>(c)] =
        1.0 / (1.0 + std::exp(-scores[static_cast<std::size_t>(c)]));
    sum += probs[static_cast<std::size_t>(c)];
  }
  if (sum <= 0.0) return {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};
  for (double& p : probs) p /= sum;
  return probs;
}

struct LogRegGradient {
  std::vector<double> weights;
  std::array<double, kNumClasses> biases{};
};

// Mean softmax cross-entropy over the batch plus (l2/2)*||W||^2; gradient is
// optional. X is row-major n x n_features.
inline double logreg_loss_and_gradient(const LogRegModel& model,
                                       std::span<const double> x,
                                       std::span<const VigilanceState> y, double l2,
                                       LogRegGradient* gradient) {
  const std::size_t dim = model.n_features;
  const std::size_t n = y.size();
  require_arg(n > 0 && x.size() == n * dim, "logreg_loss_and_gradient: shape mismatch");

  if (gradient) {
    gradient->weights.assign(model.weights.size(), 0.0);
    gradient->biases.fill(0.0);
  }

  double loss = 0.0;
  std::array<double, kNumClasses> scores{};
  ClassProbabilities probs{};
  for (std::size_t i = 0; i < n; ++i) {
    const double* row = x.data() + i * dim;
    for (int c = 0; c < kNumClasses; ++c) {
      const double* w = model.weights.data() + static_cast<std::size_t>(c) * dim;
      double s = model.biases[static_cast<std::size_t>(c)];
      for (std::size_t f = 0; f < dim; ++f) s += w[f] * row[f];
      scores[static_cast<std::size_t>(c)] = s;
    }
    detail::stable_softmax(scores, probs);
    const auto yi = static_cast<std::size_t>(class_index(y[i]));
    loss += -std::log(std::max(probs[yi], 1e-300));
    if (gradient) {
      for (int c = 0; c < kNumClasses; ++c) {
        const auto ci = static_cast<std::size_t>(c);
        const double delta = probs[ci] - (ci == yi ? 1.0 : 0.0);
        double* gw = gradient->weights.data() + ci * dim;
        for (std::size_t f = 0; f < dim; ++f) gw[f] += delta * row[f];
        gradient->biases[ci] += delta;
      }
    }
  }

  loss /= static_cast<double>(n);
  if (gradient) {
    const double inv_n = 1.0 / static_cast<double>(n);
    for (double& g : gradient->weights) g *= inv_n;
    for (double& g : gradient->biases) g *= inv_n;
  }
  if (l2 > 0.0) {
    double reg = 0.0;
    for (std::size_t i = 0; i < model.weights.size(); ++i) {
      reg += model.weights[i] * model.weights[i];
      if (gradient) gradient->weights[i] += l2 * model.weights[i];
    }
    loss += 0.5 * l2 * reg;
  }
  return loss;
}

struct LogRegFitResult {
  LogRegModel model;
  std::vector<double> epoch_losses;  // loss after each epoch's update
};

namespace detail {

// Binary sigmoid cross-entropy for one one-vs-rest row.
inline double binary_loss_and_gradient(std::span<const double> w, double b,
                                       std::span<const double> x,
                                       std::span<const char> positive, double l2,
                                       std::vector<double>* gw, double* gb) {
  const std::size_t dim = w.size();
  const std::size_t n = positive.size();
  if (gw) {
    gw->assign(dim, 0.0);
    *gb = 0.0;
  }
  double loss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double* row = x.data() + i * dim;
    double s = b;
    for (std::size_t f = 0; f < dim; ++f) s += w[f] * row[f];
    const double p = 1.0 / (1.0 + std::exp(-s));
    const double target = positive[i] ? 1.0 : 0.0;
    loss += -(target * std::log(std::max(p, 1e-300)) +
              (1.0 - target) * std::log(std::max(1.0 - p, 1e-300)));
    if (gw) {
      const double delta = p - target;
      for (std::size_t f = 0; f < dim; ++f) (*gw)[f] += delta * row[f];
      *gb += delta;
    }
  }
  loss /= static_cast<double>(n);
  if (gw) {
    const double inv_n = 1.0 / static_cast<double>(n);
    for (double& g : *gw) g *= inv_n;
    *gb *= inv_n;
  }
  if (l2 > 0.0) {
    double reg = 0.0;
    for (std::size_t f = 0; f < dim; ++f) {
      reg += w[f] * w[f];
      if (gw) (*gw)[f] += l2 * w[f];
    }
    loss += 0.5 * l2 * reg;
  }
  return loss;
}

}  // namespace detail

// Full-batch gradient descent from zero weights. The step size starts at
// params.learning_rate and is halved whenever a step would raise the loss,
// which keeps the per-epoch loss non-increasing.
inline LogRegFitResult fit_logreg(std::span<const double> x,
                                  std::span<const VigilanceState> y, std::size_t dim,
                                  const LogRegParams& params = {}) {
  const std::size_t n = y.size();
  require_arg(n > 0 && x.size() == n * dim, "fit_logreg: shape mismatch");
  require_arg(params.learning_rate > 0.0, "fit_logreg: learning_rate must be positive");
  require_arg(params.epochs >= 0, "fit_logreg: epochs must be non-negative");

  LogRegFitResult result;
  result.model.n_features = dim;
  result.model.weights.assign(static_cast<std::size_t>(kNumClasses) * dim, 0.0);
  result.model.one_vs_rest = params.one_vs_rest;

  if (!params.one_vs_rest) {
    LogRegGradient grad;
    double lr = params.learning_rate;
    double loss = logreg_loss_and_gradient(result.model, x, y, params.l2, &grad);
    for (int epoch = 1; epoch <= params.epochs; ++epoch) {
      LogRegModel trial = result.model;
      double trial_loss = 0.0;
      for (;;) {
        trial = result.model;
        for (std::size_t i = 0; i < trial.weights.size(); ++i) {
          trial.weights[i] -= lr * grad.weights[i];
        }
        for (int c = 0; c < kNumClasses; ++c) {
          trial.biases[static_cast<std::size_t>(c)] -=
              lr * grad.biases[static_cast<std::size_t>(c)];
        }
        trial_loss = logreg_loss_and_gradient(trial, x, y, params.l2, nullptr);
        if (!std::isfinite(trial_loss)) {
          throw NumericError("fit_logreg: non-finite loss at epoch " +
                             std::to_string(epoch));
        }
        if (trial_loss <= loss + 1e-9 || lr < 1e-12) break;
        lr *= 0.5;
      }
      result.model = std::move(trial);
      loss = logreg_loss_and_gradient(result.model, x, y, params.l2, &grad);
      result.epoch_losses.push_back(loss);
    }
    return result;
  }

  // One-vs-rest: three independent binary trainers sharing the epoch budget.
  for (int c = 0; c < kNumClasses; ++c) {
    std::vector<char> positive(n);
    for (std::size_t i = 0; i < n; ++i) positive[i] = class_index(y[i]) == c ? 1 : 0;
    std::vector<double> w(dim, 0.0), gw;
    double b = 0.0, gb = 0.0;
    double lr = params.learning_rate;
    double loss = detail::binary_loss_and_gradient(w, b, x, positive, params.l2, &gw, &gb);
    for (int epoch = 1; epoch <= params.epochs; ++epoch) {
      std::vector<double> trial_w;
      double trial_b = 0.0, trial_loss = 0.0;
      for (;;) {
        trial_w = w;
        for (std::size_t f = 0; f < dim; ++f) trial_w[f] -= lr * gw[f];
        trial_b = b - lr * gb;
        trial_loss = detail::binary_loss_and_gradient(trial_w, trial_b, x, positive,
                                                      params.l2, nullptr, nullptr);
        if (!std::isfinite(trial_loss)) {
          throw NumericError("fit_logreg: non-finite loss at epoch " +
                             std::to_string(epoch));
        }
        if (trial_loss <= loss + 1e-9 || lr < 1e-12) break;
        lr *= 0.5;
      }
      w = std::move(trial_w);
      b = trial_b;
      loss = detail::binary_loss_and_gradient(w, b, x, positive, params.l2, &gw, &gb);
      if (c == 0) result.epoch_losses.push_back(loss);
    }
    std::copy(w.begin(), w.end(),
              result.model.weights.begin() + static_cast<std::size_t>(c) * dim);
    result.model.biases[static_cast<std::size_t>(c)] = b;
  }
  return result;
}

class LogisticRegressionClassifier : public Classifier {
 public:
  explicit LogisticRegressionClassifier(LogRegParams params = {}) : params_(params) {}

  std::string kind() const override { return "logistic_regression"; }

  void fit(std::span<const WindowedSample> train,
           std::span<const WindowedSample> = {}) override {
    require_arg(!train.empty(), "LogisticRegressionClassifier: no training samples");
    scaler_.fit(train);
    const std::size_t dim = train.front().features.size();
    std::vector<double> x(train.size() * dim);
    std::vector<VigilanceState> y(train.size());
    for (std::size_t i = 0; i < train.size(); ++i) {
      std::vector<double> scaled = scaler_.transform(train[i].features);
      std::copy(scaled.begin(), scaled.end(), x.begin() + static_cast<std::ptrdiff_t>(i * dim));
      y[i] = train[i].label;
    }
    auto fit_result = fit_logreg(x, y, dim, params_);
    model_ = std::move(fit_result.model);
    epoch_losses_ = std::move(fit_result.epoch_losses);
  }

  ClassProbabilities predict_proba(std::span<const double> features) const override {
    if (model_.n_features == 0) {
      throw std::logic_error("LogisticRegressionClassifier: not fitted");
    }
    return logreg_proba(model_, scaler_.transform(features));
  }

  const FeatureScaler* scaler() const override { return scaler_.fitted() ? &scaler_ : nullptr; }
  const LogRegModel& model() const { return model_; }
  const std::vector<double>& epoch_losses() const { return epoch_losses_; }

  nlohmann::json params_to_json() const override {
    if (model_.n_features == 0) {
      throw std::logic_error("LogisticRegressionClassifier: not fitted");
    }
    return nlohmann::json{{"learning_rate", params_.learning_rate},
                          {"epochs", params_.epochs},
                          {"l2", params_.l2},
                          {"one_vs_rest", model_.one_vs_rest},
                          {"n_features", model_.n_features},
                          {"weights", model_.weights},
                          {"biases", model_.biases}};
  }

  void params_from_json(const nlohmann::json& doc) override {
    params_.learning_rate = doc.at("learning_rate").get<double>();
    params_.epochs = doc.at("epochs").get<int>();
    params_.l2 = doc.at("l2").get<double>();
    params_.one_vs_rest = doc.at("one_vs_rest").get<bool>();
    model_.one_vs_rest = params_.one_vs_rest;
    model_.n_features = doc.at("n_features").get<std::size_t>();
    model_.weights = doc.at("weights").get<std::vector<double>>();
    const auto biases = doc.at("biases").get<std::vector<double>>();
    if (biases.size() != kNumClasses) throw SchemaError("logistic_regression: bad biases");
    std::copy(biases.begin(), biases.end(), model_.biases.begin());
  }

  void set_scaler(FeatureScaler scaler) { scaler_ = std::move(scaler); }

 private:
  LogRegParams params_;
  FeatureScaler scaler_;
  LogRegModel model_;
  std::vector<double> epoch_losses_;
};

}  // namespace vigil
