#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "vigil/model.hpp"

namespace vigil {

struct GaussianNBParams {
  // Floor = scale * max per-feature variance over the training set.
  double variance_floor_scale = 1e-9;
};

struct GaussianNBModel {
  std::array<double, kNumClasses> priors{};
  std::array<std::vector<double>, kNumClasses> means;
  std::array<std::vector<double>, kNumClasses> variances;
  double variance_floor = 0.0;
};

inline GaussianNBModel fit_gaussian_nb(std::span<const WindowedSample> samples,
                                       const GaussianNBParams& params = {}) {
  require_arg(!samples.empty(), "fit_gaussian_nb: no samples");
  const std::size_t dim = samples.front().features.size();

  std::array<std::uint64_t, kNumClasses> counts{};
  for (const WindowedSample& s : samples) {
    counts[static_cast<std::size_t>(class_index(s.label))]++;
  }
  std::string missing;
  for (int c = 0; c < kNumClasses; ++c) {
    if (counts[static_cast<std::size_t>(c)] == 0) {
      if (!missing.empty()) missing += ", ";
      missing += state_code(state_from_index(c));
    }
  }
  if (!missing.empty()) {
    throw std::invalid_argument("fit_gaussian_nb: no samples for class " + missing);
  }

  GaussianNBModel model;
  for (int c = 0; c < kNumClasses; ++c) {
    model.priors[static_cast<std::size_t>(c)] =
        static_cast<double>(counts[static_cast<std::size_t>(c)]) /
        static_cast<double>(samples.size());
    model.means[static_cast<std::size_t>(c)].assign(dim, 0.0);
    model.variances[static_cast<std::size_t>(c)].assign(dim, 0.0);
  }

  for (const WindowedSample& s : samples) {
    auto& mean = model.means[static_cast<std::size_t>(class_index(s.label))];
    for (std::size_t f = 0; f < dim; ++f) mean[f] += s.features[f];
  }
  for (int c = 0; c < kNumClasses; ++c) {
    const double n = static_cast<double>(counts[static_cast<std::size_t>(c)]);
    for (double& m : model.means[static_cast<std::size_t>(c)]) m /= n;
  }
  for (const WindowedSample& s : samples) {
    const auto ci = static_cast<std::size_t>(class_index(s.label));
    for (std::size_t f = 0; f < dim; ++f) {
      const double d = s.features[f] - model.means[ci][f];
      model.variances[ci][f] += d * d;
    }
  }
  for (int c = 0; c < kNumClasses; ++c) {
    const double n = static_cast<double>(counts[static_cast<std::size_t>(c)]);
    for (double& v : model.variances[static_cast<std::size_t>(c)]) v /= n;
  }

  // Overall per-feature variance sets the floor's scale.
  std::vector<double> overall_mean(dim, 0.0), overall_var(dim, 0.0);
  for (const WindowedSample& s : samples) {
    for (std::size_t f = 0; f < dim; ++f) overall_mean[f] += s.features[f];
  }
  for (double& m : overall_mean) m /= static_cast<double>(samples.size());
  for (const WindowedSample& s : samples) {
    for (std::size_t f = 0; f < dim; ++f) {
      const double d = s.features[f] - overall_mean[f];
      overall_var[f] += d * d;
    }
  }
  double max_var = 0.0;
  for (double v : overall_var) {
    max_var = std::max(max_var, v / static_cast<double>(samples.size()));
  }
  model.variance_floor = params.variance_floor_scale * max_var;
  if (!(model.variance_floor > 0.0)) model.variance_floor = 1e-12;

  for (int c = 0; c < kNumClasses; ++c) {
    for (double& v : model.variances[static_cast<std::size_t>(c)]) {
      v = std::max(v, model.variance_floor);
    }
  }
  return model;
}

inline ClassProbabilities predict_gaussian_nb(const GaussianNBModel& model,
                                              std::span<const double> features) {
  const std::size_t dim = model.means[0].size();
  require_arg(features.size() == dim, "predict_gaussian_nb: feature dimension mismatch");
  for (std::size_t f = 0; f < dim; ++f) {
    require_arg(std::isfinite(features[f]), "predict_gaussian_nb: non-finite feature");
  }

  std::array<double, kNumClasses> log_posterior{};
  for (int c = 0; c < kNumClasses; ++c) {
    const auto ci = static_cast<std::size_t>(c);
    double lp = std::log(model.priors[ci]);
    for (std::size_t f = 0; f < dim; ++f) {
      const double var = model.variances[ci][f];
      const double d = features[f] - model.means[ci][f];
      lp += -0.5 * std::log(2.0 * std::numbers::pi * var) - d * d / (2.0 * var);
    }
    log_posterior[ci] = lp;
  }

  const double max_lp = *std::max_element(log_posterior.begin(), log_posterior.end());
  ClassProbabilities probs{};
  double sum = 0.0;
  for (int c = 0; c < kNumClasses; ++c) {
    probs[static_cast<std::size_t>(c)] = std::exp(log_posterior[static_cast<std::size_t>(c)] - max_lp);
    sum += probs[static_cast<std::size_t>(c)];
  }
  for (double& p : probs) p /= sum;
  return probs;
}

class NaiveBayesClassifier : public Classifier {
 public:
  explicit NaiveBayesClassifier(GaussianNBParams params = {}) : params_(params) {}

  std::string kind() const override { return "gaussian_nb"; }

  void fit(std::span<const WindowedSample> train,
           std::span<const WindowedSample> = {}) override {
    model_ = fit_gaussian_nb(train, params_);
    fitted_ = true;
  }

  ClassProbabilities predict_proba(std::span<const double> features) const override {
    if (!fitted_) throw std::logic_error("NaiveBayesClassifier: not fitted");
    return predict_gaussian_nb(model_, features);
  }

  const GaussianNBModel& model() const { return model_; }

  nlohmann::json params_to_json() const override {
    if (!fitted_) throw std::logic_error("NaiveBayesClassifier: not fitted");
    return nlohmann::json{{"variance_floor_scale", params_.variance_floor_scale},
                          {"variance_floor", model_.variance_floor},
                          {"priors", model_.priors},
                          {"means", model_.means},
                          {"variances", model_.variances}};
  }

  void params_from_json(const nlohmann::json& doc) override {
    params_.variance_floor_scale = doc.at("variance_floor_scale").get<double>();
    model_.variance_floor = doc.at("variance_floor").get<double>();
    const auto priors = doc.at("priors").get<std::vector<double>>();
    if (priors.size() != kNumClasses) throw SchemaError("gaussian_nb: bad priors length");
    std::copy(priors.begin(), priors.end(), model_.priors.begin());
    for (int c = 0; c < kNumClasses; ++c) {
      model_.means[static_cast<std::size_t>(c)] =
          doc.at("means").at(static_cast<std::size_t>(c)).get<std::vector<double>>();
      model_.variances[static_cast<std::size_t>(c)] =
          doc.at("variances").at(static_cast<std::size_t>(c)).get<std::vector<double>>();
    }
    fitted_ = true;
  }

 private:
  GaussianNBParams params_;
  GaussianNBModel model_;
  bool fitted_ = false;
};

}  // namespace vigil
