#pragma once

#include <cmath>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "vigil/decision_tree.hpp"
#include "vigil/rng.hpp"

namespace vigil {

struct ForestParams {
  int n_trees = 100;
  // 0 selects round(sqrt(feature_count)) at fit time (14 for 210 features).
  int features_per_split = 0;
  bool bootstrap = true;
  std::uint64_t seed = 0;
  TreeParams tree;
};

inline int resolve_features_per_split(int requested, std::size_t feature_count) {
  if (requested <= 0) {
    return static_cast<int>(std::llround(std::sqrt(static_cast<double>(feature_count))));
  }
  require_arg(static_cast<std::size_t>(requested) <= feature_count,
              "ForestParams: features_per_split exceeds feature count");
  return requested;
}

// Bagged CART ensemble. Each tree gets an independent rng stream derived from
// (seed, tree index), so results do not depend on build order.
inline std::vector<std::unique_ptr<TreeNode>> fit_forest(
    std::span<const WindowedSample> samples, const ForestParams& params) {
  require_arg(!samples.empty(), "fit_forest: no samples");
  require_arg(params.n_trees > 0, "fit_forest: n_trees must be positive");

  const std::size_t dim = samples.front().features.size();
  const int per_split = resolve_features_per_split(params.features_per_split, dim);

  std::vector<std::unique_ptr<TreeNode>> forest;
  forest.reserve(static_cast<std::size_t>(params.n_trees));

  for (int t = 0; t < params.n_trees; ++t) {
    Rng rng = Rng::for_stream(params.seed, static_cast<std::uint64_t>(t));

    std::vector<std::uint32_t> indices(samples.size());
    if (params.bootstrap) {
      for (auto& i : indices) i = static_cast<std::uint32_t>(rng.index(samples.size()));
    } else {
      for (std::size_t i = 0; i < samples.size(); ++i) indices[i] = static_cast<std::uint32_t>(i);
    }

    detail::CandidateProvider provider;
    std::vector<int> pool(dim);
    for (std::size_t f = 0; f < dim; ++f) pool[f] = static_cast<int>(f);
    if (static_cast<std::size_t>(per_split) >= dim) {
      provider = [pool = std::move(pool)]() { return std::span<const int>(pool); };
    } else {
      // Partial Fisher-Yates re-draws a fresh subset for every node.
      provider = [pool = std::move(pool), per_split, &rng]() mutable {
        for (int j = 0; j < per_split; ++j) {
          const std::size_t pick =
              static_cast<std::size_t>(j) + rng.index(pool.size() - static_cast<std::size_t>(j));
          std::swap(pool[static_cast<std::size_t>(j)], pool[pick]);
        }
        return std::span<const int>(pool.data(), static_cast<std::size_t>(per_split));
      };
    }

    forest.push_back(detail::build_tree(samples, indices, 0, params.tree, provider));
  }
  return forest;
}

// Probability of class c = fraction of trees whose argmax vote is c.
inline ClassProbabilities predict_forest(
    std::span<const std::unique_ptr<TreeNode>> forest, std::span<const double> features) {
  if (forest.empty()) throw std::logic_error("predict_forest: empty forest");
  std::array<std::uint64_t, kNumClasses> votes{};
  for (const auto& tree : forest) {
    const VigilanceState vote = predicted_class(predict_tree(*tree, features));
    votes[static_cast<std::size_t>(class_index(vote))]++;
  }
  ClassProbabilities probs{};
  for (int c = 0; c < kNumClasses; ++c) {
    probs[static_cast<std::size_t>(c)] =
        static_cast<double>(votes[static_cast<std::size_t>(c)]) /
        static_cast<double>(forest.size());
  }
  return probs;
}

class RandomForestClassifier : public Classifier {
 public:
  explicit RandomForestClassifier(ForestParams params = {}) : params_(params) {}

  std::string kind() const override { return "random_forest"; }

  void fit(std::span<const WindowedSample> train,
           std::span<const WindowedSample> = {}) override {
    forest_ = fit_forest(train, params_);
  }

  ClassProbabilities predict_proba(std::span<const double> features) const override {
    if (forest_.empty()) throw std::logic_error("RandomForestClassifier: not fitted");
    return predict_forest(forest_, features);
  }

  const std::vector<std::unique_ptr<TreeNode>>& forest() const { return forest_; }
  const ForestParams& params() const { return params_; }

  nlohmann::json params_to_json() const override {
    if (forest_.empty()) throw std::logic_error("RandomForestClassifier: not fitted");
    nlohmann::json trees = nlohmann::json::array();
    for (const auto& tree : forest_) trees.push_back(detail::tree_to_json(*tree));
    return nlohmann::json{{"n_trees", params_.n_trees},
                          {"features_per_split", params_.features_per_split},
                          {"bootstrap", params_.bootstrap},
                          {"seed", params_.seed},
                          {"max_depth", params_.tree.max_depth},
                          {"min_samples_split", params_.tree.min_samples_split},
                          {"trees", std::move(trees)}};
  }

  void params_from_json(const nlohmann::json& doc) override {
    params_.n_trees = doc.at("n_trees").get<int>();
    params_.features_per_split = doc.at("features_per_split").get<int>();
    params_.bootstrap = doc.at("bootstrap").get<bool>();
    params_.seed = doc.at("seed").get<std::uint64_t>();
    params_.tree.max_depth = doc.at("max_depth").get<int>();
    params_.tree.min_samples_split = doc.at("min_samples_split").get<int>();
    forest_.clear();
    for (const auto& tree : doc.at("trees")) {
      forest_.push_back(detail::tree_from_json(tree));
    }
  }

 private:
  ForestParams params_;
  std::vector<std::unique_ptr<TreeNode>> forest_;
};

}  // namespace vigil
