#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "vigil/model.hpp"

namespace vigil {

// CART node. feature_index < 0 marks a leaf carrying class counts; internal
// nodes route feature < threshold to the left child.
struct TreeNode {
  int feature_index = -1;
  double threshold = 0.0;
  std::array<std::uint64_t, kNumClasses> class_counts{};
  std::unique_ptr<TreeNode> left;
  std::unique_ptr<TreeNode> right;

  bool is_leaf() const { return feature_index < 0; }
};

struct TreeParams {
  int max_depth = 25;
  int min_samples_split = 2;
};

inline double gini_impurity(const std::array<std::uint64_t, kNumClasses>& counts) {
  std::uint64_t total = 0;
  for (std::uint64_t c : counts) total += c;
  require_arg(total > 0, "gini_impurity: all class counts are zero");
  double impurity = 1.0;
  for (std::uint64_t c : counts) {
    const double frac = static_cast<double>(c) / static_cast<double>(total);
    impurity -= frac * frac;
  }
  return impurity;
}

struct SplitChoice {
  int feature_index = -1;
  double threshold = 0.0;
  double impurity_decrease = 0.0;
};

// Exhaustive search over midpoints between consecutive distinct values of each
// candidate feature. Ties on the decrease resolve to the lower feature index,
// then the lower threshold, independent of candidate order.
inline std::optional<SplitChoice> best_split(
    std::span<const WindowedSample> samples, std::span<const std::uint32_t> node_indices,
    std::span<const int> candidate_features) {
  require_arg(node_indices.size() >= 2, "best_split: need at least 2 samples");

  std::array<std::uint64_t, kNumClasses> parent_counts{};
  for (std::uint32_t i : node_indices) {
    parent_counts[static_cast<std::size_t>(class_index(samples[i].label))]++;
  }
  const double parent_gini = gini_impurity(parent_counts);
  const double n = static_cast<double>(node_indices.size());

  std::optional<SplitChoice> best;
  std::vector<std::pair<double, int>> order(node_indices.size());  // value, class

  for (int feature : candidate_features) {
    for (std::size_t i = 0; i < node_indices.size(); ++i) {
      const WindowedSample& s = samples[node_indices[i]];
      order[i] = {s.features[static_cast<std::size_t>(feature)], class_index(s.label)};
    }
    std::sort(order.begin(), order.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });

    std::array<std::uint64_t, kNumClasses> left{};
    for (std::size_t i = 0; i + 1 < order.size(); ++i) {
      left[static_cast<std::size_t>(order[i].second)]++;
      if (order[i + 1].first == order[i].first) continue;

      std::array<std::uint64_t, kNumClasses> right{};
      for (int c = 0; c < kNumClasses; ++c) {
        right[static_cast<std::size_t>(c)] =
            parent_counts[static_cast<std::size_t>(c)] - left[static_cast<std::size_t>(c)];
      }
      const double n_left = static_cast<double>(i + 1);
      const double n_right = n - n_left;
      const double decrease =
          parent_gini -
          (n_left * gini_impurity(left) + n_right * gini_impurity(right)) / n;
      if (decrease <= 0.0) continue;

      const double threshold = order[i].first + (order[i + 1].first - order[i].first) / 2.0;
      const bool better =
          !best || decrease > best->impurity_decrease ||
          (decrease == best->impurity_decrease &&
           (feature < best->feature_index ||
            (feature == best->feature_index && threshold < best->threshold)));
      if (better) best = SplitChoice{feature, threshold, decrease};
    }
  }
  return best;
}

namespace detail {

// Returns the candidate feature set for one node; forests plug in a random
// subset, plain trees use every feature.
using CandidateProvider = std::function<std::span<const int>()>;

inline std::unique_ptr<TreeNode> build_tree(std::span<const WindowedSample> samples,
                                            std::vector<std::uint32_t>& node_indices,
                                            int depth, const TreeParams& params,
                                            const CandidateProvider& candidates) {
  auto node = std::make_unique<TreeNode>();
  for (std::uint32_t i : node_indices) {
    node->class_counts[static_cast<std::size_t>(class_index(samples[i].label))]++;
  }

  int present = 0;
  for (std::uint64_t c : node->class_counts) present += c > 0 ? 1 : 0;
  const bool pure = present <= 1;
  if (pure || depth >= params.max_depth ||
      node_indices.size() < static_cast<std::size_t>(params.min_samples_split)) {
    return node;
  }

  const auto choice = best_split(samples, node_indices, candidates());
  if (!choice) return node;

  std::vector<std::uint32_t> left_indices, right_indices;
  left_indices.reserve(node_indices.size());
  right_indices.reserve(node_indices.size());
  for (std::uint32_t i : node_indices) {
    const double value =
        samples[i].features[static_cast<std::size_t>(choice->feature_index)];
    (value < choice->threshold ? left_indices : right_indices).push_back(i);
  }
  node_indices.clear();
  node_indices.shrink_to_fit();

  node->feature_index = choice->feature_index;
  node->threshold = choice->threshold;
  node->left = build_tree(samples, left_indices, depth + 1, params, candidates);
  node->right = build_tree(samples, right_indices, depth + 1, params, candidates);
  return node;
}

}  // namespace detail

inline std::unique_ptr<TreeNode> fit_tree(std::span<const WindowedSample> samples,
                                          const TreeParams& params = {}) {
  require_arg(!samples.empty(), "fit_tree: no samples");
  const std::size_t dim = samples.front().features.size();
  std::vector<int> all_features(dim);
  for (std::size_t f = 0; f < dim; ++f) all_features[f] = static_cast<int>(f);
  std::vector<std::uint32_t> indices(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) indices[i] = static_cast<std::uint32_t>(i);

  detail::CandidateProvider all = [&all_features]() {
    return std::span<const int>(all_features);
  };
  return detail::build_tree(samples, indices, 0, params, all);
}

inline ClassProbabilities predict_tree(const TreeNode& root,
                                       std::span<const double> features) {
  for (std::size_t f = 0; f < features.size(); ++f) {
    if (!std::isfinite(features[f])) {
      throw std::invalid_argument("predict_tree: non-finite feature at index " +
                                  std::to_string(f));
    }
  }
  const TreeNode* node = &root;
  while (!node->is_leaf()) {
    require_arg(static_cast<std::size_t>(node->feature_index) < features.size(),
                "predict_tree: feature dimension smaller than tree expects");
    node = features[static_cast<std::size_t>(node->feature_index)] < node->threshold
               ? node->left.get()
               : node->right.get();
  }
  std::uint64_t total = 0;
  for (std::uint64_t c : node->class_counts) total += c;
  ClassProbabilities probs{};
  for (int c = 0; c < kNumClasses; ++c) {
    probs[static_cast<std::size_t>(c)] =
        static_cast<double>(node->class_counts[static_cast<std::size_t>(c)]) /
        static_cast<double>(total);
  }
  return probs;
}

namespace detail {

inline nlohmann::json tree_to_json(const TreeNode& node) {
  if (node.is_leaf()) {
    return nlohmann::json{{"counts", node.class_counts}};
  }
  return nlohmann::json{{"feature", node.feature_index},
                        {"threshold", node.threshold},
                        {"left", tree_to_json(*node.left)},
                        {"right", tree_to_json(*node.right)}};
}

inline std::unique_ptr<TreeNode> tree_from_json(const nlohmann::json& doc) {
  auto node = std::make_unique<TreeNode>();
  if (doc.contains("counts")) {
    const auto counts = doc.at("counts").get<std::vector<std::uint64_t>>();
    if (counts.size() != kNumClasses) throw SchemaError("tree node: bad counts length");
    std::copy(counts.begin(), counts.end(), node->class_counts.begin());
    return node;
  }
  node->feature_index = doc.at("feature").get<int>();
  node->threshold = doc.at("threshold").get<double>();
  node->left = tree_from_json(doc.at("left"));
  node->right = tree_from_json(doc.at("right"));
  return node;
}

}  // namespace detail

class DecisionTreeClassifier : public Classifier {
 public:
  explicit DecisionTreeClassifier(TreeParams params = {}) : params_(params) {}

  std::string kind() const override { return "decision_tree"; }

  void fit(std::span<const WindowedSample> train,
           std::span<const WindowedSample> = {}) override {
    root_ = fit_tree(train, params_);
  }

  ClassProbabilities predict_proba(std::span<const double> features) const override {
    if (!root_) throw std::logic_error("DecisionTreeClassifier: not fitted");
    return predict_tree(*root_, features);
  }

  const TreeNode* root() const { return root_.get(); }
  const TreeParams& params() const { return params_; }

  nlohmann::json params_to_json() const override {
    if (!root_) throw std::logic_error("DecisionTreeClassifier: not fitted");
    return nlohmann::json{{"max_depth", params_.max_depth},
                          {"min_samples_split", params_.min_samples_split},
                          {"tree", detail::tree_to_json(*root_)}};
  }

  void params_from_json(const nlohmann::json& doc) override {
    params_.max_depth = doc.at("max_depth").get<int>();
    params_.min_samples_split = doc.at("min_samples_split").get<int>();
    root_ = detail::tree_from_json(doc.at("tree"));
  }

 private:
  TreeParams params_;
  std::unique_ptr<TreeNode> root_;
};

}  // namespace vigil
