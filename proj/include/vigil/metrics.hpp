#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "vigil/common.hpp"

namespace vigil {

// Rows are true classes, columns are predicted classes, index order P, S, W.
struct ConfusionMatrix {
  std::array<std::array<std::uint64_t, kNumClasses>, kNumClasses> counts{};

  std::uint64_t total() const {
    std::uint64_t sum = 0;
    for (const auto& row : counts) {
      for (std::uint64_t c : row) sum += c;
    }
    return sum;
  }

  std::uint64_t row_sum(int true_class) const {
    const auto& row = counts[static_cast<std::size_t>(true_class)];
    return std::accumulate(row.begin(), row.end(), std::uint64_t{0});
  }

  std::uint64_t column_sum(int predicted_class) const {
    std::uint64_t sum = 0;
    for (const auto& row : counts) sum += row[static_cast<std::size_t>(predicted_class)];
    return sum;
  }
};

inline ConfusionMatrix confusion_matrix(std::span<const VigilanceState> truth,
                                        std::span<const VigilanceState> predicted) {
  require_arg(truth.size() == predicted.size(),
              "confusion_matrix: " + std::to_string(truth.size()) + " true labels vs " +
                  std::to_string(predicted.size()) + " predictions");
  require_arg(!truth.empty(), "confusion_matrix: no samples");
  ConfusionMatrix cm;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    cm.counts[static_cast<std::size_t>(class_index(truth[i]))]
             [static_cast<std::size_t>(class_index(predicted[i]))]++;
  }
  return cm;
}

struct MetricsReport {
  double accuracy = 0.0;
  std::array<double, kNumClasses> precision{};
  std::array<double, kNumClasses> recall{};
  std::array<double, kNumClasses> f1{};
  double macro_f1 = 0.0;
  std::array<std::optional<double>, kNumClasses> auc{};  // one-vs-rest
  std::optional<double> macro_auc;
  std::vector<std::string> warnings;
};

// Accuracy, per-class precision/recall/F1 and macro F1 from a confusion
// matrix. Zero denominators yield 0 plus a warning instead of NaN.
inline MetricsReport derive_metrics(const ConfusionMatrix& cm) {
  const std::uint64_t total = cm.total();
  require_arg(total > 0, "derive_metrics: empty confusion matrix");

  MetricsReport report;
  std::uint64_t trace = 0;
  for (int c = 0; c < kNumClasses; ++c) {
    trace += cm.counts[static_cast<std::size_t>(c)][static_cast<std::size_t>(c)];
  }
  report.accuracy = static_cast<double>(trace) / static_cast<double>(total);

  for (int c = 0; c < kNumClasses; ++c) {
    const auto ci = static_cast<std::size_t>(c);
    const std::uint64_t tp = cm.counts[ci][ci];
    const std::uint64_t col = cm.column_sum(c);
    const std::uint64_t row = cm.row_sum(c);
    const char code = state_code(state_from_index(c));

    if (col == 0) {
      report.precision[ci] = 0.0;
      report.warnings.push_back(std::string("precision undefined for class ") + code +
                                " (no predictions); reported as 0");
    } else {
      report.precision[ci] = static_cast<double>(tp) / static_cast<double>(col);
    }
    if (row == 0) {
      report.recall[ci] = 0.0;
      report.warnings.push_back(std::string("recall undefined for class ") + code +
                                " (no true samples); reported as 0");
    } else {
      report.recall[ci] = static_cast<double>(tp) / static_cast<double>(row);
    }
    const double pr_sum = report.precision[ci] + report.recall[ci];
    report.f1[ci] = pr_sum > 0.0 ? 2.0 * report.precision[ci] * report.recall[ci] / pr_sum
                                 : 0.0;
  }
  report.macro_f1 = (report.f1[0] + report.f1[1] + report.f1[2]) / 3.0;
  return report;
}

struct AucResult {
  std::array<std::optional<double>, kNumClasses> per_class{};
  std::optional<double> macro;
  std::vector<std::string> skipped;
};

// One-vs-rest AUC by the Mann-Whitney rank statistic with midrank ties; equal
// to the probability that a random positive outranks a random negative.
inline AucResult roc_auc_ovr(std::span<const VigilanceState> truth,
                             std::span<const ClassProbabilities> probabilities) {
  require_arg(truth.size() == probabilities.size(), "roc_auc_ovr: length mismatch");
  require_arg(!truth.empty(), "roc_auc_ovr: no samples");
  for (std::size_t i = 0; i < probabilities.size(); ++i) {
    const double sum = probabilities[i][0] + probabilities[i][1] + probabilities[i][2];
    require_arg(std::fabs(sum - 1.0) <= 1e-6,
                "roc_auc_ovr: probability row " + std::to_string(i) +
                    " sums to " + std::to_string(sum));
  }
  {
    std::array<bool, kNumClasses> seen{};
    for (VigilanceState s : truth) seen[static_cast<std::size_t>(class_index(s))] = true;
    const int distinct = (seen[0] ? 1 : 0) + (seen[1] ? 1 : 0) + (seen[2] ? 1 : 0);
    require_arg(distinct >= 2, "roc_auc_ovr: fewer than 2 distinct classes");
  }

  AucResult result;
  double auc_sum = 0.0;
  int auc_count = 0;
  const std::size_t n = truth.size();
  std::vector<std::size_t> order(n);
  for (int c = 0; c < kNumClasses; ++c) {
    const auto ci = static_cast<std::size_t>(c);
    std::size_t n_pos = 0;
    for (VigilanceState s : truth) n_pos += class_index(s) == c ? 1 : 0;
    const std::size_t n_neg = n - n_pos;
    if (n_pos == 0 || n_neg == 0) {
      result.skipped.push_back(std::string("auc skipped for class ") +
                               state_code(state_from_index(c)) +
                               (n_pos == 0 ? " (no positives)" : " (no negatives)"));
      continue;
    }

    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return probabilities[a][ci] < probabilities[b][ci];
    });

    double positive_rank_sum = 0.0;
    std::size_t i = 0;
    while (i < n) {
      std::size_t j = i;
      while (j + 1 < n &&
             probabilities[order[j + 1]][ci] == probabilities[order[i]][ci]) {
        ++j;
      }
      const double midrank = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
      for (std::size_t k = i; k <= j; ++k) {
        if (class_index(truth[order[k]]) == c) positive_rank_sum += midrank;
      }
      i = j + 1;
    }

    const double auc = (positive_rank_sum -
                        static_cast<double>(n_pos) * (static_cast<double>(n_pos) + 1.0) / 2.0) /
                       (static_cast<double>(n_pos) * static_cast<double>(n_neg));
    result.per_class[ci] = auc;
    auc_sum += auc;
    auc_count += 1;
  }
  if (auc_count > 0) result.macro = auc_sum / auc_count;
  return result;
}

struct RocPoint {
  double fpr = 0.0;
  double tpr = 0.0;
};

// ROC polyline for one class against the rest, from (0,0) to (1,1), one vertex
// per distinct score threshold.
inline std::vector<RocPoint> roc_curve(std::span<const VigilanceState> truth,
                                       std::span<const double> scores,
                                       VigilanceState positive) {
  require_arg(truth.size() == scores.size() && !truth.empty(),
              "roc_curve: bad input lengths");
  std::size_t n_pos = 0;
  for (VigilanceState s : truth) n_pos += s == positive ? 1 : 0;
  const std::size_t n_neg = truth.size() - n_pos;
  require_arg(n_pos > 0 && n_neg > 0, "roc_curve: need both positives and negatives");

  std::vector<std::size_t> order(truth.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

  std::vector<RocPoint> curve;
  curve.push_back({0.0, 0.0});
  std::size_t tp = 0, fp = 0;
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j + 1 < order.size() && scores[order[j + 1]] == scores[order[i]]) ++j;
    for (std::size_t k = i; k <= j; ++k) {
      if (truth[order[k]] == positive) ++tp; else ++fp;
    }
    curve.push_back({static_cast<double>(fp) / static_cast<double>(n_neg),
                     static_cast<double>(tp) / static_cast<double>(n_pos)});
    i = j + 1;
  }
  return curve;
}

// Confusion matrix, derived metrics, and one-vs-rest AUC in one pass.
inline MetricsReport evaluate_predictions(std::span<const VigilanceState> truth,
                                          std::span<const VigilanceState> predicted,
                                          std::span<const ClassProbabilities> probabilities,
                                          ConfusionMatrix* cm_out = nullptr) {
  const ConfusionMatrix cm = confusion_matrix(truth, predicted);
  MetricsReport report = derive_metrics(cm);
  try {
    const AucResult auc = roc_auc_ovr(truth, probabilities);
    report.auc = auc.per_class;
    report.macro_auc = auc.macro;
    for (const std::string& s : auc.skipped) report.warnings.push_back(s);
  } catch (const std::invalid_argument& e) {
    report.warnings.push_back(std::string("auc unavailable: ") + e.what());
  }
  if (cm_out) *cm_out = cm;
  return report;
}

}  // namespace vigil
