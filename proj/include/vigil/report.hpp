#pragma once

#include <cstdio>
#include <fstream>
#include <span>
#include <string>

#include "vigil/csv.hpp"
#include "vigil/metrics.hpp"

namespace vigil {

namespace detail {

inline std::string fixed6(double value) {
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "%.6f", value);
  return buffer;
}

}  // namespace detail

// Aligned plain-text report. Confusion matrix rows are true classes and
// columns are predicted classes; the orientation is stated in the artifact.
inline std::string format_metrics_text(const std::string& model_kind,
                                       const ConfusionMatrix& cm,
                                       const MetricsReport& report) {
  std::string out;
  out += "model: " + model_kind + "\n";
  out += "samples: " + std::to_string(cm.total()) + "\n";
  out += "accuracy: " + detail::fixed6(report.accuracy) + "\n\n";

  out += "confusion matrix (rows = true class, columns = predicted class)\n";
  char line[128];
  std::snprintf(line, sizeof(line), "%6s %10s %10s %10s\n", "", "P", "S", "W");
  out += line;
  for (int r = 0; r < kNumClasses; ++r) {
    std::snprintf(line, sizeof(line), "%6c %10llu %10llu %10llu\n",
                  state_code(state_from_index(r)),
                  static_cast<unsigned long long>(cm.counts[static_cast<std::size_t>(r)][0]),
                  static_cast<unsigned long long>(cm.counts[static_cast<std::size_t>(r)][1]),
                  static_cast<unsigned long long>(cm.counts[static_cast<std::size_t>(r)][2]));
    out += line;
  }
  out += "\n";
  std::snprintf(line, sizeof(line), "%6s %10s %10s %10s\n", "class", "precision",
                "recall", "f1");
  out += line;
  for (int c = 0; c < kNumClasses; ++c) {
    const auto ci = static_cast<std::size_t>(c);
    std::snprintf(line, sizeof(line), "%6c %10.6f %10.6f %10.6f\n",
                  state_code(state_from_index(c)), report.precision[ci],
                  report.recall[ci], report.f1[ci]);
    out += line;
  }
  out += "\nmacro f1: " + detail::fixed6(report.macro_f1) + "\n";

  out += "auc (one-vs-rest):";
  for (int c = 0; c < kNumClasses; ++c) {
    const auto ci = static_cast<std::size_t>(c);
    out += std::string(" ") + state_code(state_from_index(c)) + "=";
    out += report.auc[ci] ? detail::fixed6(*report.auc[ci]) : "n/a";
  }
  out += " macro=";
  out += report.macro_auc ? detail::fixed6(*report.macro_auc) : "n/a";
  out += "\n";

  if (report.warnings.empty()) {
    out += "warnings: none\n";
  } else {
    out += "warnings:\n";
    for (const std::string& w : report.warnings) out += "  - " + w + "\n";
  }
  return out;
}

inline void write_metrics_text(const std::string& path, const std::string& model_kind,
                               const ConfusionMatrix& cm, const MetricsReport& report) {
  std::ofstream out = csv::open_output(path);
  out << format_metrics_text(model_kind, cm, report);
  if (!out) throw SchemaError("write failed: " + path);
}

// Flat machine-readable form: metric,class,value (class empty for aggregates).
inline void write_metrics_csv(const std::string& path, const MetricsReport& report) {
  std::ofstream out = csv::open_output(path);
  out << "metric,class,value\n";
  out << "accuracy,," << csv::format_double(report.accuracy) << '\n';
  for (int c = 0; c < kNumClasses; ++c) {
    const auto ci = static_cast<std::size_t>(c);
    const char code = state_code(state_from_index(c));
    out << "precision," << code << ',' << csv::format_double(report.precision[ci]) << '\n';
    out << "recall," << code << ',' << csv::format_double(report.recall[ci]) << '\n';
    out << "f1," << code << ',' << csv::format_double(report.f1[ci]) << '\n';
  }
  out << "macro_f1,," << csv::format_double(report.macro_f1) << '\n';
  for (int c = 0; c < kNumClasses; ++c) {
    const auto ci = static_cast<std::size_t>(c);
    if (report.auc[ci]) {
      out << "auc," << state_code(state_from_index(c)) << ','
          << csv::format_double(*report.auc[ci]) << '\n';
    }
  }
  if (report.macro_auc) {
    out << "auc,macro," << csv::format_double(*report.macro_auc) << '\n';
  }
  if (!out) throw SchemaError("write failed: " + path);
}

inline void write_confusion_csv(const std::string& path, const ConfusionMatrix& cm) {
  std::ofstream out = csv::open_output(path);
  out << "true\\predicted,P,S,W\n";
  for (int r = 0; r < kNumClasses; ++r) {
    out << state_code(state_from_index(r));
    for (int c = 0; c < kNumClasses; ++c) {
      out << ',' << cm.counts[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
    }
    out << '\n';
  }
  if (!out) throw SchemaError("write failed: " + path);
}

struct SummaryRow {
  std::string model_kind;
  double accuracy = 0.0;
  double macro_f1 = 0.0;
  std::optional<double> macro_auc;
};

inline void write_summary(const std::string& csv_path, const std::string& text_path,
                          std::span<const SummaryRow> rows) {
  {
    std::ofstream out = csv::open_output(csv_path);
    out << "model,accuracy,macro_f1,macro_auc\n";
    for (const SummaryRow& row : rows) {
      out << row.model_kind << ',' << csv::format_double(row.accuracy) << ','
          << csv::format_double(row.macro_f1) << ',';
      if (row.macro_auc) out << csv::format_double(*row.macro_auc);
      out << '\n';
    }
    if (!out) throw SchemaError("write failed: " + csv_path);
  }
  {
    std::ofstream out = csv::open_output(text_path);
    char line[128];
    std::snprintf(line, sizeof(line), "%-22s %10s %10s %10s\n", "model", "accuracy",
                  "macro_f1", "macro_auc");
    out << line;
    for (const SummaryRow& row : rows) {
      std::snprintf(line, sizeof(line), "%-22s %10.4f %10.4f %10s\n",
                    row.model_kind.c_str(), row.accuracy, row.macro_f1,
                    row.macro_auc ? detail::fixed6(*row.macro_auc).c_str() : "n/a");
      out << line;
    }
    if (!out) throw SchemaError("write failed: " + text_path);
  }
}

}  // namespace vigil
