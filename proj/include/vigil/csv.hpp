#pragma once

#include <array>
#include <charconv>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "vigil/common.hpp"
#include "vigil/dataset.hpp"
#include "vigil/model.hpp"
#include "vigil/signal_features.hpp"

namespace vigil {

namespace csv {

// 17 significant digits: enough for a lossless double round-trip.
inline void append_double(std::string& out, double value) {
  char buffer[32];
  const int written = std::snprintf(buffer, sizeof(buffer), "%.17g", value);
  out.append(buffer, static_cast<std::size_t>(written));
}

inline std::string format_double(double value) {
  std::string out;
  append_double(out, value);
  return out;
}

inline double parse_double(std::string_view field, std::size_t row, const std::string& column) {
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc{} || ptr != field.data() + field.size()) {
    throw SchemaError("row " + std::to_string(row) + ", column " + column +
                      ": cannot parse number \"" + std::string(field) + "\"");
  }
  return value;
}

inline std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return fields;
}

inline std::string strip_cr(std::string line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return line;
}

inline std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError("cannot open file: " + path);
  return in;
}

inline std::ofstream open_output(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw SchemaError("cannot write file: " + path);
  return out;
}

// Exact header check; the error names every missing and unexpected column.
inline void check_header(const std::vector<std::string_view>& actual,
                         const std::vector<std::string>& expected,
                         const std::string& path) {
  std::string missing, unexpected;
  for (const std::string& name : expected) {
    bool found = false;
    for (std::string_view a : actual) {
      if (a == name) { found = true; break; }
    }
    if (!found) {
      if (!missing.empty()) missing += ", ";
      missing += name;
    }
  }
  for (std::string_view a : actual) {
    bool known = false;
    for (const std::string& name : expected) {
      if (a == name) { known = true; break; }
    }
    if (!known) {
      if (!unexpected.empty()) unexpected += ", ";
      unexpected += std::string(a);
    }
  }
  std::string problems;
  if (!missing.empty()) problems += "missing columns: " + missing;
  if (!unexpected.empty()) {
    if (!problems.empty()) problems += "; ";
    problems += "unexpected columns: " + unexpected;
  }
  if (problems.empty()) {
    for (std::size_t i = 0; i < expected.size(); ++i) {
      if (actual[i] != expected[i]) {
        problems = "columns out of order starting at \"" + std::string(actual[i]) + "\"";
        break;
      }
    }
  }
  if (!problems.empty()) throw SchemaError(path + ": " + problems);
}

}  // namespace csv

// Band columns are named by their bounds in tenths of Hz: eeg_00_05 covers
// [0.0, 0.5) Hz, ..., eeg_195_200 covers [19.5, 20.0) Hz.
inline std::vector<std::string> feature_csv_header() {
  std::vector<std::string> header;
  header.reserve(kFeatureCount + 1);
  for (int i = 0; i < kBandCount; ++i) {
    char name[24];
    std::snprintf(name, sizeof(name), "eeg_%02d_%02d", 5 * i, 5 * (i + 1));
    header.emplace_back(name);
  }
  header.emplace_back("emg");
  header.emplace_back("activity");
  header.emplace_back("label");
  return header;
}

inline void write_feature_csv(const std::string& path, std::span<const FeatureRow> rows) {
  std::ofstream out = csv::open_output(path);
  const auto header = feature_csv_header();
  std::string line;
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (i) line += ',';
    line += header[i];
  }
  out << line << '\n';
  for (const FeatureRow& row : rows) {
    line.clear();
    for (int f = 0; f < kFeatureCount; ++f) {
      csv::append_double(line, row.values[static_cast<std::size_t>(f)]);
      line += ',';
    }
    if (row.label) line += state_code(*row.label);
    out << line << '\n';
  }
  if (!out) throw SchemaError("write failed: " + path);
}

// Rows with an empty label field come back unlabeled. Error messages use
// 1-based data row numbers (the header is row 0).
inline std::vector<FeatureRow> read_feature_csv(const std::string& path) {
  std::ifstream in = csv::open_input(path);
  const auto header = feature_csv_header();
  std::string line;
  if (!std::getline(in, line)) throw SchemaError(path + ": empty file");
  csv::check_header(csv::split_fields(csv::strip_cr(line)), header, path);

  std::vector<FeatureRow> rows;
  std::size_t row_number = 0;
  while (std::getline(in, line)) {
    line = csv::strip_cr(line);
    if (line.empty()) continue;
    ++row_number;
    const auto fields = csv::split_fields(line);
    if (fields.size() != header.size()) {
      throw SchemaError(path + ": row " + std::to_string(row_number) + " has " +
                        std::to_string(fields.size()) + " fields, expected " +
                        std::to_string(header.size()));
    }
    FeatureRow row;
    for (int f = 0; f < kFeatureCount; ++f) {
      row.values[static_cast<std::size_t>(f)] =
          csv::parse_double(fields[static_cast<std::size_t>(f)], row_number,
                            header[static_cast<std::size_t>(f)]);
    }
    const std::string_view label_field = fields.back();
    if (!label_field.empty()) {
      const auto state = parse_state(label_field);
      if (!state) {
        throw SchemaError(path + ": row " + std::to_string(row_number) +
                          ": unknown label \"" + std::string(label_field) + "\"");
      }
      row.label = state;
    }
    rows.push_back(row);
  }
  return rows;
}

// Windowed-sample CSV: f000..fNNN,label. The label field may be empty, which
// is how unscored data reaches `predict`.
struct WindowedRecord {
  std::vector<double> features;
  std::optional<VigilanceState> label;
};

inline std::vector<std::string> windowed_csv_header(std::size_t feature_count) {
  std::vector<std::string> header;
  header.reserve(feature_count + 1);
  for (std::size_t f = 0; f < feature_count; ++f) {
    char name[32];
    std::snprintf(name, sizeof(name), "f%03zu", f);
    header.emplace_back(name);
  }
  header.emplace_back("label");
  return header;
}

inline void write_windowed_csv(const std::string& path,
                               std::span<const WindowedSample> samples) {
  require_arg(!samples.empty(), "write_windowed_csv: no samples");
  std::ofstream out = csv::open_output(path);
  const auto header = windowed_csv_header(samples.front().features.size());
  std::string line;
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (i) line += ',';
    line += header[i];
  }
  out << line << '\n';
  for (const WindowedSample& sample : samples) {
    line.clear();
    for (double v : sample.features) {
      csv::append_double(line, v);
      line += ',';
    }
    line += state_code(sample.label);
    out << line << '\n';
  }
  if (!out) throw SchemaError("write failed: " + path);
}

inline std::vector<WindowedRecord> read_windowed_csv(const std::string& path) {
  std::ifstream in = csv::open_input(path);
  std::string line;
  if (!std::getline(in, line)) throw SchemaError(path + ": empty file");
  const auto head_fields = csv::split_fields(csv::strip_cr(line));
  require_arg(head_fields.size() >= 2, path + ": header too short");
  const std::size_t feature_count = head_fields.size() - 1;
  csv::check_header(head_fields, windowed_csv_header(feature_count), path);

  std::vector<WindowedRecord> records;
  std::size_t row_number = 0;
  while (std::getline(in, line)) {
    line = csv::strip_cr(line);
    if (line.empty()) continue;
    ++row_number;
    const auto fields = csv::split_fields(line);
    if (fields.size() != feature_count + 1) {
      throw SchemaError(path + ": row " + std::to_string(row_number) + " has " +
                        std::to_string(fields.size()) + " fields, expected " +
                        std::to_string(feature_count + 1));
    }
    WindowedRecord record;
    record.features.resize(feature_count);
    for (std::size_t f = 0; f < feature_count; ++f) {
      record.features[f] = csv::parse_double(fields[f], row_number, "f" + std::to_string(f));
    }
    if (!fields.back().empty()) {
      const auto state = parse_state(fields.back());
      if (!state) {
        throw SchemaError(path + ": row " + std::to_string(row_number) +
                          ": unknown label \"" + std::string(fields.back()) + "\"");
      }
      record.label = state;
    }
    records.push_back(std::move(record));
  }
  return records;
}

inline std::vector<WindowedSample> require_labeled(std::span<const WindowedRecord> records) {
  std::vector<WindowedSample> samples;
  samples.reserve(records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (!records[i].label) {
      throw std::invalid_argument("row " + std::to_string(i + 1) + " is unlabeled");
    }
    samples.push_back({records[i].features, *records[i].label});
  }
  return samples;
}

// Raw signal pair: samples in `t_index,eeg,emg`, per-epoch activity in a
// sidecar `epoch_index,activity`, optional labels in `epoch_index,label`.
inline void write_signals_csv(const std::string& path, std::span<const double> eeg,
                              std::span<const double> emg) {
  require_arg(eeg.size() == emg.size(), "write_signals_csv: eeg/emg length mismatch");
  std::ofstream out = csv::open_output(path);
  out << "t_index,eeg,emg\n";
  std::string line;
  for (std::size_t i = 0; i < eeg.size(); ++i) {
    line.clear();
    line += std::to_string(i);
    line += ',';
    csv::append_double(line, eeg[i]);
    line += ',';
    csv::append_double(line, emg[i]);
    out << line << '\n';
  }
  if (!out) throw SchemaError("write failed: " + path);
}

inline std::pair<std::vector<double>, std::vector<double>> read_signals_csv(
    const std::string& path) {
  std::ifstream in = csv::open_input(path);
  std::string line;
  if (!std::getline(in, line)) throw SchemaError(path + ": empty file");
  csv::check_header(csv::split_fields(csv::strip_cr(line)),
                    {"t_index", "eeg", "emg"}, path);
  std::vector<double> eeg, emg;
  std::size_t row_number = 0;
  while (std::getline(in, line)) {
    line = csv::strip_cr(line);
    if (line.empty()) continue;
    ++row_number;
    const auto fields = csv::split_fields(line);
    if (fields.size() != 3) {
      throw SchemaError(path + ": row " + std::to_string(row_number) +
                        " has " + std::to_string(fields.size()) + " fields, expected 3");
    }
    eeg.push_back(csv::parse_double(fields[1], row_number, "eeg"));
    emg.push_back(csv::parse_double(fields[2], row_number, "emg"));
  }
  return {std::move(eeg), std::move(emg)};
}

inline void write_activity_csv(const std::string& path, std::span<const double> activity) {
  std::ofstream out = csv::open_output(path);
  out << "epoch_index,activity\n";
  std::string line;
  for (std::size_t i = 0; i < activity.size(); ++i) {
    line.clear();
    line += std::to_string(i);
    line += ',';
    csv::append_double(line, activity[i]);
    out << line << '\n';
  }
  if (!out) throw SchemaError("write failed: " + path);
}

inline std::vector<double> read_activity_csv(const std::string& path) {
  std::ifstream in = csv::open_input(path);
  std::string line;
  if (!std::getline(in, line)) throw SchemaError(path + ": empty file");
  csv::check_header(csv::split_fields(csv::strip_cr(line)), {"epoch_index", "activity"},
                    path);
  std::vector<double> activity;
  std::size_t row_number = 0;
  while (std::getline(in, line)) {
    line = csv::strip_cr(line);
    if (line.empty()) continue;
    ++row_number;
    const auto fields = csv::split_fields(line);
    if (fields.size() != 2) {
      throw SchemaError(path + ": row " + std::to_string(row_number) + " has " +
                        std::to_string(fields.size()) + " fields, expected 2");
    }
    activity.push_back(csv::parse_double(fields[1], row_number, "activity"));
  }
  return activity;
}

inline void write_labels_csv(const std::string& path,
                             std::span<const VigilanceState> labels) {
  std::ofstream out = csv::open_output(path);
  out << "epoch_index,label\n";
  for (std::size_t i = 0; i < labels.size(); ++i) {
    out << i << ',' << state_code(labels[i]) << '\n';
  }
  if (!out) throw SchemaError("write failed: " + path);
}

inline std::vector<VigilanceState> read_labels_csv(const std::string& path) {
  std::ifstream in = csv::open_input(path);
  std::string line;
  if (!std::getline(in, line)) throw SchemaError(path + ": empty file");
  csv::check_header(csv::split_fields(csv::strip_cr(line)), {"epoch_index", "label"}, path);
  std::vector<VigilanceState> labels;
  std::size_t row_number = 0;
  while (std::getline(in, line)) {
    line = csv::strip_cr(line);
    if (line.empty()) continue;
    ++row_number;
    const auto fields = csv::split_fields(line);
    if (fields.size() != 2) {
      throw SchemaError(path + ": row " + std::to_string(row_number) + " has " +
                        std::to_string(fields.size()) + " fields, expected 2");
    }
    const auto state = parse_state(fields[1]);
    if (!state) {
      throw SchemaError(path + ": row " + std::to_string(row_number) +
                        ": unknown label \"" + std::string(fields[1]) + "\"");
    }
    labels.push_back(*state);
  }
  return labels;
}

inline void write_predictions_csv(const std::string& path,
                                  std::span<const VigilanceState> predicted,
                                  std::span<const ClassProbabilities> probabilities,
                                  std::span<const std::optional<VigilanceState>> truth = {}) {
  require_arg(predicted.size() == probabilities.size(),
              "write_predictions_csv: length mismatch");
  std::ofstream out = csv::open_output(path);
  out << "index,predicted,p_P,p_S,p_W,true_label\n";
  std::string line;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    line.clear();
    line += std::to_string(i);
    line += ',';
    line += state_code(predicted[i]);
    for (int c = 0; c < kNumClasses; ++c) {
      line += ',';
      csv::append_double(line, probabilities[i][static_cast<std::size_t>(c)]);
    }
    line += ',';
    if (!truth.empty() && truth[i]) line += state_code(*truth[i]);
    out << line << '\n';
  }
  if (!out) throw SchemaError("write failed: " + path);
}

inline void write_history_csv(const std::string& path,
                              std::span<const TrainingEpochStats> history) {
  std::ofstream out = csv::open_output(path);
  out << "epoch,train_loss,train_accuracy,train_precision,train_recall,"
         "val_loss,val_accuracy,val_precision,val_recall\n";
  std::string line;
  for (const TrainingEpochStats& s : history) {
    line.clear();
    line += std::to_string(s.epoch);
    for (double v : {s.train_loss, s.train_accuracy, s.train_precision, s.train_recall,
                     s.val_loss, s.val_accuracy, s.val_precision, s.val_recall}) {
      line += ',';
      csv::append_double(line, v);
    }
    out << line << '\n';
  }
  if (!out) throw SchemaError("write failed: " + path);
}

// 64-bit FNV-1a; good enough to pin split inputs to their manifest.
inline std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t hash = 0xCBF29CE484222325ull;
  for (unsigned char byte : bytes) {
    hash ^= byte;
    hash *= 0x100000001B3ull;
  }
  return hash;
}

inline std::string digest_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SchemaError("cannot open file for digest: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  const std::string content = buffer.str();
  char out[32];
  std::snprintf(out, sizeof(out), "fnv1a64:%016llx",
                static_cast<unsigned long long>(fnv1a64(content)));
  return out;
}

inline void write_split_manifest(const std::string& path, const DataSplit& split_result,
                                 const std::string& input_digest) {
  std::ofstream out = csv::open_output(path);
  out << "seed=" << split_result.seed << '\n';
  out << "test_fraction=" << csv::format_double(split_result.test_fraction) << '\n';
  out << "validation_fraction_of_train="
      << csv::format_double(split_result.validation_fraction_of_train) << '\n';
  out << "input_digest=" << input_digest << '\n';
  auto write_indices = [&out](const char* key, const std::vector<std::size_t>& indices) {
    out << key << '=';
    for (std::size_t i = 0; i < indices.size(); ++i) {
      if (i) out << ',';
      out << indices[i];
    }
    out << '\n';
  };
  write_indices("train_indices", split_result.train_indices);
  write_indices("validation_indices", split_result.validation_indices);
  write_indices("test_indices", split_result.test_indices);
  if (!out) throw SchemaError("write failed: " + path);
}

struct SplitManifest {
  std::uint64_t seed = 0;
  double test_fraction = 0.0;
  double validation_fraction_of_train = 0.0;
  std::string input_digest;
  std::vector<std::size_t> train_indices, validation_indices, test_indices;
};

inline SplitManifest read_split_manifest(const std::string& path) {
  std::ifstream in = csv::open_input(path);
  SplitManifest manifest;
  std::string line;
  auto parse_indices = [](std::string_view text) {
    std::vector<std::size_t> indices;
    if (text.empty()) return indices;
    for (std::string_view field : csv::split_fields(text)) {
      std::size_t value = 0;
      const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
      if (ec != std::errc{} || ptr != field.data() + field.size()) {
        throw SchemaError("split manifest: bad index \"" + std::string(field) + "\"");
      }
      indices.push_back(value);
    }
    return indices;
  };
  while (std::getline(in, line)) {
    line = csv::strip_cr(line);
    if (line.empty()) continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) throw SchemaError(path + ": expected key=value, got \"" + line + "\"");
    const std::string key = line.substr(0, eq);
    const std::string value = line.substr(eq + 1);
    if (key == "seed") manifest.seed = std::stoull(value);
    else if (key == "test_fraction") manifest.test_fraction = csv::parse_double(value, 0, key);
    else if (key == "validation_fraction_of_train") manifest.validation_fraction_of_train = csv::parse_double(value, 0, key);
    else if (key == "input_digest") manifest.input_digest = value;
    else if (key == "train_indices") manifest.train_indices = parse_indices(value);
    else if (key == "validation_indices") manifest.validation_indices = parse_indices(value);
    else if (key == "test_indices") manifest.test_indices = parse_indices(value);
    else throw SchemaError(path + ": unknown key \"" + key + "\"");
  }
  return manifest;
}

}  // namespace vigil
