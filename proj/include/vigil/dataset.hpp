#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "vigil/common.hpp"
#include "vigil/rng.hpp"
#include "vigil/signal_features.hpp"

namespace vigil {

inline constexpr int kDefaultWindowWidth = 5;

// Concatenation of `width` consecutive feature rows, oldest first, with one
// aggregated label. Width 5 gives the standard 210-feature sample.
struct WindowedSample {
  std::vector<double> features;
  VigilanceState label = VigilanceState::Wake;
};

// Most frequent label in the window; any tie for the maximum count falls back
// to the center epoch's label, even when the center is not among the tied
// classes. That rule is applied literally.
inline VigilanceState aggregate_label(std::span<const VigilanceState> labels) {
  require_arg(!labels.empty(), "aggregate_label: empty window");
  std::array<int, kNumClasses> counts{};
  for (VigilanceState s : labels) counts[static_cast<std::size_t>(class_index(s))]++;

  int best = 0;
  bool tied = false;
  for (int c = 1; c < kNumClasses; ++c) {
    if (counts[static_cast<std::size_t>(c)] > counts[static_cast<std::size_t>(best)]) {
      best = c;
      tied = false;
    } else if (counts[static_cast<std::size_t>(c)] ==
               counts[static_cast<std::size_t>(best)]) {
      tied = true;
    }
  }
  if (tied) return labels[labels.size() / 2];
  return state_from_index(best);
}

// Stride-1 moving window over labeled rows; output length is n - width + 1.
inline std::vector<WindowedSample> window(std::span<const FeatureRow> rows,
                                          int width = kDefaultWindowWidth) {
  require_arg(width >= 1, "window: width must be at least 1");
  require_arg(rows.size() >= static_cast<std::size_t>(width),
              "window: need at least " + std::to_string(width) + " rows, got " +
                  std::to_string(rows.size()));

  std::vector<VigilanceState> labels(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (!rows[i].label.has_value()) {
      throw std::invalid_argument("window: row " + std::to_string(i) + " is unlabeled");
    }
    labels[i] = *rows[i].label;
  }

  const std::size_t w = static_cast<std::size_t>(width);
  const std::size_t n_out = rows.size() - w + 1;
  std::vector<WindowedSample> out;
  out.reserve(n_out);
  for (std::size_t i = 0; i < n_out; ++i) {
    WindowedSample sample;
    sample.features.reserve(w * kFeatureCount);
    for (std::size_t j = 0; j < w; ++j) {
      const auto& values = rows[i + j].values;
      sample.features.insert(sample.features.end(), values.begin(), values.end());
    }
    sample.label = aggregate_label(std::span<const VigilanceState>(labels).subspan(i, w));
    out.push_back(std::move(sample));
  }
  return out;
}

struct ClassDistribution {
  std::array<std::uint64_t, kNumClasses> counts{};
  std::uint64_t total = 0;
  std::array<double, kNumClasses> fractions{};
};

inline ClassDistribution class_distribution(std::span<const VigilanceState> labels) {
  ClassDistribution dist;
  for (VigilanceState s : labels) dist.counts[static_cast<std::size_t>(class_index(s))]++;
  dist.total = labels.size();
  if (dist.total > 0) {
    for (int c = 0; c < kNumClasses; ++c) {
      dist.fractions[static_cast<std::size_t>(c)] =
          static_cast<double>(dist.counts[static_cast<std::size_t>(c)]) /
          static_cast<double>(dist.total);
    }
  }
  return dist;
}

inline ClassDistribution class_distribution(std::span<const WindowedSample> samples) {
  std::vector<VigilanceState> labels(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) labels[i] = samples[i].label;
  return class_distribution(std::span<const VigilanceState>(labels));
}

// Whole-class replication factor: k_c = round(max_count / count_c), at least 1.
inline std::array<std::uint64_t, kNumClasses> balance_factors(
    const std::array<std::uint64_t, kNumClasses>& counts) {
  std::uint64_t max_count = 0;
  for (std::uint64_t c : counts) max_count = std::max(max_count, c);
  std::array<std::uint64_t, kNumClasses> factors{};
  for (int c = 0; c < kNumClasses; ++c) {
    const std::uint64_t count = counts[static_cast<std::size_t>(c)];
    require_arg(count > 0, "balance_factors: zero count for class " +
                               std::string(1, state_code(state_from_index(c))));
    const auto k = static_cast<std::uint64_t>(std::llround(
        static_cast<double>(max_count) / static_cast<double>(count)));
    factors[static_cast<std::size_t>(c)] = std::max<std::uint64_t>(k, 1);
  }
  return factors;
}

// Appends k_c - 1 additional whole copies of each class, class by class, after
// the untouched original sequence.
inline std::vector<WindowedSample> balance(std::span<const WindowedSample> samples) {
  const ClassDistribution dist = class_distribution(samples);
  std::string missing;
  for (int c = 0; c < kNumClasses; ++c) {
    if (dist.counts[static_cast<std::size_t>(c)] == 0) {
      if (!missing.empty()) missing += ", ";
      missing += state_code(state_from_index(c));
    }
  }
  if (!missing.empty()) {
    throw std::invalid_argument("balance: no samples for class " + missing);
  }

  const auto factors = balance_factors(dist.counts);
  std::uint64_t total = 0;
  for (int c = 0; c < kNumClasses; ++c) {
    total += factors[static_cast<std::size_t>(c)] * dist.counts[static_cast<std::size_t>(c)];
  }

  std::vector<WindowedSample> out;
  out.reserve(total);
  out.assign(samples.begin(), samples.end());
  for (int c = 0; c < kNumClasses; ++c) {
    const std::uint64_t extra = factors[static_cast<std::size_t>(c)] - 1;
    if (extra == 0) continue;
    std::vector<const WindowedSample*> members;
    members.reserve(dist.counts[static_cast<std::size_t>(c)]);
    for (const WindowedSample& s : samples) {
      if (class_index(s.label) == c) members.push_back(&s);
    }
    for (std::uint64_t rep = 0; rep < extra; ++rep) {
      for (const WindowedSample* s : members) out.push_back(*s);
    }
  }
  return out;
}

// Seed-driven shuffle and contiguous partition. Parts are taken in order
// train, validation, test from the shuffled index sequence.
struct DataSplit {
  std::vector<WindowedSample> train;
  std::vector<WindowedSample> validation;
  std::vector<WindowedSample> test;
  std::vector<std::size_t> train_indices;
  std::vector<std::size_t> validation_indices;
  std::vector<std::size_t> test_indices;
  std::uint64_t seed = 0;
  double test_fraction = 0.0;
  double validation_fraction_of_train = 0.0;
};

namespace detail {
inline constexpr std::uint64_t kSplitStream = 0x53504C49;  // "SPLI"
}

inline DataSplit split(std::span<const WindowedSample> samples, std::uint64_t seed,
                       double test_fraction = 0.2,
                       double validation_fraction_of_train = 0.0) {
  require_arg(!samples.empty(), "split: no samples");
  require_arg(test_fraction >= 0.0 && test_fraction < 1.0,
              "split: test_fraction must lie in [0, 1)");
  require_arg(validation_fraction_of_train >= 0.0 && validation_fraction_of_train < 1.0,
              "split: validation_fraction_of_train must lie in [0, 1)");

  const std::size_t n = samples.size();
  Rng rng = Rng::for_stream(seed, detail::kSplitStream);
  std::vector<std::size_t> indices = shuffled_indices(n, rng);

  const auto n_test = static_cast<std::size_t>(
      std::llround(static_cast<double>(n) * test_fraction));
  const auto n_val = static_cast<std::size_t>(std::llround(
      static_cast<double>(n - n_test) * validation_fraction_of_train));
  const std::size_t n_train = n - n_test - n_val;

  DataSplit result;
  result.seed = seed;
  result.test_fraction = test_fraction;
  result.validation_fraction_of_train = validation_fraction_of_train;
  result.train_indices.assign(indices.begin(), indices.begin() + n_train);
  result.validation_indices.assign(indices.begin() + n_train,
                                   indices.begin() + n_train + n_val);
  result.test_indices.assign(indices.begin() + n_train + n_val, indices.end());

  auto gather = [&samples](const std::vector<std::size_t>& part) {
    std::vector<WindowedSample> out;
    out.reserve(part.size());
    for (std::size_t i : part) out.push_back(samples[i]);
    return out;
  };
  result.train = gather(result.train_indices);
  result.validation = gather(result.validation_indices);
  result.test = gather(result.test_indices);
  return result;
}

}  // namespace vigil
