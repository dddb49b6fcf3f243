#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "vigil/scaler.hpp"
#include "vigil/synthetic.hpp"

using vigil::ClassPrototype;
using vigil::FeatureRow;
using vigil::SyntheticSpec;
using vigil::VigilanceState;

namespace {

// Plain silhouette over standardized features; O(n^2), test-only.
double mean_silhouette(const std::vector<std::vector<double>>& points,
                       const std::vector<int>& labels) {
  const std::size_t n = points.size();
  auto distance = [&](std::size_t a, std::size_t b) {
    double sum = 0.0;
    for (std::size_t f = 0; f < points[a].size(); ++f) {
      const double d = points[a][f] - points[b][f];
      sum += d * d;
    }
    return std::sqrt(sum);
  };
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    std::array<double, 3> dist_sum{};
    std::array<int, 3> dist_count{};
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      dist_sum[static_cast<std::size_t>(labels[j])] += distance(i, j);
      dist_count[static_cast<std::size_t>(labels[j])]++;
    }
    const int own = labels[i];
    const double a = dist_sum[static_cast<std::size_t>(own)] /
                     std::max(1, dist_count[static_cast<std::size_t>(own)]);
    double b = 1e300;
    for (int c = 0; c < 3; ++c) {
      if (c == own || dist_count[static_cast<std::size_t>(c)] == 0) continue;
      b = std::min(b, dist_sum[static_cast<std::size_t>(c)] /
                          dist_count[static_cast<std::size_t>(c)]);
    }
    total += (b - a) / std::max(a, b);
  }
  return total / static_cast<double>(n);
}

}  // namespace

TEST_CASE("default prototypes look like the three vigilance states", "[synthetic]") {
  const auto protos = vigil::default_prototypes();
  const ClassPrototype& p = protos[0];
  const ClassPrototype& s = protos[1];
  const ClassPrototype& w = protos[2];

  REQUIRE(p.label == VigilanceState::Paradoxical);
  REQUIRE(s.label == VigilanceState::SlowWave);
  REQUIRE(w.label == VigilanceState::Wake);

  // Slow-wave: delta-range dominance, high amplitude.
  REQUIRE(s.band_lo_hz >= 0.5);
  REQUIRE(s.band_hi_hz <= 4.0);
  REQUIRE(s.eeg_amplitude > p.eeg_amplitude);
  // Paradoxical has less muscle tone than wake and near-zero activity.
  REQUIRE(p.emg_level < w.emg_level);
  REQUIRE(p.activity_level < 0.1);

  for (const auto& proto : protos) {
    REQUIRE(proto.band_lo_hz >= 0.0);
    REQUIRE(proto.band_hi_hz > proto.band_lo_hz);
    REQUIRE(proto.band_hi_hz < 20.0);
    REQUIRE(proto.eeg_amplitude >= 0.0);
    REQUIRE(proto.emg_level >= 0.0);
    REQUIRE(proto.activity_level >= 0.0);
    REQUIRE(proto.noise_scale >= 0.0);
  }
}

TEST_CASE("feature generator is deterministic and balanced", "[synthetic]") {
  SyntheticSpec spec;
  spec.epochs_per_class = 40;
  spec.seed = 7;
  spec.separability = 0.8;

  const auto a = vigil::generate_features(spec);
  const auto b = vigil::generate_features(spec);
  REQUIRE(a.size() == 120);
  for (std::size_t i = 0; i < a.size(); ++i) {
    REQUIRE(a[i].values == b[i].values);
    REQUIRE(a[i].label == b[i].label);
  }

  std::array<int, 3> counts{};
  for (const auto& row : a) {
    REQUIRE(row.label.has_value());
    counts[static_cast<std::size_t>(class_index(*row.label))]++;
    for (double v : row.values) REQUIRE(std::isfinite(v));
  }
  REQUIRE(counts == std::array<int, 3>{40, 40, 40});
}

TEST_CASE("raw generator determinism and counts", "[synthetic]") {
  SyntheticSpec spec;
  spec.epochs_per_class = 1;
  spec.seed = 3;

  const auto a = vigil::generate_raw(spec, 100.0);
  const auto b = vigil::generate_raw(spec, 100.0);
  REQUIRE(a.size() == 3);  // one epoch per class
  for (std::size_t i = 0; i < a.size(); ++i) {
    REQUIRE(a[i].first.eeg == b[i].first.eeg);
    REQUIRE(a[i].first.emg == b[i].first.emg);
    REQUIRE(a[i].first.activity == b[i].first.activity);
    REQUIRE(a[i].second == b[i].second);
  }
}

TEST_CASE("nearest-class-mean scores at least 0.99 at full separability",
          "[synthetic][oracle]") {
  SyntheticSpec spec;
  spec.epochs_per_class = 100;
  spec.seed = 42;
  spec.separability = 1.0;

  const auto means = vigil::class_feature_means(spec);
  const auto rows = vigil::generate_features(spec);
  std::size_t correct = 0;
  for (const FeatureRow& row : rows) {
    int best = 0;
    double best_dist = 1e300;
    for (int c = 0; c < 3; ++c) {
      double dist = 0.0;
      for (int f = 0; f < vigil::kFeatureCount; ++f) {
        const double d = row.values[static_cast<std::size_t>(f)] -
                         means[static_cast<std::size_t>(c)][static_cast<std::size_t>(f)];
        dist += d * d;
      }
      if (dist < best_dist) {
        best_dist = dist;
        best = c;
      }
    }
    if (best == class_index(*row.label)) ++correct;
  }
  REQUIRE(static_cast<double>(correct) / static_cast<double>(rows.size()) >= 0.99);
}

TEST_CASE("class means coincide in the low-separability limit", "[synthetic]") {
  SyntheticSpec spec;
  spec.separability = 1e-9;
  const auto means = vigil::class_feature_means(spec);
  for (int f = 0; f < vigil::kFeatureCount; ++f) {
    const auto fi = static_cast<std::size_t>(f);
    const double scale = std::max({std::fabs(means[0][fi]), std::fabs(means[1][fi]), 1e-12});
    REQUIRE(std::fabs(means[0][fi] - means[1][fi]) / scale < 1e-6);
    REQUIRE(std::fabs(means[1][fi] - means[2][fi]) / scale < 1e-6);
  }
}

TEST_CASE("slow-wave raw epochs peak inside bands 1-7 at full separability",
          "[synthetic][raw]") {
  SyntheticSpec spec;
  spec.epochs_per_class = 10;
  spec.seed = 11;
  spec.separability = 1.0;

  const auto epochs = vigil::generate_raw(spec, 500.0);
  for (const auto& [epoch, label] : epochs) {
    if (label != VigilanceState::SlowWave) continue;
    const FeatureRow row = vigil::extract_features(epoch);
    int argmax = 0;
    for (int i = 1; i < vigil::kBandCount; ++i) {
      if (row.band(i) > row.band(argmax)) argmax = i;
    }
    REQUIRE(argmax >= 1);
    REQUIRE(argmax <= 7);
  }
}

TEST_CASE("raw-path features cluster by class", "[synthetic][raw]") {
  SyntheticSpec spec;
  spec.epochs_per_class = 30;
  spec.seed = 21;
  spec.separability = 1.0;

  const auto epochs = vigil::generate_raw(spec, 100.0);
  std::vector<vigil::WindowedSample> feature_rows;
  std::vector<int> labels;
  for (const auto& [epoch, label] : epochs) {
    const FeatureRow row = vigil::extract_features(epoch);
    feature_rows.push_back({std::vector<double>(row.values.begin(), row.values.end()),
                            label});
    labels.push_back(class_index(label));
  }
  vigil::FeatureScaler scaler;
  scaler.fit(feature_rows);
  std::vector<std::vector<double>> standardized;
  for (const auto& s : feature_rows) standardized.push_back(scaler.transform(s.features));

  REQUIRE(mean_silhouette(standardized, labels) > 0.0);
}

TEST_CASE("spec validation", "[synthetic][errors]") {
  SyntheticSpec spec;
  spec.epochs_per_class = 0;
  REQUIRE_THROWS_AS(vigil::generate_features(spec), std::invalid_argument);
  spec.epochs_per_class = 1;
  spec.separability = 0.0;
  REQUIRE_THROWS_AS(vigil::generate_features(spec), std::invalid_argument);
  spec.separability = 1.5;
  REQUIRE_THROWS_AS(vigil::generate_features(spec), std::invalid_argument);
  spec.separability = 1.0;
  spec.prototypes[0].band_hi_hz = 25.0;
  REQUIRE_THROWS_AS(vigil::generate_features(spec), std::invalid_argument);
}
