#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <span>
#include <utility>
#include <vector>

#include "vigil/common.hpp"
#include "vigil/rng.hpp"
#include "vigil/signal_features.hpp"

namespace vigil {

// Stylized signal statistics for one vigilance state. The defaults follow the
// usual rodent picture: slow-wave sleep shows strong low-frequency EEG with a
// quiet muscle channel, paradoxical sleep shows faster low-amplitude EEG with
// near-zero muscle tone, and wake shows broadband EEG with high EMG and
// activity.
struct ClassPrototype {
  VigilanceState label = VigilanceState::Wake;
  double band_lo_hz = 0.0;
  double band_hi_hz = 0.0;
  double eeg_amplitude = 0.0;
  double emg_level = 0.0;
  double activity_level = 0.0;
  double noise_scale = 0.0;
};

inline std::array<ClassPrototype, kNumClasses> default_prototypes() {
  std::array<ClassPrototype, kNumClasses> protos;
  protos[0] = {VigilanceState::Paradoxical, 6.0, 9.0, 1.0, 0.10, 0.05, 0.35};
  protos[1] = {VigilanceState::SlowWave, 0.5, 4.0, 3.0, 0.30, 0.50, 0.35};
  protos[2] = {VigilanceState::Wake, 2.0, 16.0, 1.5, 2.00, 5.00, 0.35};
  return protos;
}

struct SyntheticSpec {
  std::array<ClassPrototype, kNumClasses> prototypes = default_prototypes();
  int epochs_per_class = 100;
  std::uint64_t seed = 0;
  double separability = 1.0;  // in (0, 1]
};

inline void validate_spec(const SyntheticSpec& spec) {
  require_arg(spec.epochs_per_class >= 1, "SyntheticSpec: epochs_per_class must be >= 1");
  require_arg(spec.separability > 0.0 && spec.separability <= 1.0,
              "SyntheticSpec: separability must lie in (0, 1]");
  for (const ClassPrototype& p : spec.prototypes) {
    require_arg(p.band_lo_hz >= 0.0 && p.band_hi_hz > p.band_lo_hz &&
                    p.band_hi_hz < kMaxBandHz,
                "ClassPrototype: dominant band must lie within [0, 20) Hz");
    require_arg(p.eeg_amplitude >= 0.0 && p.emg_level >= 0.0 &&
                    p.activity_level >= 0.0 && p.noise_scale >= 0.0,
                "ClassPrototype: levels must be non-negative");
  }
}

namespace detail {

inline constexpr std::uint64_t kSynthFeatureStream = 0x53594E46;  // "SYNF"
inline constexpr std::uint64_t kSynthRawStream = 0x53594E52;      // "SYNR"
// Epochs are emitted in bouts of this many same-class epochs, cycling
// P, S, W, so windowed samples are mostly homogeneous like real hypnograms.
inline constexpr int kBoutLengthEpochs = 25;
inline constexpr int kSineCount = 3;
// Fraction of the dominant band kept as margin on each side when drawing sine
// frequencies, so leakage peaks stay inside the band.
inline constexpr double kBandMargin = 0.1;
inline constexpr double kRectifiedGaussianMean = 0.7978845608028654;  // sqrt(2/pi)

// Idealized noise-free 42-feature profile of one prototype.
inline std::array<double, kFeatureCount> prototype_profile(const ClassPrototype& proto) {
  std::array<double, kFeatureCount> profile{};
  const double peak = proto.eeg_amplitude * proto.eeg_amplitude;
  for (int i = 0; i < kBandCount; ++i) {
    const double center = (static_cast<double>(i) + 0.5) * kBandWidthHz;
    const bool in_band = center >= proto.band_lo_hz && center < proto.band_hi_hz;
    profile[static_cast<std::size_t>(i)] = in_band ? peak : 0.02 * peak;
  }
  profile[40] = proto.emg_level * kRectifiedGaussianMean;
  profile[41] = proto.activity_level;
  return profile;
}

// Class emission order: bouts of kBoutLengthEpochs epochs cycling P, S, W
// until each class reaches epochs_per_class.
inline std::vector<VigilanceState> emission_order(int epochs_per_class) {
  std::vector<VigilanceState> order;
  order.reserve(static_cast<std::size_t>(epochs_per_class) * kNumClasses);
  std::array<int, kNumClasses> remaining{};
  remaining.fill(epochs_per_class);
  int c = 0;
  while (remaining[0] + remaining[1] + remaining[2] > 0) {
    if (remaining[static_cast<std::size_t>(c)] > 0) {
      const int bout = std::min(kBoutLengthEpochs, remaining[static_cast<std::size_t>(c)]);
      for (int i = 0; i < bout; ++i) order.push_back(state_from_index(c));
      remaining[static_cast<std::size_t>(c)] -= bout;
    }
    c = (c + 1) % kNumClasses;
  }
  return order;
}

}  // namespace detail

// Per-class feature means after blending toward the pooled profile:
// mean_c = pooled + separability * (profile_c - pooled). At separability -> 0
// the class means coincide.
inline std::array<std::array<double, kFeatureCount>, kNumClasses> class_feature_means(
    const SyntheticSpec& spec) {
  validate_spec(spec);
  std::array<std::array<double, kFeatureCount>, kNumClasses> profiles;
  for (int c = 0; c < kNumClasses; ++c) {
    profiles[static_cast<std::size_t>(c)] =
        detail::prototype_profile(spec.prototypes[static_cast<std::size_t>(c)]);
  }
  std::array<double, kFeatureCount> pooled{};
  for (int c = 0; c < kNumClasses; ++c) {
    for (int f = 0; f < kFeatureCount; ++f) {
      pooled[static_cast<std::size_t>(f)] +=
          profiles[static_cast<std::size_t>(c)][static_cast<std::size_t>(f)] / kNumClasses;
    }
  }
  for (int c = 0; c < kNumClasses; ++c) {
    for (int f = 0; f < kFeatureCount; ++f) {
      auto& value = profiles[static_cast<std::size_t>(c)][static_cast<std::size_t>(f)];
      value = pooled[static_cast<std::size_t>(f)] +
              spec.separability * (value - pooled[static_cast<std::size_t>(f)]);
    }
  }
  return profiles;
}

// Per-feature noise sigma: prototype noise_scale times the across-class spread
// of that feature, floored to stay positive.
inline std::array<std::array<double, kFeatureCount>, kNumClasses> class_feature_sigmas(
    const SyntheticSpec& spec) {
  std::array<std::array<double, kFeatureCount>, kNumClasses> profiles;
  for (int c = 0; c < kNumClasses; ++c) {
    profiles[static_cast<std::size_t>(c)] =
        detail::prototype_profile(spec.prototypes[static_cast<std::size_t>(c)]);
  }
  std::array<std::array<double, kFeatureCount>, kNumClasses> sigmas;
  for (int f = 0; f < kFeatureCount; ++f) {
    const auto fi = static_cast<std::size_t>(f);
    double lo = profiles[0][fi], hi = profiles[0][fi];
    for (int c = 1; c < kNumClasses; ++c) {
      lo = std::min(lo, profiles[static_cast<std::size_t>(c)][fi]);
      hi = std::max(hi, profiles[static_cast<std::size_t>(c)][fi]);
    }
    const double spread = std::max({hi - lo, 0.05 * hi, 1e-6});
    for (int c = 0; c < kNumClasses; ++c) {
      sigmas[static_cast<std::size_t>(c)][fi] =
          spec.prototypes[static_cast<std::size_t>(c)].noise_scale * spread;
    }
  }
  return sigmas;
}

// Draws labeled feature rows from per-class diagonal Gaussians around the
// blended prototype profiles. Fast path for classifier benchmarks; the DFT
// never runs here.
inline std::vector<FeatureRow> generate_features(const SyntheticSpec& spec) {
  validate_spec(spec);
  const auto means = class_feature_means(spec);
  const auto sigmas = class_feature_sigmas(spec);
  const std::vector<VigilanceState> order = detail::emission_order(spec.epochs_per_class);

  Rng rng = Rng::for_stream(spec.seed, detail::kSynthFeatureStream);
  std::vector<FeatureRow> rows;
  rows.reserve(order.size());
  for (VigilanceState label : order) {
    const auto ci = static_cast<std::size_t>(class_index(label));
    FeatureRow row;
    for (int f = 0; f < kFeatureCount; ++f) {
      const auto fi = static_cast<std::size_t>(f);
      row.values[fi] = means[ci][fi] + sigmas[ci][fi] * rng.normal();
    }
    row.label = label;
    rows.push_back(row);
  }
  return rows;
}

// Synthesizes raw epochs: EEG as a sum of sinusoids drawn inside the class's
// dominant band plus Gaussian noise scaled by (1 - separability); EMG as
// Gaussian noise at the class level; activity near the class level.
inline std::vector<std::pair<RawEpoch, VigilanceState>> generate_raw(
    const SyntheticSpec& spec, double sample_rate_hz = 500.0) {
  validate_spec(spec);
  require_arg(sample_rate_hz >= kMinSampleRateHz,
              "generate_raw: sample_rate_hz must be at least 40 Hz");
  const std::size_t per_epoch = epoch_sample_count(sample_rate_hz);
  const std::vector<VigilanceState> order = detail::emission_order(spec.epochs_per_class);

  Rng rng = Rng::for_stream(spec.seed, detail::kSynthRawStream);
  std::vector<std::pair<RawEpoch, VigilanceState>> epochs;
  epochs.reserve(order.size());

  for (VigilanceState label : order) {
    const ClassPrototype& proto =
        spec.prototypes[static_cast<std::size_t>(class_index(label))];
    const double width = proto.band_hi_hz - proto.band_lo_hz;
    const double lo = proto.band_lo_hz + detail::kBandMargin * width;
    const double hi = proto.band_hi_hz - detail::kBandMargin * width;

    std::array<double, detail::kSineCount> freq{}, phase{}, amp{};
    for (int s = 0; s < detail::kSineCount; ++s) {
      freq[static_cast<std::size_t>(s)] = rng.uniform_in(lo, hi);
      phase[static_cast<std::size_t>(s)] = rng.uniform_in(0.0, 2.0 * std::numbers::pi);
      amp[static_cast<std::size_t>(s)] = proto.eeg_amplitude * rng.uniform_in(0.6, 1.0);
    }
    const double noise_sigma = proto.noise_scale * (1.0 - spec.separability);

    RawEpoch epoch;
    epoch.sample_rate_hz = sample_rate_hz;
    epoch.eeg.resize(per_epoch);
    epoch.emg.resize(per_epoch);
    for (std::size_t i = 0; i < per_epoch; ++i) {
      const double t = static_cast<double>(i) / sample_rate_hz;
      double v = 0.0;
      for (int s = 0; s < detail::kSineCount; ++s) {
        const auto si = static_cast<std::size_t>(s);
        v += amp[si] * std::sin(2.0 * std::numbers::pi * freq[si] * t + phase[si]);
      }
      if (noise_sigma > 0.0) v += noise_sigma * rng.normal();
      epoch.eeg[i] = v;
      epoch.emg[i] = proto.emg_level * rng.normal();
    }
    epoch.activity = std::max(0.0, proto.activity_level * (1.0 + 0.1 * rng.normal()));
    epochs.emplace_back(std::move(epoch), label);
  }
  return epochs;
}

}  // namespace vigil
