#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "vigil/common.hpp"
#include "vigil/dft.hpp"

namespace vigil {

inline constexpr double kEpochSeconds = 10.0;
inline constexpr double kMinSampleRateHz = 40.0;  // Nyquist for 20 Hz content
inline constexpr int kBandCount = 40;
inline constexpr double kBandWidthHz = 0.5;
inline constexpr double kMaxBandHz = 20.0;
inline constexpr int kFeatureCount = 42;  // 40 EEG bands + EMG mean + activity

// One 10-second segment of raw EEG/EMG plus the epoch's activity count.
struct RawEpoch {
  std::vector<double> eeg;
  std::vector<double> emg;
  double activity = 0.0;
  double sample_rate_hz = 500.0;
};

inline std::size_t epoch_sample_count(double sample_rate_hz) {
  return static_cast<std::size_t>(std::llround(kEpochSeconds * sample_rate_hz));
}

inline std::uint64_t epoch_count(std::uint64_t total_samples, double sample_rate_hz) {
  const std::size_t per_epoch = epoch_sample_count(sample_rate_hz);
  require_arg(per_epoch > 0, "epoch_count: sample rate too low");
  return total_samples / per_epoch;
}

inline void validate_epoch(const RawEpoch& epoch) {
  require_arg(std::isfinite(epoch.sample_rate_hz) &&
                  epoch.sample_rate_hz >= kMinSampleRateHz,
              "RawEpoch: sample_rate_hz must be at least " +
                  std::to_string(kMinSampleRateHz) + " Hz");
  const std::size_t expected = epoch_sample_count(epoch.sample_rate_hz);
  require_arg(epoch.eeg.size() == expected,
              "RawEpoch: eeg has " + std::to_string(epoch.eeg.size()) +
                  " samples, expected " + std::to_string(expected));
  require_arg(epoch.emg.size() == expected,
              "RawEpoch: emg has " + std::to_string(epoch.emg.size()) +
                  " samples, expected " + std::to_string(expected));
  require_arg(std::isfinite(epoch.activity) && epoch.activity >= 0.0,
              "RawEpoch: activity must be finite and non-negative");
}

// 42-feature summary of one epoch. Layout: values[0..39] are the 0.5 Hz EEG
// band powers over 0-20 Hz, values[40] the EMG summary, values[41] activity.
struct FeatureRow {
  std::array<double, kFeatureCount> values{};
  std::optional<VigilanceState> label;

  double band(int i) const { return values[static_cast<std::size_t>(i)]; }
  double& band(int i) { return values[static_cast<std::size_t>(i)]; }
  double emg_mean() const { return values[40]; }
  double& emg_mean() { return values[40]; }
  double activity() const { return values[41]; }
  double& activity() { return values[41]; }
};

// How the EMG trace is collapsed to a scalar. The rectified mean is the
// default; a signed mean of a near-zero-mean biosignal would erase muscle tone.
enum class EmgSummary {
  kRectifiedMean,
  kRootMeanSquare,
};

// Sums spectrum power into 40 half-open channels [0.5*i, 0.5*(i+1)) Hz.
// The DC bin belongs to the first channel; every bin below 20 Hz lands in
// exactly one channel.
inline std::array<double, kBandCount> band_powers(const PowerSpectrum& spectrum) {
  require_arg(!spectrum.power.empty() && spectrum.bin_hz > 0.0,
              "band_powers: empty spectrum");
  const double coverage =
      spectrum.bin_hz * static_cast<double>(spectrum.power.size() - 1);
  require_arg(coverage >= kMaxBandHz,
              "band_powers: spectrum covers only " + std::to_string(coverage) +
                  " Hz, need " + std::to_string(kMaxBandHz));

  std::array<double, kBandCount> bands{};
  for (std::size_t k = 0; k < spectrum.power.size(); ++k) {
    const double freq = static_cast<double>(k) * spectrum.bin_hz;
    if (freq >= kMaxBandHz) break;
    // freq < 20 implies 2*freq < 40 exactly (scaling by 2 is exact).
    const int band = static_cast<int>(2.0 * freq);
    bands[static_cast<std::size_t>(band)] += spectrum.power[k];
  }
  return bands;
}

inline FeatureRow extract_features(const RawEpoch& epoch,
                                   EmgSummary emg_summary = EmgSummary::kRectifiedMean) {
  validate_epoch(epoch);
  const PowerSpectrum spectrum = dft_power(epoch.eeg, epoch.sample_rate_hz);
  const std::array<double, kBandCount> bands = band_powers(spectrum);

  FeatureRow row;
  for (int i = 0; i < kBandCount; ++i) row.band(i) = bands[static_cast<std::size_t>(i)];

  double emg_sum = 0.0;
  for (double v : epoch.emg) {
    if (!std::isfinite(v)) {
      throw std::invalid_argument("extract_features: non-finite emg sample");
    }
    emg_sum += emg_summary == EmgSummary::kRectifiedMean ? std::fabs(v) : v * v;
  }
  const double n = static_cast<double>(epoch.emg.size());
  row.emg_mean() = emg_summary == EmgSummary::kRectifiedMean
                       ? emg_sum / n
                       : std::sqrt(emg_sum / n);
  row.activity() = epoch.activity;
  return row;
}

// Cuts continuous recordings into consecutive 10-second epochs; a trailing
// partial epoch is dropped. activity_per_epoch[i] feeds epoch i.
inline std::vector<RawEpoch> segment_recording(std::span<const double> eeg,
                                               std::span<const double> emg,
                                               std::span<const double> activity_per_epoch,
                                               double sample_rate_hz) {
  require_arg(eeg.size() == emg.size(),
              "segment_recording: eeg has " + std::to_string(eeg.size()) +
                  " samples but emg has " + std::to_string(emg.size()));
  require_arg(std::isfinite(sample_rate_hz) && sample_rate_hz >= kMinSampleRateHz,
              "segment_recording: sample_rate_hz must be at least " +
                  std::to_string(kMinSampleRateHz) + " Hz");
  const std::size_t per_epoch = epoch_sample_count(sample_rate_hz);
  require_arg(eeg.size() >= per_epoch,
              "segment_recording: recording shorter than one 10-second epoch");

  const std::size_t n_epochs = eeg.size() / per_epoch;
  require_arg(activity_per_epoch.size() >= n_epochs,
              "segment_recording: " + std::to_string(n_epochs) +
                  " epochs but only " + std::to_string(activity_per_epoch.size()) +
                  " activity values");

  std::vector<RawEpoch> epochs;
  epochs.reserve(n_epochs);
  for (std::size_t i = 0; i < n_epochs; ++i) {
    RawEpoch epoch;
    const std::size_t begin = i * per_epoch;
    epoch.eeg.assign(eeg.begin() + begin, eeg.begin() + begin + per_epoch);
    epoch.emg.assign(emg.begin() + begin, emg.begin() + begin + per_epoch);
    epoch.activity = activity_per_epoch[i];
    epoch.sample_rate_hz = sample_rate_hz;
    validate_epoch(epoch);
    epochs.push_back(std::move(epoch));
  }
  return epochs;
}

}  // namespace vigil
