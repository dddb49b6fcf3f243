#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "test_util.hpp"
#include "vigil/signal_features.hpp"

using vigil::FeatureRow;
using vigil::PowerSpectrum;
using vigil::RawEpoch;
using vigil::Rng;

namespace {

RawEpoch make_epoch(double rate = 500.0) {
  RawEpoch epoch;
  epoch.sample_rate_hz = rate;
  epoch.eeg.assign(vigil::epoch_sample_count(rate), 0.0);
  epoch.emg.assign(vigil::epoch_sample_count(rate), 0.0);
  return epoch;
}

RawEpoch sine_epoch(double freq_hz, double rate = 500.0) {
  RawEpoch epoch = make_epoch(rate);
  for (std::size_t i = 0; i < epoch.eeg.size(); ++i) {
    epoch.eeg[i] =
        std::sin(2.0 * std::numbers::pi * freq_hz * static_cast<double>(i) / rate);
  }
  return epoch;
}

}  // namespace

TEST_CASE("DC-only spectrum lands in the first band", "[bands]") {
  PowerSpectrum spectrum;
  spectrum.bin_hz = 0.1;
  spectrum.power.assign(251, 0.0);
  spectrum.power[0] = 7.5;
  const auto bands = vigil::band_powers(spectrum);
  REQUIRE(bands[0] == 7.5);
  for (int i = 1; i < vigil::kBandCount; ++i) REQUIRE(bands[i] == 0.0);
}

TEST_CASE("power at exactly 5.0 Hz falls in band 10", "[bands]") {
  PowerSpectrum spectrum;
  spectrum.bin_hz = 0.1;
  spectrum.power.assign(251, 0.0);
  spectrum.power[50] = 3.0;  // 50 * 0.1 = 5.0 Hz, half-open bands: [5.0, 5.5)
  const auto bands = vigil::band_powers(spectrum);
  REQUIRE(bands[10] == 3.0);
  for (int i = 0; i < vigil::kBandCount; ++i) {
    if (i != 10) REQUIRE(bands[i] == 0.0);
  }
}

TEST_CASE("band sums match the oracle grouped by the same intervals", "[bands][oracle]") {
  Rng rng(11);
  const std::vector<double> samples = testutil::random_signal(rng, 5000);
  const PowerSpectrum spectrum = vigil::dft_power(samples, 500.0);
  const auto bands = vigil::band_powers(spectrum);

  // Group the oracle's bins with the identical half-open rule and identical
  // per-band addition order; band values must match bitwise.
  const PowerSpectrum naive = testutil::naive_dft_power(samples, 500.0);
  std::array<double, vigil::kBandCount> expected{};
  for (std::size_t k = 0; k < naive.power.size(); ++k) {
    const double freq = static_cast<double>(k) * naive.bin_hz;
    if (freq >= 20.0) break;
    expected[static_cast<std::size_t>(static_cast<int>(2.0 * freq))] += naive.power[k];
  }
  for (int i = 0; i < vigil::kBandCount; ++i) {
    REQUIRE(bands[i] == Catch::Approx(expected[i]).epsilon(1e-9));
  }

  // Partition property: grouped additions over the fast spectrum reproduce the
  // band values exactly.
  std::array<double, vigil::kBandCount> regrouped{};
  for (std::size_t k = 0; k < spectrum.power.size(); ++k) {
    const double freq = static_cast<double>(k) * spectrum.bin_hz;
    if (freq >= 20.0) break;
    regrouped[static_cast<std::size_t>(static_cast<int>(2.0 * freq))] += spectrum.power[k];
  }
  for (int i = 0; i < vigil::kBandCount; ++i) REQUIRE(bands[i] == regrouped[i]);
}

TEST_CASE("band_powers rejects spectra that do not reach 20 Hz", "[bands][errors]") {
  PowerSpectrum spectrum;
  spectrum.bin_hz = 0.1;
  spectrum.power.assign(100, 1.0);  // covers 9.9 Hz only
  REQUIRE_THROWS_AS(vigil::band_powers(spectrum), std::invalid_argument);
}

TEST_CASE("zero signals give zero features; activity passes through", "[features]") {
  RawEpoch epoch = make_epoch();
  epoch.activity = 3.0;
  const FeatureRow row = vigil::extract_features(epoch);
  for (int i = 0; i < vigil::kBandCount; ++i) REQUIRE(row.band(i) == 0.0);
  REQUIRE(row.emg_mean() == 0.0);
  REQUIRE(row.activity() == 3.0);
  REQUIRE_FALSE(row.label.has_value());
}

TEST_CASE("EMG summary is rectified: constant -2 gives mean 2", "[features]") {
  RawEpoch epoch = make_epoch();
  epoch.emg.assign(epoch.emg.size(), -2.0);
  REQUIRE(vigil::extract_features(epoch).emg_mean() == 2.0);

  // RMS alternative: samples {0, -2, 0, -2, ...} -> rectified mean 1, rms sqrt(2).
  for (std::size_t i = 0; i < epoch.emg.size(); ++i) epoch.emg[i] = i % 2 == 0 ? 0.0 : -2.0;
  REQUIRE(vigil::extract_features(epoch).emg_mean() == Catch::Approx(1.0));
  REQUIRE(vigil::extract_features(epoch, vigil::EmgSummary::kRootMeanSquare).emg_mean() ==
          Catch::Approx(std::sqrt(2.0)));
}

TEST_CASE("slow-wave style 2 Hz sinusoid peaks in band 4", "[features]") {
  const FeatureRow row = vigil::extract_features(sine_epoch(2.0));
  int argmax = 0;
  for (int i = 1; i < vigil::kBandCount; ++i) {
    if (row.band(i) > row.band(argmax)) argmax = i;
  }
  REQUIRE(argmax == 4);  // [2.0, 2.5)
}

TEST_CASE("extract_features is deterministic and EEG-scale covariant", "[features][property]") {
  Rng rng(23);
  RawEpoch epoch = make_epoch();
  for (auto& v : epoch.eeg) v = 2.0 * rng.uniform() - 1.0;
  for (auto& v : epoch.emg) v = 2.0 * rng.uniform() - 1.0;
  epoch.activity = 1.25;

  const FeatureRow base = vigil::extract_features(epoch);
  const FeatureRow again = vigil::extract_features(epoch);
  REQUIRE(base.values == again.values);

  for (double scale : {2.0, 3.0}) {
    RawEpoch scaled = epoch;
    for (auto& v : scaled.eeg) v *= scale;
    const FeatureRow row = vigil::extract_features(scaled);
    const double tolerance = scale == 2.0 ? 1e-12 : 1e-9;
    for (int i = 0; i < vigil::kBandCount; ++i) {
      REQUIRE(row.band(i) == Catch::Approx(scale * scale * base.band(i))
                                 .epsilon(tolerance)
                                 .margin(1e-300));
    }
    REQUIRE(row.emg_mean() == base.emg_mean());
  }
}

TEST_CASE("epoch validation is strict", "[features][errors]") {
  RawEpoch epoch = make_epoch();
  epoch.eeg.pop_back();
  REQUIRE_THROWS_AS(vigil::extract_features(epoch), std::invalid_argument);

  epoch = make_epoch(39.0);  // below the 40 Hz floor
  REQUIRE_THROWS_AS(vigil::extract_features(epoch), std::invalid_argument);

  epoch = make_epoch();
  epoch.activity = -1.0;
  REQUIRE_THROWS_AS(vigil::extract_features(epoch), std::invalid_argument);
}

TEST_CASE("segment_recording floors to whole epochs", "[segment]") {
  const double rate = 500.0;
  const std::size_t per_epoch = vigil::epoch_sample_count(rate);

  SECTION("25 s becomes 2 epochs, remainder dropped") {
    std::vector<double> eeg(per_epoch * 2 + per_epoch / 2, 1.0);
    std::vector<double> emg(eeg.size(), 0.5);
    std::vector<double> activity = {1.0, 2.0, 3.0};
    const auto epochs = vigil::segment_recording(eeg, emg, activity, rate);
    REQUIRE(epochs.size() == 2);
    REQUIRE(epochs[0].activity == 1.0);
    REQUIRE(epochs[1].activity == 2.0);
    REQUIRE(epochs[1].eeg.size() == per_epoch);
  }

  SECTION("exactly 10 s becomes 1 epoch") {
    std::vector<double> eeg(per_epoch, 0.0), emg(per_epoch, 0.0);
    std::vector<double> activity = {0.0};
    REQUIRE(vigil::segment_recording(eeg, emg, activity, rate).size() == 1);
  }

  SECTION("epoch arithmetic at recording scale") {
    // 571 h at 40 Hz: 2,055,600 s of signal -> 205,560 epochs.
    REQUIRE(vigil::epoch_count(2'055'600ull * 40ull, 40.0) == 205'560);
    // 427 labeled hours correspond to 153,720 epochs, the order of the
    // 154,043-row scale the segmenter must support.
    REQUIRE(vigil::epoch_count(427ull * 3600ull * 40ull, 40.0) == 153'720);
  }

  SECTION("errors") {
    std::vector<double> eeg(per_epoch, 0.0), emg(per_epoch - 1, 0.0);
    std::vector<double> activity = {0.0};
    REQUIRE_THROWS_AS(vigil::segment_recording(eeg, emg, activity, rate),
                      std::invalid_argument);
    emg.push_back(0.0);
    REQUIRE_THROWS_AS(vigil::segment_recording(eeg, emg, {}, rate), std::invalid_argument);
    std::vector<double> short_eeg(per_epoch - 1, 0.0), short_emg(per_epoch - 1, 0.0);
    REQUIRE_THROWS_AS(vigil::segment_recording(short_eeg, short_emg, activity, rate),
                      std::invalid_argument);
  }
}
