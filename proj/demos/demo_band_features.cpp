// Minimal feature-extraction walkthrough: synthesize one slow-wave-like epoch,
// run the DFT band-power pipeline, and print the 42 features.

#include <cstdio>

#include "vigil/signal_features.hpp"
#include "vigil/synthetic.hpp"

int main() {
  vigil::SyntheticSpec spec;
  spec.epochs_per_class = 1;
  spec.seed = 1;
  spec.separability = 1.0;

  const auto epochs = vigil::generate_raw(spec, 500.0);
  for (const auto& [epoch, label] : epochs) {
    const vigil::FeatureRow row = vigil::extract_features(epoch);
    std::printf("%s epoch: %zu samples at %.0f Hz\n",
                vigil::state_name(label).c_str(), epoch.eeg.size(),
                epoch.sample_rate_hz);
    for (int band = 0; band < vigil::kBandCount; ++band) {
      std::printf("  band %2d [%4.1f, %4.1f) Hz: %12.2f\n", band, 0.5 * band,
                  0.5 * (band + 1), row.band(band));
    }
    std::printf("  emg mean: %.4f, activity: %.4f\n\n", row.emg_mean(), row.activity());
  }
  return 0;
}
