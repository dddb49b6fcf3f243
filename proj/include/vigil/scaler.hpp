#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "vigil/common.hpp"
#include "vigil/dataset.hpp"

namespace vigil {

// Per-feature z-score parameters, fit on training data only. Constant features
// get unit scale so transformed values stay finite.
struct FeatureScaler {
  std::vector<double> mean;
  std::vector<double> stddev;

  bool fitted() const { return !mean.empty(); }

  void fit(std::span<const WindowedSample> samples) {
    require_arg(!samples.empty(), "FeatureScaler::fit: no samples");
    const std::size_t dim = samples.front().features.size();
    mean.assign(dim, 0.0);
    stddev.assign(dim, 0.0);
    const double n = static_cast<double>(samples.size());
    for (const WindowedSample& s : samples) {
      require_arg(s.features.size() == dim, "FeatureScaler::fit: ragged feature rows");
      for (std::size_t f = 0; f < dim; ++f) mean[f] += s.features[f];
    }
    for (std::size_t f = 0; f < dim; ++f) mean[f] /= n;
    for (const WindowedSample& s : samples) {
      for (std::size_t f = 0; f < dim; ++f) {
        const double d = s.features[f] - mean[f];
        stddev[f] += d * d;
      }
    }
    for (std::size_t f = 0; f < dim; ++f) {
      stddev[f] = std::sqrt(stddev[f] / n);
      if (stddev[f] < 1e-12) stddev[f] = 1.0;
    }
  }

  void transform_in_place(std::span<double> features) const {
    require_arg(features.size() == mean.size(),
                "FeatureScaler: feature dimension mismatch");
    for (std::size_t f = 0; f < features.size(); ++f) {
      features[f] = (features[f] - mean[f]) / stddev[f];
    }
  }

  std::vector<double> transform(std::span<const double> features) const {
    std::vector<double> out(features.begin(), features.end());
    transform_in_place(out);
    return out;
  }
};

}  // namespace vigil
