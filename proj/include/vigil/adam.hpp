#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "vigil/common.hpp"

namespace vigil {

struct AdamParams {
  double alpha = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

// Moment accumulators for one parameter tensor. t counts completed updates.
struct AdamState {
  std::vector<double> m;
  std::vector<double> v;
  std::int64_t t = 0;
  AdamParams params;

  explicit AdamState(std::size_t size, AdamParams p = {})
      : m(size, 0.0), v(size, 0.0), params(p) {}
};

inline void adam_step(std::span<double> parameters, std::span<const double> gradients,
                      AdamState& state) {
  require_arg(parameters.size() == gradients.size() && parameters.size() == state.m.size(),
              "adam_step: shape mismatch");
  state.t += 1;
  const double b1 = state.params.beta1;
  const double b2 = state.params.beta2;
  const double bias1 = 1.0 - std::pow(b1, static_cast<double>(state.t));
  const double bias2 = 1.0 - std::pow(b2, static_cast<double>(state.t));
  for (std::size_t i = 0; i < parameters.size(); ++i) {
    const double g = gradients[i];
    state.m[i] = b1 * state.m[i] + (1.0 - b1) * g;
    state.v[i] = b2 * state.v[i] + (1.0 - b2) * g * g;
    const double m_hat = state.m[i] / bias1;
    const double v_hat = state.v[i] / bias2;
    parameters[i] -= state.params.alpha * m_hat / (std::sqrt(v_hat) + state.params.epsilon);
  }
}

}  // namespace vigil
