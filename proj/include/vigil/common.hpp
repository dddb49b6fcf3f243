#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace vigil {

inline constexpr int kNumClasses = 3;

// Class index order is fixed: P = 0, S = 1, W = 2.
enum class VigilanceState : int {
  Paradoxical = 0,
  SlowWave = 1,
  Wake = 2,
};

inline constexpr std::array<VigilanceState, kNumClasses> kAllStates = {
    VigilanceState::Paradoxical, VigilanceState::SlowWave, VigilanceState::Wake};

inline constexpr int class_index(VigilanceState s) { return static_cast<int>(s); }

inline VigilanceState state_from_index(int index) {
  if (index < 0 || index >= kNumClasses) {
    throw std::invalid_argument("state_from_index: index " + std::to_string(index) +
                                " out of range [0, 3)");
  }
  return static_cast<VigilanceState>(index);
}

inline char state_code(VigilanceState s) {
  switch (s) {
    case VigilanceState::Paradoxical: return 'P';
    case VigilanceState::SlowWave: return 'S';
    case VigilanceState::Wake: return 'W';
  }
  return '?';
}

inline std::string state_name(VigilanceState s) {
  switch (s) {
    case VigilanceState::Paradoxical: return "paradoxical";
    case VigilanceState::SlowWave: return "slow-wave";
    case VigilanceState::Wake: return "wake";
  }
  return "unknown";
}

inline std::optional<VigilanceState> parse_state(std::string_view text) {
  if (text.size() != 1) return std::nullopt;
  switch (text.front()) {
    case 'P': return VigilanceState::Paradoxical;
    case 'S': return VigilanceState::SlowWave;
    case 'W': return VigilanceState::Wake;
    default: return std::nullopt;
  }
}

using ClassProbabilities = std::array<double, kNumClasses>;

// Argmax with ties broken toward the lowest class index (P < S < W).
inline VigilanceState predicted_class(const ClassProbabilities& probs) {
  int best = 0;
  for (int c = 1; c < kNumClasses; ++c) {
    if (probs[c] > probs[best]) best = c;
  }
  return static_cast<VigilanceState>(best);
}

// Malformed or unreadable data files (CSV schemas, model documents).
struct SchemaError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Non-finite values or failed training runs.
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline void require_arg(bool condition, const std::string& message) {
  if (!condition) throw std::invalid_argument(message);
}

}  // namespace vigil
