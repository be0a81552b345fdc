#pragma once

#include <chrono>
#include <cstdint>
#include <limits>

namespace stealth {

using NodeId = std::uint32_t;
inline constexpr NodeId kNoNode = std::numeric_limits<NodeId>::max();

/// Simulation clock. Microsecond ticks keep event ordering exact.
using SimTime = std::chrono::microseconds;

inline constexpr SimTime from_seconds(double s) {
  return SimTime{static_cast<std::int64_t>(s * 1e6 + (s >= 0 ? 0.5 : -0.5))};
}
inline constexpr SimTime from_millis(double ms) {
  return SimTime{static_cast<std::int64_t>(ms * 1e3 + (ms >= 0 ? 0.5 : -0.5))};
}
inline constexpr double to_seconds(SimTime t) { return static_cast<double>(t.count()) / 1e6; }
inline constexpr double to_millis(SimTime t) { return static_cast<double>(t.count()) / 1e3; }

}  // namespace stealth
