#pragma once

#include <cstddef>
#include <optional>

#include "stealth/sim/mobility.hpp"
#include "stealth/sim/rng.hpp"

namespace stealth::sim {

/// Unit-disk radio with a fixed-plus-serialization-plus-jitter latency.
struct RadioModel {
  double radius = 50.0;          // m
  double base_latency_ms = 0.1;  // ms
  double bitrate = 6e6;          // bit/s
  double jitter_ms = 5.0;        // uniform in [0, jitter_ms]
};

/// The single range predicate shared by the contact table and unicast checks.
/// A non-positive radius connects nothing.
inline bool within_range(Vec2 a, Vec2 b, double radius) {
  if (!(radius > 0.0)) return false;
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  return dx * dx + dy * dy <= radius * radius;
}

/// Latency in milliseconds, or nullopt when the receiver is out of range.
std::optional<double> deliver(std::size_t size_bytes, Vec2 sender, Vec2 receiver,
                              const RadioModel& radio, Rng& rng);

/// Upper bound of deliver() for a message of the given size.
double max_latency_ms(std::size_t size_bytes, const RadioModel& radio);

}  // namespace stealth::sim
