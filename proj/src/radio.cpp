#include "stealth/sim/radio.hpp"

namespace stealth::sim {

double max_latency_ms(std::size_t size_bytes, const RadioModel& radio) {
  return radio.base_latency_ms + static_cast<double>(size_bytes) * 8.0 / radio.bitrate * 1000.0 +
         radio.jitter_ms;
}

std::optional<double> deliver(std::size_t size_bytes, Vec2 sender, Vec2 receiver,
                              const RadioModel& radio, Rng& rng) {
  if (!within_range(sender, receiver, radio.radius)) return std::nullopt;
  double latency = radio.base_latency_ms + static_cast<double>(size_bytes) * 8.0 / radio.bitrate * 1000.0;
  if (radio.jitter_ms > 0.0) latency += rng.uniform(0.0, radio.jitter_ms);
  return latency;
}

}  // namespace stealth::sim
