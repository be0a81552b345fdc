#pragma once

// Deterministic discrete-event engine. Drives one NodeAgent per node over a
// mobility trace; the event log is a pure function of the inputs.
//
// Event order: time, then rank (snapshot/marker < delivery < emergency <
// timer), then the acting node id (sender for deliveries), then insertion
// sequence.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "stealth/protocol.hpp"
#include "stealth/sim/contacts.hpp"
#include "stealth/sim/event_log.hpp"
#include "stealth/sim/mobility.hpp"
#include "stealth/sim/radio.hpp"

namespace stealth::sim {

struct EmergencySpec {
  NodeId node = 0;
  SimTime time{};
  std::uint8_t priority = 1;
};

enum class LogLevel : std::uint8_t {
  full,   // every message and registration
  focal,  // announce/answer traffic only when a sampled node is involved
};
std::string_view to_string(LogLevel l);
std::string_view to_string(AckMode m);

struct EngineConfig {
  std::string scenario = "senack";
  SimTime duration = SimTime{900'000'000};
  SimTime warmup = SimTime{25'000'000};
  SimTime announce_interval = SimTime{1'000'000};
  AgentConfig agent;
  RadioModel radio;
  std::vector<EmergencySpec> emergencies;
  /// Nodes whose neighborhood and community are sampled at every snapshot.
  std::vector<NodeId> sampled_nodes;
  LogLevel log_level = LogLevel::full;
  std::uint64_t seed = 1;
  std::uint32_t repetition = 0;
};

/// Throws ConfigError when the inputs are inconsistent (profile count, trace
/// coverage, node ids, non-positive intervals).
EventLog run(const EngineConfig& cfg, const MobilityTrace& trace, const ContactTable& contacts,
             std::span<const NodeProfile> profiles, const SkillTaxonomy& tax);

}  // namespace stealth::sim
