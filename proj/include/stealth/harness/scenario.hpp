#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "stealth/sim/engine.hpp"
#include "stealth/sim/event_log.hpp"
#include "stealth/sim/mobility.hpp"
#include "stealth/sim/radio.hpp"
#include "stealth/types.hpp"

namespace stealth::harness {

enum class ScenarioKind : std::uint8_t { senack, seack, meack };
std::string_view to_string(ScenarioKind k);
std::optional<ScenarioKind> parse_scenario_kind(std::string_view s);

enum class SkillAssignment : std::uint8_t {
  fill_other,  // exact counts, remaining nodes get "other"
  weights,     // counts used as sampling weights
};
std::string_view to_string(SkillAssignment s);

struct ScenarioConfig {
  ScenarioKind kind = ScenarioKind::senack;
  std::size_t n_nodes = 100;
  double duration_s = 900.0;
  double warmup_s = 25.0;
  double emergency_time_s = 300.0;
  std::vector<NodeId> focal_nodes{37, 52, 70};
  std::optional<NodeId> receiver;            // pinned doctor (MEACK)
  std::map<NodeId, std::uint8_t> priorities;  // MEACK only
  double announce_interval_s = 1.0;
  double ack_timeout_ms = 500.0;
  double ack_window_ms = 20.0;
  sim::RadioModel radio;
  std::size_t repetitions = 35;
  std::uint64_t seed = 1;

  // Synthetic mobility.
  sim::Area area;
  double speed_min = 0.5;
  double speed_max = 2.0;
  double snapshot_interval_s = 0.6;
  std::optional<std::filesystem::path> trace_path;  // unset: synthetic

  std::optional<std::filesystem::path> taxonomy_path;
  SkillAssignment skill_assignment = SkillAssignment::fill_other;
  sim::LogLevel log_level = sim::LogLevel::focal;
  sim::LogFormat log_format = sim::LogFormat::csv;
  std::size_t workers = 0;  // 0: OpenMP default

  bool ack_required() const { return kind != ScenarioKind::senack; }
};

using Overrides = std::vector<std::pair<std::string, std::string>>;

/// Defaults for the named scenario, then the overrides in order.
/// Throws UnknownScenario, InvalidOverride.
ScenarioConfig build_scenario(std::string_view name, const Overrides& overrides = {});

/// Applies one `key=value` setting; keys are the CLI flag names without the
/// leading dashes (e.g. "announce-interval"). Throws InvalidOverride.
void apply_override(ScenarioConfig& cfg, std::string_view key, std::string_view value);

/// Throws InvalidOverride when the configuration is inconsistent.
void validate(const ScenarioConfig& cfg);

/// Flat `key=value` text; blank lines and '#' comments ignored.
/// Throws ParseError.
Overrides parse_config_text(std::istream& in);
Overrides load_config_file(const std::filesystem::path& path);

/// Every setting as `key=value` lines, loadable by parse_config_text.
std::string to_config_text(const ScenarioConfig& cfg);

}  // namespace stealth::harness
