#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "stealth/harness/scenario.hpp"
#include "stealth/metrics.hpp"
#include "stealth/sim/contacts.hpp"
#include "stealth/sim/engine.hpp"
#include "stealth/taxonomy.hpp"

namespace stealth::harness {

inline constexpr std::string_view kVersion = "0.1.0";

/// Synthetic mobility parameters; MEACK pins the receiver and focal nodes
/// around the area centre at the emergency time.
sim::SyntheticParams synthetic_params(const ScenarioConfig& cfg);
/// Loads the configured trace or generates the synthetic one.
sim::MobilityTrace resolve_trace(const ScenarioConfig& cfg);
SkillTaxonomy resolve_taxonomy(const ScenarioConfig& cfg);

std::uint64_t repetition_seed(const ScenarioConfig& cfg, std::size_t rep);
sim::EngineConfig engine_config(const ScenarioConfig& cfg, std::size_t rep);

/// One repetition: fresh social profiles, one engine run.
sim::EventLog run_repetition(const ScenarioConfig& cfg, const sim::MobilityTrace& trace,
                             const sim::ContactTable& contacts, const SkillTaxonomy& tax,
                             std::size_t rep);

struct RepetitionResult {
  std::size_t index = 0;
  std::uint64_t seed = 0;
  bool valid = false;
  std::string error;
  sim::EventLog log;
};

struct ExperimentResult {
  metrics::MetricsReport report;
  std::vector<RepetitionResult> repetitions;
};

/// Runs every repetition (in parallel, up to cfg.workers), aggregates the
/// metrics in repetition order, and when out_dir is set writes report.csv,
/// report.jsonl, report.txt, manifest.txt and logs/rep_<i>.log.
/// A failed repetition is marked invalid; if none succeed the first error is
/// rethrown.
ExperimentResult run_experiment(const ScenarioConfig& cfg,
                                const std::optional<std::filesystem::path>& out_dir = std::nullopt);

/// Writes report.csv, report.jsonl and report.txt.
void write_reports(const metrics::MetricsReport& report, const std::filesystem::path& out_dir);

/// Reads logs/rep_*.log in numeric order.
std::vector<sim::EventLog> load_logs(const std::filesystem::path& out_dir);

}  // namespace stealth::harness
