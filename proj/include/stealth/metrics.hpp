#pragma once

// Evaluation metrics over the event logs of a set of repetitions: average
// neighbors, health communities, hit/fault rate, hit rate by receiver
// competence, and access time.

#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "stealth/sim/event_log.hpp"
#include "stealth/types.hpp"

namespace stealth::metrics {

/// What one log says about one focal node.
struct FocalRun {
  std::vector<std::int64_t> neighbors;  // per post-transient snapshot
  std::vector<std::int64_t> community;  // persistent community size, same samples
  bool emergency = false;
  bool community_at_emergency = false;  // an alert could be addressed
  bool success = false;
  int attempts = 0;  // alerts sent
  std::optional<NodeId> receiver;
  std::optional<std::string> receiver_skill;
  std::optional<SimTime> dispatched_at;  // first alert send
  std::optional<SimTime> received_at;    // receipt of the successful alert
  std::optional<SimTime> latency() const;
};

/// Throws ParseError on a malformed log.
FocalRun summarize_focal(const sim::EventLog& log, NodeId focal);

/// Mean neighborhood size over all post-transient snapshots of all logs.
/// Throws EmptyLogs.
double avg_neighbors(std::span<const sim::EventLog> logs, NodeId focal);

struct CommunityStats {
  double interval_avg = 0.0;   // fraction of snapshots with a non-empty community
  double episode_count = 0.0;  // empty -> non-empty transitions per run
};
/// Throws EmptyLogs.
CommunityStats avg_communities(std::span<const sim::EventLog> logs, NodeId focal);

struct HitRate {
  double hr = 0.0;
  double fr = 0.0;
  std::size_t successes = 0;
  std::size_t emergencies = 0;
};
HitRate hit_rate_from_counts(std::size_t successes, std::size_t emergencies);
/// Throws EmptyLogs, NoEmergencies.
HitRate hit_rate(std::span<const sim::EventLog> logs, NodeId focal);

/// Percent of successes per receiver competence. Every competence present in
/// the population appears, zero when it never received. Throws NoSuccesses.
std::map<std::string, double> hit_rate_by_skill(std::span<const sim::EventLog> logs, NodeId focal);

/// Mean dissemination-to-receipt time in milliseconds over successful
/// repetitions. Throws NoSuccesses.
double avg_access_time(std::span<const sim::EventLog> logs, NodeId focal);

struct NodeMetrics {
  NodeId node = kNoNode;
  std::size_t intervals = 0;  // t_s of the first repetition
  double avg_neighbors = 0.0;
  double avg_neighbors_sd = 0.0;  // across repetitions
  double n_c_interval_avg = 0.0;
  double n_c_episode_count = 0.0;
  HitRate rate;
  std::map<std::string, double> hr_by_skill;  // empty without successes
  std::optional<double> access_time_ms;
  std::optional<double> access_time_sd_ms;
};

struct MetricsReport {
  std::string scenario;
  std::size_t repetitions = 0;
  std::vector<NodeMetrics> nodes;
};

/// Throws EmptyLogs.
MetricsReport compute_report(std::span<const sim::EventLog> logs, std::span<const NodeId> focal);

/// `node.metric=value` lines.
void write_report_text(std::ostream& out, const MetricsReport& r);
/// One row per focal node, competence columns in label order.
void write_report_csv(std::ostream& out, const MetricsReport& r);
/// One JSON object per focal node.
void write_report_jsonl(std::ostream& out, const MetricsReport& r);

}  // namespace stealth::metrics
