#include "stealth/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <ostream>
#include <set>

#include <json.hpp>

#include "stealth/errors.hpp"

namespace stealth::metrics {
namespace {

SimTime parse_ms_field(const sim::LogRecord& r, std::string_view key) {
  const auto text = r.at(key);
  const auto dot = text.find('.');
  const auto whole = std::stoll(std::string(text.substr(0, dot)));
  std::int64_t frac = 0;
  if (dot != std::string_view::npos) {
    auto digits = std::string(text.substr(dot + 1));
    digits.resize(3, '0');
    frac = std::stoll(digits);
  }
  return SimTime{whole * 1000 + frac};
}

void require_logs(std::span<const sim::EventLog> logs) {
  if (logs.empty()) throw EmptyLogs("no event logs");
}

double mean(std::span<const double> xs) {
  double s = 0;
  for (double x : xs) s += x;
  return xs.empty() ? 0.0 : s / static_cast<double>(xs.size());
}

double sample_sd(std::span<const double> xs) {
  if (xs.size() < 2) return 0.0;
  const double m = mean(xs);
  double ss = 0;
  for (double x : xs) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(xs.size() - 1));
}

std::string fixed(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

}  // namespace

std::optional<SimTime> FocalRun::latency() const {
  if (!success || !dispatched_at || !received_at) return std::nullopt;
  return *received_at - *dispatched_at;
}

FocalRun summarize_focal(const sim::EventLog& log, NodeId focal) {
  using sim::RecordKind;
  const auto& header = log.header();
  const bool acked = header.at("ack_mode") != "none";
  SimTime warmup = parse_ms_field(header, "warmup_ms");

  FocalRun run;
  std::map<NodeId, std::string> skills;
  std::vector<std::pair<SimTime, std::pair<std::int64_t, std::int64_t>>> samples;
  std::map<std::int64_t, std::pair<SimTime, NodeId>> received;  // attempt -> (time, receiver)
  std::optional<std::pair<std::int64_t, NodeId>> acked_attempt;

  for (const auto& r : log.records) {
    switch (r.kind) {
      case RecordKind::profile:
        skills[r.src] = std::string(r.at("skill"));
        break;
      case RecordKind::transient_end:
        warmup = r.time;
        break;
      case RecordKind::sample:
        if (r.src == focal) samples.push_back({r.time, {r.get_int("nbrs"), r.get_int("coi")}});
        break;
      case RecordKind::emergency:
        if (r.src == focal) run.emergency = true;
        break;
      case RecordKind::send:
        if (r.src == focal && r.at("msg") == "alert") {
          ++run.attempts;
          if (!run.dispatched_at || r.time < *run.dispatched_at) run.dispatched_at = r.time;
        }
        break;
      case RecordKind::alert_rx:
        if (r.src == focal) received[r.get_int("attempt")] = {r.time, r.dst};
        break;
      case RecordKind::ack_ok:
        if (r.dst == focal) acked_attempt = {r.get_int("attempt"), r.src};
        break;
      default:
        break;
    }
  }

  std::stable_sort(samples.begin(), samples.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  for (const auto& [t, v] : samples) {
    if (t < warmup) continue;
    run.neighbors.push_back(v.first);
    run.community.push_back(v.second);
  }
  run.community_at_emergency = run.emergency && run.attempts > 0;

  if (!acked) {
    if (auto it = received.find(1); it != received.end()) {
      run.success = true;
      run.received_at = it->second.first;
      run.receiver = it->second.second;
    }
  } else if (acked_attempt) {
    auto it = received.find(acked_attempt->first);
    if (it == received.end()) throw ParseError(0, "ack without a logged alert receipt");
    run.success = true;
    run.received_at = it->second.first;
    run.receiver = acked_attempt->second;
  }
  if (run.receiver) {
    auto it = skills.find(*run.receiver);
    if (it != skills.end()) run.receiver_skill = it->second;
  }
  return run;
}

double avg_neighbors(std::span<const sim::EventLog> logs, NodeId focal) {
  require_logs(logs);
  double sum = 0;
  std::size_t count = 0;
  for (const auto& log : logs) {
    for (auto n : summarize_focal(log, focal).neighbors) {
      sum += static_cast<double>(n);
      ++count;
    }
  }
  return count ? sum / static_cast<double>(count) : 0.0;
}

CommunityStats avg_communities(std::span<const sim::EventLog> logs, NodeId focal) {
  require_logs(logs);
  std::size_t with_community = 0;
  std::size_t intervals = 0;
  std::size_t episodes = 0;
  for (const auto& log : logs) {
    bool inside = false;
    for (auto c : summarize_focal(log, focal).community) {
      ++intervals;
      if (c > 0) {
        ++with_community;
        if (!inside) ++episodes;
      }
      inside = c > 0;
    }
  }
  CommunityStats s;
  s.interval_avg = intervals ? static_cast<double>(with_community) / static_cast<double>(intervals) : 0.0;
  s.episode_count = static_cast<double>(episodes) / static_cast<double>(logs.size());
  return s;
}

HitRate hit_rate_from_counts(std::size_t successes, std::size_t emergencies) {
  if (emergencies == 0) throw NoEmergencies("no emergencies were triggered");
  HitRate h;
  h.successes = successes;
  h.emergencies = emergencies;
  h.hr = static_cast<double>(successes) / static_cast<double>(emergencies) * 100.0;
  h.fr = 100.0 - h.hr;
  return h;
}

HitRate hit_rate(std::span<const sim::EventLog> logs, NodeId focal) {
  require_logs(logs);
  std::size_t successes = 0;
  std::size_t emergencies = 0;
  for (const auto& log : logs) {
    const auto run = summarize_focal(log, focal);
    emergencies += run.emergency ? 1 : 0;
    successes += run.success ? 1 : 0;
  }
  return hit_rate_from_counts(successes, emergencies);
}

std::map<std::string, double> hit_rate_by_skill(std::span<const sim::EventLog> logs, NodeId focal) {
  require_logs(logs);
  std::map<std::string, double> counts;
  for (const auto& log : logs) {
    for (const auto& r : log.records) {
      if (r.kind == sim::RecordKind::profile) counts.emplace(std::string(r.at("skill")), 0.0);
    }
  }
  std::size_t successes = 0;
  for (const auto& log : logs) {
    const auto run = summarize_focal(log, focal);
    if (!run.success) continue;
    ++successes;
    counts[run.receiver_skill.value_or("unknown")] += 1.0;
  }
  if (successes == 0) throw NoSuccesses("no successful dissemination");
  for (auto& [skill, c] : counts) c = c / static_cast<double>(successes) * 100.0;
  return counts;
}

double avg_access_time(std::span<const sim::EventLog> logs, NodeId focal) {
  require_logs(logs);
  std::vector<double> ms;
  for (const auto& log : logs) {
    if (auto l = summarize_focal(log, focal).latency()) ms.push_back(to_millis(*l));
  }
  if (ms.empty()) throw NoSuccesses("no successful dissemination");
  return mean(ms);
}

MetricsReport compute_report(std::span<const sim::EventLog> logs, std::span<const NodeId> focal) {
  require_logs(logs);
  MetricsReport report;
  report.scenario = std::string(logs.front().header().at("scenario"));
  report.repetitions = logs.size();

  std::set<std::string> population;
  for (const auto& log : logs) {
    for (const auto& r : log.records) {
      if (r.kind == sim::RecordKind::profile) population.emplace(r.at("skill"));
    }
  }

  for (NodeId node : focal) {
    NodeMetrics m;
    m.node = node;
    std::vector<FocalRun> runs;
    runs.reserve(logs.size());
    for (const auto& log : logs) runs.push_back(summarize_focal(log, node));
    m.intervals = runs.front().neighbors.size();

    std::vector<double> per_rep_nbrs;
    std::vector<double> latencies;
    double nbr_sum = 0;
    std::size_t nbr_count = 0;
    std::size_t with_c = 0;
    std::size_t episodes = 0;
    std::size_t successes = 0;
    std::size_t emergencies = 0;
    std::map<std::string, double> skill_hits;
    for (const auto& s : population) skill_hits[s] = 0.0;

    for (const auto& run : runs) {
      double rep_sum = 0;
      for (auto n : run.neighbors) rep_sum += static_cast<double>(n);
      nbr_sum += rep_sum;
      nbr_count += run.neighbors.size();
      if (!run.neighbors.empty()) per_rep_nbrs.push_back(rep_sum / static_cast<double>(run.neighbors.size()));
      bool inside = false;
      for (auto c : run.community) {
        if (c > 0) {
          ++with_c;
          if (!inside) ++episodes;
        }
        inside = c > 0;
      }
      emergencies += run.emergency ? 1 : 0;
      if (run.success) {
        ++successes;
        skill_hits[run.receiver_skill.value_or("unknown")] += 1.0;
        if (auto l = run.latency()) latencies.push_back(to_millis(*l));
      }
    }

    m.avg_neighbors = nbr_count ? nbr_sum / static_cast<double>(nbr_count) : 0.0;
    m.avg_neighbors_sd = sample_sd(per_rep_nbrs);
    m.n_c_interval_avg = nbr_count ? static_cast<double>(with_c) / static_cast<double>(nbr_count) : 0.0;
    m.n_c_episode_count = static_cast<double>(episodes) / static_cast<double>(runs.size());
    if (emergencies > 0) m.rate = hit_rate_from_counts(successes, emergencies);
    if (successes > 0) {
      for (auto& [skill, c] : skill_hits) c = c / static_cast<double>(successes) * 100.0;
      m.hr_by_skill = std::move(skill_hits);
    }
    if (!latencies.empty()) {
      m.access_time_ms = mean(latencies);
      m.access_time_sd_ms = sample_sd(latencies);
    }
    report.nodes.push_back(std::move(m));
  }
  return report;
}

void write_report_text(std::ostream& out, const MetricsReport& r) {
  out << "scenario=" << r.scenario << '\n' << "repetitions=" << r.repetitions << '\n';
  for (const auto& m : r.nodes) {
    const auto p = std::to_string(m.node) + '.';
    out << p << "intervals=" << m.intervals << '\n'
        << p << "avg_neighbors=" << fixed(m.avg_neighbors) << '\n'
        << p << "avg_neighbors_sd=" << fixed(m.avg_neighbors_sd) << '\n'
        << p << "n_c_interval_avg=" << fixed(m.n_c_interval_avg) << '\n'
        << p << "n_c_episode_count=" << fixed(m.n_c_episode_count) << '\n'
        << p << "emergencies=" << m.rate.emergencies << '\n'
        << p << "successes=" << m.rate.successes << '\n'
        << p << "hit_rate=" << fixed(m.rate.hr) << '\n'
        << p << "fault_rate=" << fixed(m.rate.fr) << '\n';
    for (const auto& [skill, v] : m.hr_by_skill) out << p << "hr_skill." << skill << '=' << fixed(v) << '\n';
    if (m.access_time_ms) {
      out << p << "access_time_ms=" << fixed(*m.access_time_ms) << '\n'
          << p << "access_time_sd_ms=" << fixed(m.access_time_sd_ms.value_or(0.0)) << '\n';
    }
  }
}

void write_report_csv(std::ostream& out, const MetricsReport& r) {
  std::set<std::string> skills;
  for (const auto& m : r.nodes) {
    for (const auto& [s, v] : m.hr_by_skill) skills.insert(s);
  }
  out << "scenario,node,reps,intervals,N_N,N_N_sd,N_C_interval,N_C_episodes,emergencies,successes,HR,FR,AT_ms,AT_sd_ms";
  for (const auto& s : skills) out << ",HR_" << s;
  out << '\n';
  for (const auto& m : r.nodes) {
    out << r.scenario << ',' << m.node << ',' << r.repetitions << ',' << m.intervals << ','
        << fixed(m.avg_neighbors) << ',' << fixed(m.avg_neighbors_sd) << ',' << fixed(m.n_c_interval_avg)
        << ',' << fixed(m.n_c_episode_count) << ',' << m.rate.emergencies << ',' << m.rate.successes << ','
        << fixed(m.rate.hr) << ',' << fixed(m.rate.fr) << ','
        << (m.access_time_ms ? fixed(*m.access_time_ms) : std::string()) << ','
        << (m.access_time_sd_ms ? fixed(*m.access_time_sd_ms) : std::string());
    for (const auto& s : skills) {
      auto it = m.hr_by_skill.find(s);
      out << ',' << (it == m.hr_by_skill.end() ? std::string() : fixed(it->second));
    }
    out << '\n';
  }
}

void write_report_jsonl(std::ostream& out, const MetricsReport& r) {
  for (const auto& m : r.nodes) {
    nlohmann::ordered_json j;
    j["scenario"] = r.scenario;
    j["node"] = m.node;
    j["repetitions"] = r.repetitions;
    j["intervals"] = m.intervals;
    j["avg_neighbors"] = m.avg_neighbors;
    j["avg_neighbors_sd"] = m.avg_neighbors_sd;
    j["n_c_interval_avg"] = m.n_c_interval_avg;
    j["n_c_episode_count"] = m.n_c_episode_count;
    j["emergencies"] = m.rate.emergencies;
    j["successes"] = m.rate.successes;
    j["hit_rate"] = m.rate.hr;
    j["fault_rate"] = m.rate.fr;
    j["hr_by_skill"] = m.hr_by_skill;
    j["access_time_ms"] = m.access_time_ms ? nlohmann::ordered_json(*m.access_time_ms) : nullptr;
    j["access_time_sd_ms"] = m.access_time_sd_ms ? nlohmann::ordered_json(*m.access_time_sd_ms) : nullptr;
    out << j.dump() << '\n';
  }
}

}  // namespace stealth::metrics
