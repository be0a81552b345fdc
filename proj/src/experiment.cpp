#include "stealth/harness/experiment.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <exception>
#include <fstream>
#include <numbers>

#include "stealth/errors.hpp"
#include "stealth/harness/social.hpp"

namespace stealth::harness {
namespace {

constexpr double kRingRadius = 15.0;

AckMode ack_mode(ScenarioKind k) {
  switch (k) {
    case ScenarioKind::senack: return AckMode::none;
    case ScenarioKind::seack: return AckMode::immediate;
    case ScenarioKind::meack: return AckMode::by_priority;
  }
  return AckMode::none;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path.string());
  return out;
}

}  // namespace

sim::SyntheticParams synthetic_params(const ScenarioConfig& cfg) {
  sim::SyntheticParams p;
  p.n_nodes = cfg.n_nodes;
  p.area = cfg.area;
  p.speed_min = cfg.speed_min;
  p.speed_max = cfg.speed_max;
  p.duration = from_seconds(cfg.duration_s);
  p.snapshot_interval = from_seconds(cfg.snapshot_interval_s);
  p.seed = cfg.seed;
  if (cfg.receiver) {
    const sim::Vec2 centre{cfg.area.width / 2, cfg.area.height / 2};
    const auto at = from_seconds(cfg.emergency_time_s);
    p.rendezvous.push_back({*cfg.receiver, at, centre});
    const auto m = static_cast<double>(cfg.focal_nodes.size());
    for (std::size_t k = 0; k < cfg.focal_nodes.size(); ++k) {
      const double a = 2 * std::numbers::pi * static_cast<double>(k) / m;
      p.rendezvous.push_back(
          {cfg.focal_nodes[k], at, {centre.x + kRingRadius * std::cos(a), centre.y + kRingRadius * std::sin(a)}});
    }
  }
  return p;
}

sim::MobilityTrace resolve_trace(const ScenarioConfig& cfg) {
  if (!cfg.trace_path) return sim::generate_synthetic(synthetic_params(cfg));
  auto trace = sim::load_trace(*cfg.trace_path);
  if (trace.node_count != cfg.n_nodes) {
    throw ConfigError("trace has " + std::to_string(trace.node_count) + " nodes, config expects " +
                      std::to_string(cfg.n_nodes));
  }
  return trace;
}

SkillTaxonomy resolve_taxonomy(const ScenarioConfig& cfg) {
  return cfg.taxonomy_path ? SkillTaxonomy::load(*cfg.taxonomy_path) : SkillTaxonomy::build_default();
}

std::uint64_t repetition_seed(const ScenarioConfig& cfg, std::size_t rep) { return cfg.seed + rep; }

sim::EngineConfig engine_config(const ScenarioConfig& cfg, std::size_t rep) {
  sim::EngineConfig e;
  e.scenario = std::string(to_string(cfg.kind));
  e.duration = from_seconds(cfg.duration_s);
  e.warmup = from_seconds(cfg.warmup_s);
  e.announce_interval = from_seconds(cfg.announce_interval_s);
  e.agent.ack_mode = ack_mode(cfg.kind);
  e.agent.ack_timeout = from_millis(cfg.ack_timeout_ms);
  e.agent.ack_batch_window = from_millis(cfg.ack_window_ms);
  e.radio = cfg.radio;
  const auto at = from_seconds(cfg.emergency_time_s);
  for (auto id : cfg.focal_nodes) {
    auto it = cfg.priorities.find(id);
    e.emergencies.push_back({id, at, it == cfg.priorities.end() ? std::uint8_t{1} : it->second});
  }
  e.sampled_nodes = cfg.focal_nodes;
  e.log_level = cfg.log_level;
  e.seed = repetition_seed(cfg, rep);
  e.repetition = static_cast<std::uint32_t>(rep);
  return e;
}

sim::EventLog run_repetition(const ScenarioConfig& cfg, const sim::MobilityTrace& trace,
                             const sim::ContactTable& contacts, const SkillTaxonomy& tax, std::size_t rep) {
  const auto seed = repetition_seed(cfg, rep);
  const auto profiles = assign_social_aspects(cfg.n_nodes, SocialDistribution::defaults().scaled_to(cfg.n_nodes),
                                              fixed_profiles(cfg, tax), tax, seed, cfg.skill_assignment);
  return sim::run(engine_config(cfg, rep), trace, contacts, profiles, tax);
}

ExperimentResult run_experiment(const ScenarioConfig& cfg, const std::optional<std::filesystem::path>& out_dir) {
  validate(cfg);
  const auto trace = resolve_trace(cfg);
  const auto tax = resolve_taxonomy(cfg);
  const auto contacts = sim::build_contacts(trace, cfg.radio.radius);

  const auto reps = static_cast<std::int64_t>(cfg.repetitions);
  ExperimentResult result;
  result.repetitions.resize(cfg.repetitions);
  std::vector<std::exception_ptr> errors(cfg.repetitions);
  const int workers = cfg.workers > 0 ? static_cast<int>(cfg.workers) : omp_get_max_threads();

#pragma omp parallel for schedule(dynamic) num_threads(workers)
  for (std::int64_t i = 0; i < reps; ++i) {
    auto& r = result.repetitions[static_cast<std::size_t>(i)];
    r.index = static_cast<std::size_t>(i);
    r.seed = repetition_seed(cfg, r.index);
    try {
      r.log = run_repetition(cfg, trace, contacts, tax, r.index);
      r.valid = true;
    } catch (const std::exception& e) {
      r.error = e.what();
      errors[r.index] = std::current_exception();
    }
  }

  std::vector<sim::EventLog> logs;
  for (const auto& r : result.repetitions) {
    if (r.valid) logs.push_back(r.log);
  }

  if (out_dir) {
    std::filesystem::create_directories(*out_dir / "logs");
    for (const auto& r : result.repetitions) {
      auto out = open_out(*out_dir / "logs" / ("rep_" + std::to_string(r.index) + ".log"));
      if (r.valid) sim::write_event_log(out, r.log, cfg.log_format);
    }
    auto manifest = open_out(*out_dir / "manifest.txt");
    manifest << "# stealth " << kVersion << '\n' << "# seeds";
    for (const auto& r : result.repetitions) manifest << ' ' << r.seed;
    manifest << '\n' << "# invalid";
    for (const auto& r : result.repetitions) {
      if (!r.valid) manifest << ' ' << r.index;
    }
    manifest << '\n' << "# fixed profiles count toward the social distribution targets\n";
    for (const auto& r : result.repetitions) {
      if (!r.valid) manifest << "# rep " << r.index << " failed: " << r.error << '\n';
    }
    manifest << to_config_text(cfg);
  }

  if (logs.empty()) {
    for (auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }
  result.report = metrics::compute_report(logs, cfg.focal_nodes);
  if (out_dir) write_reports(result.report, *out_dir);
  return result;
}

void write_reports(const metrics::MetricsReport& report, const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  auto csv = open_out(out_dir / "report.csv");
  metrics::write_report_csv(csv, report);
  auto jsonl = open_out(out_dir / "report.jsonl");
  metrics::write_report_jsonl(jsonl, report);
  auto txt = open_out(out_dir / "report.txt");
  metrics::write_report_text(txt, report);
}

std::vector<sim::EventLog> load_logs(const std::filesystem::path& out_dir) {
  const auto dir = out_dir / "logs";
  if (!std::filesystem::is_directory(dir)) throw EmptyLogs("no logs directory in " + out_dir.string());
  std::vector<std::pair<std::size_t, std::filesystem::path>> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    const auto name = entry.path().filename().string();
    if (!name.starts_with("rep_") || !name.ends_with(".log")) continue;
    const auto digits = name.substr(4, name.size() - 8);
    if (digits.empty() || !std::all_of(digits.begin(), digits.end(), [](char c) { return c >= '0' && c <= '9'; })) {
      continue;
    }
    files.emplace_back(std::stoull(digits), entry.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<sim::EventLog> logs;
  for (const auto& [index, path] : files) {
    if (std::filesystem::file_size(path) == 0) continue;  // invalid repetition
    std::ifstream in(path, std::ios::binary);
    logs.push_back(sim::read_event_log(in));
  }
  if (logs.empty()) throw EmptyLogs("no repetition logs in " + dir.string());
  return logs;
}

}  // namespace stealth::harness
