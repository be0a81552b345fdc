#include "stealth/harness/scenario.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <sstream>

#include "stealth/errors.hpp"

namespace stealth::harness {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

[[noreturn]] void bad(std::string_view key, std::string_view value, std::string_view why) {
  throw InvalidOverride("invalid value '" + std::string(value) + "' for " + std::string(key) + ": " +
                        std::string(why));
}

double to_double(std::string_view key, std::string_view v) {
  v = trim(v);
  double out = 0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || ptr != v.data() + v.size()) bad(key, v, "expected a number");
  return out;
}

std::uint64_t to_uint(std::string_view key, std::string_view v) {
  v = trim(v);
  std::uint64_t out = 0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || ptr != v.data() + v.size()) bad(key, v, "expected a non-negative integer");
  return out;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  while (true) {
    auto pos = s.find(sep);
    auto part = trim(s.substr(0, pos));
    if (!part.empty()) out.push_back(part);
    if (pos == std::string_view::npos) break;
    s.remove_prefix(pos + 1);
  }
  return out;
}

std::string ids_text(const std::vector<NodeId>& ids) {
  std::string out;
  for (auto id : ids) {
    if (!out.empty()) out.push_back(',');
    out += std::to_string(id);
  }
  return out;
}

}  // namespace

std::string_view to_string(ScenarioKind k) {
  switch (k) {
    case ScenarioKind::senack: return "senack";
    case ScenarioKind::seack: return "seack";
    case ScenarioKind::meack: return "meack";
  }
  return "?";
}

std::optional<ScenarioKind> parse_scenario_kind(std::string_view s) {
  if (s == "senack") return ScenarioKind::senack;
  if (s == "seack") return ScenarioKind::seack;
  if (s == "meack") return ScenarioKind::meack;
  return std::nullopt;
}

std::string_view to_string(SkillAssignment s) {
  return s == SkillAssignment::fill_other ? "fill-other" : "weights";
}

ScenarioConfig build_scenario(std::string_view name, const Overrides& overrides) {
  const auto kind = parse_scenario_kind(name);
  if (!kind) throw UnknownScenario("unknown scenario '" + std::string(name) + "'");
  ScenarioConfig cfg;
  cfg.kind = *kind;
  if (*kind == ScenarioKind::meack) {
    cfg.emergency_time_s = 485.0;
    cfg.focal_nodes = {52, 69, 70};
    cfg.receiver = 63;
    cfg.priorities = {{52, 2}, {69, 1}, {70, 3}};
  }
  for (const auto& [k, v] : overrides) apply_override(cfg, k, v);
  validate(cfg);
  return cfg;
}

void apply_override(ScenarioConfig& cfg, std::string_view key, std::string_view value) {
  const auto v = trim(value);
  if (key == "scenario") {
    auto kind = parse_scenario_kind(v);
    if (!kind || *kind != cfg.kind) bad(key, v, "scenario is fixed when the config is built");
  } else if (key == "nodes") {
    cfg.n_nodes = to_uint(key, v);
  } else if (key == "duration") {
    cfg.duration_s = to_double(key, v);
  } else if (key == "warmup") {
    cfg.warmup_s = to_double(key, v);
  } else if (key == "emergency-time") {
    cfg.emergency_time_s = to_double(key, v);
  } else if (key == "focal") {
    cfg.focal_nodes.clear();
    for (auto part : split(v, ',')) cfg.focal_nodes.push_back(static_cast<NodeId>(to_uint(key, part)));
  } else if (key == "receiver") {
    if (v == "none" || v.empty()) {
      cfg.receiver.reset();
    } else {
      cfg.receiver = static_cast<NodeId>(to_uint(key, v));
    }
  } else if (key == "priorities") {
    cfg.priorities.clear();
    for (auto part : split(v, ',')) {
      auto colon = part.find(':');
      if (colon == std::string_view::npos) bad(key, v, "expected node:priority pairs");
      const auto prio = to_uint(key, part.substr(colon + 1));
      if (prio < 1 || prio > 4) bad(key, v, "priority must be 1..4");
      cfg.priorities[static_cast<NodeId>(to_uint(key, part.substr(0, colon)))] =
          static_cast<std::uint8_t>(prio);
    }
  } else if (key == "announce-interval") {
    cfg.announce_interval_s = to_double(key, v);
  } else if (key == "ack-timeout") {
    cfg.ack_timeout_ms = to_double(key, v);
  } else if (key == "ack-window") {
    cfg.ack_window_ms = to_double(key, v);
  } else if (key == "radius") {
    cfg.radio.radius = to_double(key, v);
  } else if (key == "base-latency") {
    cfg.radio.base_latency_ms = to_double(key, v);
  } else if (key == "bitrate") {
    cfg.radio.bitrate = to_double(key, v);
  } else if (key == "jitter") {
    cfg.radio.jitter_ms = to_double(key, v);
  } else if (key == "reps") {
    cfg.repetitions = to_uint(key, v);
  } else if (key == "seed") {
    cfg.seed = to_uint(key, v);
  } else if (key == "area") {
    auto x = v.find('x');
    if (x == std::string_view::npos) bad(key, v, "expected WIDTHxHEIGHT");
    cfg.area = {to_double(key, v.substr(0, x)), to_double(key, v.substr(x + 1))};
  } else if (key == "speed-min") {
    cfg.speed_min = to_double(key, v);
  } else if (key == "speed-max") {
    cfg.speed_max = to_double(key, v);
  } else if (key == "snapshot-interval") {
    cfg.snapshot_interval_s = to_double(key, v);
  } else if (key == "trace") {
    if (v.empty() || v == "synthetic") {
      cfg.trace_path.reset();
    } else {
      cfg.trace_path = std::filesystem::path(std::string(v));
    }
  } else if (key == "synthetic") {
    if (v == "true" || v == "1" || v.empty()) cfg.trace_path.reset();
  } else if (key == "taxonomy") {
    if (v.empty() || v == "default") {
      cfg.taxonomy_path.reset();
    } else {
      cfg.taxonomy_path = std::filesystem::path(std::string(v));
    }
  } else if (key == "skill-assignment") {
    if (v == "fill-other") {
      cfg.skill_assignment = SkillAssignment::fill_other;
    } else if (v == "weights") {
      cfg.skill_assignment = SkillAssignment::weights;
    } else {
      bad(key, v, "expected fill-other or weights");
    }
  } else if (key == "log-level") {
    if (v == "full") {
      cfg.log_level = sim::LogLevel::full;
    } else if (v == "focal") {
      cfg.log_level = sim::LogLevel::focal;
    } else {
      bad(key, v, "expected full or focal");
    }
  } else if (key == "format") {
    auto f = sim::parse_log_format(v);
    if (!f) bad(key, v, "expected csv or jsonl");
    cfg.log_format = *f;
  } else if (key == "workers") {
    cfg.workers = to_uint(key, v);
  } else {
    throw InvalidOverride("unknown setting '" + std::string(key) + "'");
  }
}

void validate(const ScenarioConfig& cfg) {
  auto fail = [](const std::string& why) { throw InvalidOverride(why); };
  if (cfg.n_nodes == 0) fail("nodes must be positive");
  if (cfg.repetitions == 0) fail("reps must be positive");
  if (!(cfg.duration_s > 0)) fail("duration must be positive");
  if (cfg.warmup_s < 0 || cfg.warmup_s >= cfg.duration_s) fail("warmup must lie in [0, duration)");
  if (cfg.emergency_time_s < 0 || cfg.emergency_time_s >= cfg.duration_s) {
    fail("emergency time must lie in [0, duration)");
  }
  if (!(cfg.announce_interval_s > 0)) fail("announce interval must be positive");
  if (!(cfg.ack_timeout_ms > 0)) fail("ack timeout must be positive");
  if (cfg.ack_window_ms < 0) fail("ack window must be non-negative");
  if (cfg.radio.radius < 0) fail("radius must be non-negative");
  if (!(cfg.radio.bitrate > 0)) fail("bitrate must be positive");
  if (cfg.radio.base_latency_ms < 0 || cfg.radio.jitter_ms < 0) fail("latencies must be non-negative");
  if (!(cfg.speed_min > 0) || cfg.speed_max < cfg.speed_min) fail("speeds must satisfy 0 < min <= max");
  if (!(cfg.snapshot_interval_s > 0)) fail("snapshot interval must be positive");
  if (!(cfg.area.width > 0) || !(cfg.area.height > 0)) fail("area must be positive");
  if (cfg.focal_nodes.empty()) fail("at least one focal node is required");
  for (auto id : cfg.focal_nodes) {
    if (id >= cfg.n_nodes) fail("focal node " + std::to_string(id) + " >= nodes");
    if (std::count(cfg.focal_nodes.begin(), cfg.focal_nodes.end(), id) > 1) fail("duplicate focal node");
  }
  if (cfg.receiver) {
    if (*cfg.receiver >= cfg.n_nodes) fail("receiver >= nodes");
    if (std::find(cfg.focal_nodes.begin(), cfg.focal_nodes.end(), *cfg.receiver) != cfg.focal_nodes.end()) {
      fail("receiver cannot be a focal node");
    }
  }
  if (cfg.kind == ScenarioKind::meack) {
    for (auto id : cfg.focal_nodes) {
      if (!cfg.priorities.contains(id)) fail("meack needs a priority for focal node " + std::to_string(id));
    }
    for (const auto& [id, p] : cfg.priorities) {
      if (std::find(cfg.focal_nodes.begin(), cfg.focal_nodes.end(), id) == cfg.focal_nodes.end()) {
        fail("priority given for non-focal node " + std::to_string(id));
      }
      if (p < 1 || p > 4) fail("priority must be 1..4");
    }
  } else if (!cfg.priorities.empty()) {
    fail("priorities are only defined for meack");
  }
}

Overrides parse_config_text(std::istream& in) {
  Overrides out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto view = trim(line);
    if (view.empty() || view.front() == '#') continue;
    auto eq = view.find('=');
    if (eq == std::string_view::npos) throw ParseError(lineno, "expected key=value");
    auto key = trim(view.substr(0, eq));
    if (key.starts_with("--")) key.remove_prefix(2);
    if (key.empty()) throw ParseError(lineno, "empty key");
    out.emplace_back(std::string(key), std::string(trim(view.substr(eq + 1))));
  }
  return out;
}

Overrides load_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(0, "cannot open config file " + path.string());
  return parse_config_text(in);
}

std::string to_config_text(const ScenarioConfig& cfg) {
  std::ostringstream out;
  auto num = [](double v) { return sim::format_double(v); };
  out << "scenario=" << to_string(cfg.kind) << '\n'
      << "nodes=" << cfg.n_nodes << '\n'
      << "duration=" << num(cfg.duration_s) << '\n'
      << "warmup=" << num(cfg.warmup_s) << '\n'
      << "emergency-time=" << num(cfg.emergency_time_s) << '\n'
      << "focal=" << ids_text(cfg.focal_nodes) << '\n'
      << "receiver=" << (cfg.receiver ? std::to_string(*cfg.receiver) : std::string("none")) << '\n';
  out << "priorities=";
  bool first = true;
  for (const auto& [id, p] : cfg.priorities) {
    out << (first ? "" : ",") << id << ':' << static_cast<int>(p);
    first = false;
  }
  out << '\n'
      << "announce-interval=" << num(cfg.announce_interval_s) << '\n'
      << "ack-timeout=" << num(cfg.ack_timeout_ms) << '\n'
      << "ack-window=" << num(cfg.ack_window_ms) << '\n'
      << "radius=" << num(cfg.radio.radius) << '\n'
      << "base-latency=" << num(cfg.radio.base_latency_ms) << '\n'
      << "bitrate=" << num(cfg.radio.bitrate) << '\n'
      << "jitter=" << num(cfg.radio.jitter_ms) << '\n'
      << "reps=" << cfg.repetitions << '\n'
      << "seed=" << cfg.seed << '\n'
      << "area=" << num(cfg.area.width) << 'x' << num(cfg.area.height) << '\n'
      << "speed-min=" << num(cfg.speed_min) << '\n'
      << "speed-max=" << num(cfg.speed_max) << '\n'
      << "snapshot-interval=" << num(cfg.snapshot_interval_s) << '\n'
      << "trace=" << (cfg.trace_path ? cfg.trace_path->string() : std::string("synthetic")) << '\n'
      << "taxonomy=" << (cfg.taxonomy_path ? cfg.taxonomy_path->string() : std::string("default")) << '\n'
      << "skill-assignment=" << to_string(cfg.skill_assignment) << '\n'
      << "log-level=" << sim::to_string(cfg.log_level) << '\n'
      << "format=" << (cfg.log_format == sim::LogFormat::csv ? "csv" : "jsonl") << '\n';
  return out.str();
}

}  // namespace stealth::harness
