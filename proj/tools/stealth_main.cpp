// stealth: run scenarios, recompute metrics from stored logs, check traces,
// print the taxonomy similarity table.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "stealth/errors.hpp"
#include "stealth/harness/experiment.hpp"
#include "stealth/harness/scenario.hpp"
#include "stealth/metrics.hpp"
#include "stealth/sim/mobility.hpp"
#include "stealth/taxonomy.hpp"

namespace {

using namespace stealth;

constexpr int kUsage = 1;
constexpr int kRuntime = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Flags that map one-to-one onto config keys.
struct Flag {
  const char* key;
  const char* help;
  std::string value;
  CLI::Option* opt = nullptr;
};

std::vector<NodeId> sampled_nodes(const sim::EventLog& log) {
  std::vector<NodeId> out;
  std::string text(log.header().at("sampled"));
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, '|')) {
    if (!part.empty()) out.push_back(static_cast<NodeId>(std::stoul(part)));
  }
  return out;
}

std::optional<sim::Area> parse_area(const std::string& text) {
  if (text.empty()) return std::nullopt;
  auto x = text.find('x');
  if (x == std::string::npos) throw UsageError("--area expects WIDTHxHEIGHT");
  try {
    return sim::Area{std::stod(text.substr(0, x)), std::stod(text.substr(x + 1))};
  } catch (const std::exception&) {
    throw UsageError("--area expects WIDTHxHEIGHT");
  }
}

int cmd_run(const std::string& scenario_flag, const std::string& config_path, bool synthetic,
            std::vector<Flag>& flags, const std::string& out_dir) {
  harness::Overrides overrides;
  std::string scenario = scenario_flag;
  if (!config_path.empty()) {
    for (auto& [k, v] : harness::load_config_file(config_path)) {
      if (k == "scenario") {
        if (scenario.empty()) scenario = v;
        continue;
      }
      overrides.emplace_back(k, v);
    }
  }
  if (scenario.empty()) scenario = "senack";
  for (const auto& f : flags) {
    if (f.opt->count() > 0) overrides.emplace_back(f.key, f.value);
  }
  if (synthetic) overrides.emplace_back("trace", "synthetic");

  const auto cfg = harness::build_scenario(scenario, overrides);
  std::optional<std::filesystem::path> out;
  if (!out_dir.empty()) out = out_dir;
  const auto result = harness::run_experiment(cfg, out);
  metrics::write_report_text(std::cout, result.report);
  std::size_t invalid = 0;
  for (const auto& r : result.repetitions) {
    if (!r.valid) {
      ++invalid;
      std::cerr << "repetition " << r.index << " failed: " << r.error << '\n';
    }
  }
  if (out) std::cerr << "wrote " << cfg.repetitions - invalid << " repetitions to " << out->string() << '\n';
  return 0;
}

int cmd_metrics(const std::string& dir, const std::string& out_dir) {
  const auto logs = harness::load_logs(dir);
  const auto focal = sampled_nodes(logs.front());
  const auto report = metrics::compute_report(logs, focal);
  harness::write_reports(report, out_dir.empty() ? std::filesystem::path(dir) : std::filesystem::path(out_dir));
  metrics::write_report_text(std::cout, report);
  return 0;
}

int cmd_validate_trace(const std::string& path, const std::string& area) {
  const auto trace = sim::load_trace(path, parse_area(area));
  std::cout << "nodes=" << trace.node_count << '\n'
            << "snapshots=" << trace.snapshots.size() << '\n'
            << "interval_s=" << sim::format_double(to_seconds(trace.snapshot_interval)) << '\n'
            << "end_s=" << sim::format_double(to_seconds(trace.end_time())) << '\n'
            << "area=" << sim::format_double(trace.area.width) << 'x' << sim::format_double(trace.area.height)
            << '\n'
            << "ok\n";
  return 0;
}

int cmd_taxonomy(const std::string& path) {
  const auto tax = path.empty() ? SkillTaxonomy::build_default() : SkillTaxonomy::load(path);
  for (SkillId s = 0; s < tax.size(); ++s) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", tax.similarity(s));
    std::cout << tax.label(s) << '=' << buf << '\n';
  }
  return 0;
}

int cmd_gen_trace(std::size_t nodes, double duration, double interval, std::uint64_t seed,
                  const std::string& area, const std::string& out_path) {
  sim::SyntheticParams p;
  p.n_nodes = nodes;
  p.duration = from_seconds(duration);
  p.snapshot_interval = from_seconds(interval);
  p.seed = seed;
  if (auto a = parse_area(area)) p.area = *a;
  const auto trace = sim::generate_synthetic(p);
  if (out_path.empty() || out_path == "-") {
    sim::write_trace(std::cout, trace);
  } else {
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw Error("cannot write " + out_path);
    sim::write_trace(out, trace);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"STEALTH trust-scoped health data dissemination simulator"};
  app.set_version_flag("--version", std::string(harness::kVersion));
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "run a scenario and write reports");
  std::string scenario, config_path, out_dir;
  bool synthetic = false;
  run->add_option("--scenario", scenario, "senack, seack or meack (default senack)");
  run->add_option("--config", config_path, "key=value settings file; flags win")->check(CLI::ExistingFile);
  auto* synth = run->add_flag("--synthetic", synthetic, "use the synthetic random-waypoint trace");
  run->add_option("--out", out_dir, "output directory");
  std::vector<Flag> flags = {
      {"trace", "mobility trace CSV (t,node,x,y)"},
      {"seed", "base seed"},
      {"reps", "repetitions"},
      {"nodes", "node count"},
      {"duration", "simulated seconds"},
      {"radius", "radio range in metres"},
      {"announce-interval", "seconds between announces"},
      {"ack-timeout", "ack timeout in ms"},
      {"format", "event log encoding: csv or jsonl"},
      {"skill-assignment", "fill-other or weights"},
      {"workers", "parallel repetitions (0: all cores)"},
      {"log-level", "full or focal"},
      {"emergency-time", "emergency instant in seconds"},
      {"focal", "comma-separated focal node ids"},
      {"receiver", "pinned doctor id or none"},
      {"priorities", "node:priority list"},
      {"taxonomy", "taxonomy file (child<TAB>parent)"},
  };
  for (auto& f : flags) f.opt = run->add_option(std::string("--") + f.key, f.value, f.help);
  for (auto& f : flags) {
    if (std::string_view(f.key) == "trace") synth->excludes(f.opt);
  }

  auto* met = app.add_subcommand("metrics", "recompute reports from stored logs");
  std::string metrics_dir, metrics_out;
  met->add_option("dir", metrics_dir, "output directory of a previous run")->required();
  met->add_option("--out", metrics_out, "write reports here instead");

  auto* vt = app.add_subcommand("validate-trace", "check a mobility trace");
  std::string trace_path, area;
  vt->add_option("file", trace_path, "trace CSV")->required();
  vt->add_option("--area", area, "WIDTHxHEIGHT (default: bounding box)");

  auto* tx = app.add_subcommand("taxonomy", "print competence similarity to doctor");
  std::string tax_path;
  tx->add_option("--file", tax_path, "taxonomy file (default: built-in)");

  auto* gt = app.add_subcommand("gen-trace", "write a synthetic trace");
  std::size_t gen_nodes = 100;
  double gen_duration = 900.0, gen_interval = 0.6;
  std::uint64_t gen_seed = 1;
  std::string gen_area, gen_out;
  gt->add_option("--nodes", gen_nodes);
  gt->add_option("--duration", gen_duration);
  gt->add_option("--interval", gen_interval);
  gt->add_option("--seed", gen_seed);
  gt->add_option("--area", gen_area, "WIDTHxHEIGHT");
  gt->add_option("--out", gen_out, "file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kUsage;
  }

  try {
    if (*run) return cmd_run(scenario, config_path, synthetic, flags, out_dir);
    if (*met) return cmd_metrics(metrics_dir, metrics_out);
    if (*vt) return cmd_validate_trace(trace_path, area);
    if (*tx) return cmd_taxonomy(tax_path);
    if (*gt) return cmd_gen_trace(gen_nodes, gen_duration, gen_interval, gen_seed, gen_area, gen_out);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const UnknownScenario& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const InvalidOverride& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kRuntime;
  }
  return kUsage;
}
