#include "stealth/sim/mobility.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>

#include "stealth/errors.hpp"

namespace stealth::sim {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

template <typename T>
T parse_number(std::string_view field, std::size_t lineno, const char* what) {
  field = trim(field);
  T value{};
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc{} || ptr != field.data() + field.size()) {
    throw ParseError(lineno, std::string("bad ") + what + " '" + std::string(field) + "'");
  }
  return value;
}

double round_cm(double v) { return std::round(v * 100.0) / 100.0; }

Vec2 clamp_to(Vec2 p, const Area& a) {
  return {std::clamp(round_cm(p.x), 0.0, a.width), std::clamp(round_cm(p.y), 0.0, a.height)};
}

}  // namespace

std::size_t MobilityTrace::snapshot_index(SimTime t) const {
  const bool past_end = snapshot_interval.count() > 0 ? t >= end_time()
                                                      : (snapshots.empty() || t > snapshots.back().time);
  if (snapshots.empty() || t < snapshots.front().time || past_end) {
    throw TimeOutOfRange("time " + std::to_string(to_seconds(t)) + " s outside the trace");
  }
  auto it = std::upper_bound(snapshots.begin(), snapshots.end(), t,
                             [](SimTime v, const Snapshot& s) { return v < s.time; });
  return static_cast<std::size_t>(it - snapshots.begin()) - 1;
}

SimTime MobilityTrace::end_time() const {
  if (snapshots.empty()) return SimTime{0};
  return snapshots.back().time + snapshot_interval;
}

MobilityTrace parse_trace(std::istream& in, std::optional<Area> area) {
  MobilityTrace trace;
  std::string line;
  std::size_t lineno = 0;
  bool header_seen = false;
  double max_x = 0.0;
  double max_y = 0.0;

  while (std::getline(in, line)) {
    ++lineno;
    auto view = trim(line);
    if (view.empty()) continue;
    if (!header_seen) {
      std::string compact;
      for (char c : view) {
        if (c != ' ') compact.push_back(c);
      }
      if (compact != "t,node,x,y") throw ParseError(lineno, "expected header 't,node,x,y'");
      header_seen = true;
      continue;
    }
    std::string_view fields[4];
    std::size_t count = 0;
    while (count < 4) {
      auto comma = view.find(',');
      fields[count++] = view.substr(0, comma);
      if (comma == std::string_view::npos) {
        view = {};
        break;
      }
      view.remove_prefix(comma + 1);
    }
    if (count != 4 || !view.empty()) throw ParseError(lineno, "expected 4 fields");

    const auto t = from_seconds(parse_number<double>(fields[0], lineno, "time"));
    const auto node = parse_number<long long>(fields[1], lineno, "node id");
    const Vec2 p{parse_number<double>(fields[2], lineno, "x"),
                 parse_number<double>(fields[3], lineno, "y")};
    if (node < 0 || node > 0xFFFF) throw ParseError(lineno, "node id out of range");
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) throw ParseError(lineno, "non-finite position");
    if (p.x < 0 || p.y < 0 || (area && (p.x > area->width || p.y > area->height))) {
      throw OutOfBounds("line " + std::to_string(lineno) + ": position outside the area");
    }

    if (trace.snapshots.empty() || t > trace.snapshots.back().time) {
      trace.snapshots.push_back({t, {}, {}});
    } else if (t < trace.snapshots.back().time) {
      throw NonMonotonicTime("line " + std::to_string(lineno) + ": time goes backwards");
    }
    auto& snap = trace.snapshots.back();
    const auto id = static_cast<std::size_t>(node);
    if (snap.position.size() <= id) {
      snap.position.resize(id + 1);
      snap.present.resize(id + 1, 0);
    }
    if (snap.present[id]) throw ParseError(lineno, "node listed twice in one snapshot");
    snap.position[id] = p;
    snap.present[id] = 1;
    trace.node_count = std::max(trace.node_count, id + 1);
    max_x = std::max(max_x, p.x);
    max_y = std::max(max_y, p.y);
  }
  if (!header_seen) throw ParseError(lineno, "empty trace");
  if (trace.snapshots.empty()) throw ParseError(lineno, "trace has no rows");

  for (auto& s : trace.snapshots) {
    s.position.resize(trace.node_count);
    s.present.resize(trace.node_count, 0);
  }
  trace.area = area.value_or(Area{max_x, max_y});
  if (trace.snapshots.size() >= 2) {
    trace.snapshot_interval = trace.snapshots[1].time - trace.snapshots[0].time;
  }
  return trace;
}

MobilityTrace load_trace(const std::filesystem::path& path, std::optional<Area> area) {
  std::ifstream in(path);
  if (!in) throw ParseError(0, "cannot open trace file " + path.string());
  return parse_trace(in, area);
}

void write_trace(std::ostream& out, const MobilityTrace& trace) {
  out << "t,node,x,y\n";
  char buf[96];
  for (const auto& s : trace.snapshots) {
    for (std::size_t id = 0; id < s.position.size(); ++id) {
      if (!s.present[id]) continue;
      const auto us = s.time.count();
      std::snprintf(buf, sizeof buf, "%lld.%03lld,%zu,%.2f,%.2f\n",
                    static_cast<long long>(us / 1'000'000),
                    static_cast<long long>((us % 1'000'000) / 1000), id, s.position[id].x,
                    s.position[id].y);
      out << buf;
    }
  }
}

RandomWaypointWalker::RandomWaypointWalker(Vec2 start, const SyntheticParams& params,
                                           std::uint64_t seed)
    : area_(params.area),
      speed_min_(params.speed_min),
      speed_max_(params.speed_max),
      rng_(seed) {
  legs_.push_back({start, start, 0.0, 0.0, 0.0});
}

void RandomWaypointWalker::extend() {
  const auto& last = legs_.back();
  Leg leg;
  leg.from = last.to;
  leg.to = {rng_.uniform(0.0, area_.width), rng_.uniform(0.0, area_.height)};
  leg.speed = rng_.uniform(speed_min_, speed_max_);
  leg.start = last.end;
  const double dist = std::hypot(leg.to.x - leg.from.x, leg.to.y - leg.from.y);
  leg.end = leg.start + dist / leg.speed;
  legs_.push_back(leg);
}

Vec2 RandomWaypointWalker::position(double elapsed) {
  while (legs_.back().end <= elapsed) extend();
  while (legs_[cursor_].end <= elapsed) ++cursor_;
  const auto& leg = legs_[cursor_];
  const double span = leg.end - leg.start;
  if (span <= 0.0) return leg.to;
  const double f = std::clamp((elapsed - leg.start) / span, 0.0, 1.0);
  return {leg.from.x + f * (leg.to.x - leg.from.x), leg.from.y + f * (leg.to.y - leg.from.y)};
}

MobilityTrace generate_synthetic(const SyntheticParams& p) {
  if (p.n_nodes == 0) throw InvalidParams("n_nodes must be positive");
  if (!(p.speed_min > 0.0) || p.speed_max < p.speed_min) {
    throw InvalidParams("speed range must satisfy 0 < min <= max");
  }
  if (!(p.area.width > 0.0) || !(p.area.height > 0.0)) throw InvalidParams("area must be positive");
  if (p.snapshot_interval.count() <= 0 || p.duration.count() <= 0) {
    throw InvalidParams("duration and snapshot interval must be positive");
  }
  for (const auto& r : p.rendezvous) {
    if (r.node >= p.n_nodes) throw InvalidParams("rendezvous node out of range");
    if (r.time < SimTime{0} || r.time >= p.duration) throw InvalidParams("rendezvous time out of range");
    if (r.point.x < 0 || r.point.y < 0 || r.point.x > p.area.width || r.point.y > p.area.height) {
      throw InvalidParams("rendezvous point outside the area");
    }
  }

  MobilityTrace trace;
  trace.area = p.area;
  trace.snapshot_interval = p.snapshot_interval;
  trace.node_count = p.n_nodes;
  const auto count = static_cast<std::size_t>(
      (p.duration.count() + p.snapshot_interval.count() - 1) / p.snapshot_interval.count());
  trace.snapshots.resize(count);
  for (std::size_t k = 0; k < count; ++k) {
    auto& s = trace.snapshots[k];
    s.time = SimTime{static_cast<std::int64_t>(k) * p.snapshot_interval.count()};
    s.position.resize(p.n_nodes);
    s.present.assign(p.n_nodes, 1);
  }

  for (NodeId node = 0; node < p.n_nodes; ++node) {
    const auto pin = std::find_if(p.rendezvous.begin(), p.rendezvous.end(),
                                  [&](const Rendezvous& r) { return r.node == node; });
    if (pin == p.rendezvous.end()) {
      Rng start_rng(derive_seed(p.seed, 2 * node));
      const Vec2 start{start_rng.uniform(0.0, p.area.width), start_rng.uniform(0.0, p.area.height)};
      RandomWaypointWalker walker(start, p, derive_seed(p.seed, 2 * node + 1));
      for (auto& s : trace.snapshots) s.position[node] = clamp_to(walker.position(to_seconds(s.time)), p.area);
      continue;
    }
    // Walk forward from the pinned point, and backward in time by running an
    // independent walk from the same point and reading it in reverse.
    RandomWaypointWalker forward(pin->point, p, derive_seed(p.seed, 2 * node + 1));
    RandomWaypointWalker backward(pin->point, p, derive_seed(p.seed, 2 * node));
    for (auto& s : trace.snapshots) {
      if (s.time >= pin->time) s.position[node] = clamp_to(forward.position(to_seconds(s.time - pin->time)), p.area);
    }
    for (auto it = trace.snapshots.rbegin(); it != trace.snapshots.rend(); ++it) {
      if (it->time < pin->time) {
        it->position[node] = clamp_to(backward.position(to_seconds(pin->time - it->time)), p.area);
      }
    }
  }
  return trace;
}

}  // namespace stealth::sim
