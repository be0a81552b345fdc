#pragma once

#include <string>
#include <vector>

#include "stealth/sim/event_log.hpp"
#include "stealth/sim/mobility.hpp"

namespace test_support {

using stealth::NodeId;
using stealth::SimTime;
using stealth::kNoNode;
using stealth::sim::EventLog;
using stealth::sim::LogRecord;
using stealth::sim::RecordKind;

inline SimTime ms(double v) { return stealth::from_millis(v); }

// Builds logs record by record with the same field names the engine writes.
class LogBuilder {
 public:
  LogBuilder(std::string scenario, std::string ack_mode, double warmup_ms = 0.0) {
    auto& h = add(SimTime{0}, RecordKind::config, kNoNode, kNoNode);
    h.set("scenario", scenario)
        .set("ack_mode", ack_mode)
        .set("warmup_ms", stealth::sim::format_ms(ms(warmup_ms)))
        .set("sampled", std::string());
  }

  LogBuilder& profile(NodeId id, std::string skill) {
    add(SimTime{0}, RecordKind::profile, id, kNoNode).set("skill", skill).set("interests", std::string("health"));
    return *this;
  }
  LogBuilder& sample(double t_ms, NodeId id, std::int64_t nbrs, std::int64_t coi) {
    add(ms(t_ms), RecordKind::sample, id, kNoNode).set("nbrs", nbrs).set("coi", coi).set("registry", coi);
    return *this;
  }
  LogBuilder& emergency(double t_ms, NodeId id) {
    add(ms(t_ms), RecordKind::emergency, id, kNoNode).set("prio", std::int64_t{1});
    return *this;
  }
  LogBuilder& alert(double t_ms, NodeId from, NodeId to, std::int64_t attempt) {
    add(ms(t_ms), RecordKind::send, from, to)
        .set("msg", std::string("alert"))
        .set("id", attempt)
        .set("attempt", attempt);
    return *this;
  }
  LogBuilder& alert_rx(double t_ms, NodeId from, NodeId to, std::int64_t attempt) {
    add(ms(t_ms), RecordKind::alert_rx, from, to).set("attempt", attempt);
    return *this;
  }
  LogBuilder& ack_ok(double t_ms, NodeId acker, NodeId focal, std::int64_t attempt) {
    add(ms(t_ms), RecordKind::ack_ok, acker, focal).set("attempt", attempt);
    return *this;
  }
  LogBuilder& fault(double t_ms, NodeId id) {
    add(ms(t_ms), RecordKind::fault, id, kNoNode).set("reason", std::string("no_receiver"));
    return *this;
  }

  EventLog build() const { return log_; }

 private:
  LogRecord& add(SimTime t, RecordKind k, NodeId src, NodeId dst) {
    auto& r = log_.records.emplace_back();
    r.time = t;
    r.kind = k;
    r.src = src;
    r.dst = dst;
    return r;
  }

  EventLog log_;
};

// Static positions repeated over `count` snapshots.
inline stealth::sim::MobilityTrace static_trace(const std::vector<stealth::sim::Vec2>& pos, std::size_t count,
                                                SimTime interval = SimTime{600'000},
                                                stealth::sim::Area area = {400, 430}) {
  stealth::sim::MobilityTrace t;
  t.area = area;
  t.snapshot_interval = interval;
  t.node_count = pos.size();
  for (std::size_t k = 0; k < count; ++k) {
    stealth::sim::Snapshot s;
    s.time = SimTime{static_cast<std::int64_t>(k) * interval.count()};
    s.position = pos;
    s.present.assign(pos.size(), 1);
    t.snapshots.push_back(std::move(s));
  }
  return t;
}

}  // namespace test_support
