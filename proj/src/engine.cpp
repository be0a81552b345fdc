#include "stealth/sim/engine.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <tuple>
#include <variant>

#include "stealth/errors.hpp"
#include "stealth/wire.hpp"

namespace stealth::sim {

std::string_view to_string(LogLevel l) { return l == LogLevel::full ? "full" : "focal"; }

std::string_view to_string(AckMode m) {
  switch (m) {
    case AckMode::none: return "none";
    case AckMode::immediate: return "immediate";
    case AckMode::by_priority: return "by_priority";
  }
  return "?";
}

namespace {

enum class Rank : std::uint8_t { marker = 0, delivery = 1, emergency = 2, timer = 3 };

struct TransientEnd {};
struct SnapshotTick {
  std::size_t index;
};
struct Delivery {
  NodeId receiver;
  std::uint64_t msg_id;
  Message msg;
};
struct EmergencyFire {
  std::uint8_t priority;
};
struct AnnounceFire {};
struct AgentTimer {
  TimerRequest timer;
};

using Payload = std::variant<TransientEnd, SnapshotTick, Delivery, EmergencyFire, AnnounceFire, AgentTimer>;

struct Event {
  SimTime time;
  Rank rank;
  NodeId actor;
  std::uint64_t seq;
  Payload payload;

  friend bool operator>(const Event& a, const Event& b) {
    return std::tie(a.time, a.rank, a.actor, a.seq) > std::tie(b.time, b.rank, b.actor, b.seq);
  }
};

std::string join_ids(std::span<const NodeId> ids) {
  std::string out;
  for (auto id : ids) {
    if (!out.empty()) out.push_back('|');
    out += std::to_string(id);
  }
  return out;
}

class Engine {
 public:
  Engine(const EngineConfig& cfg, const MobilityTrace& trace, const ContactTable& contacts,
         std::span<const NodeProfile> profiles, const SkillTaxonomy& tax)
      : cfg_(cfg),
        trace_(trace),
        contacts_(contacts),
        tax_(tax),
        radio_rng_(derive_seed(cfg.seed, 0x7261646Full)),
        sampled_(trace.node_count, 0) {
    agents_.reserve(profiles.size());
    for (const auto& p : profiles) agents_.emplace_back(p, tax, cfg.agent);
    for (auto id : cfg.sampled_nodes) sampled_[id] = 1;
  }

  EventLog run() {
    write_header();
    seed_events();
    while (!queue_.empty()) {
      Event ev = queue_.top();
      queue_.pop();
      if (ev.time >= cfg_.duration) break;
      dispatch(ev);
    }
    return std::move(log_);
  }

 private:
  void push(SimTime t, Rank r, NodeId actor, Payload p) {
    queue_.push(Event{t, r, actor, next_seq_++, std::move(p)});
  }

  LogRecord& record(SimTime t, RecordKind k, NodeId src, NodeId dst) {
    auto& r = log_.records.emplace_back();
    r.time = t;
    r.kind = k;
    r.src = src;
    r.dst = dst;
    return r;
  }

  bool chatty_logged(NodeId a, NodeId b) const {
    if (cfg_.log_level == LogLevel::full) return true;
    return (a != kNoNode && sampled_[a]) || (b != kNoNode && sampled_[b]);
  }

  static bool chatty(MessageType t) { return t == MessageType::announce || t == MessageType::answer; }

  void write_header() {
    auto& h = record(SimTime{0}, RecordKind::config, kNoNode, kNoNode);
    h.set("scenario", cfg_.scenario)
        .set("ack_mode", std::string(to_string(cfg_.agent.ack_mode)))
        .set("nodes", static_cast<std::int64_t>(trace_.node_count))
        .set("duration_ms", format_ms(cfg_.duration))
        .set("warmup_ms", format_ms(cfg_.warmup))
        .set("snapshot_ms", format_ms(trace_.snapshot_interval))
        .set("announce_ms", format_ms(cfg_.announce_interval))
        .set("ack_timeout_ms", format_ms(cfg_.agent.ack_timeout))
        .set("radius", cfg_.radio.radius)
        .set("seed", std::to_string(cfg_.seed))
        .set("rep", static_cast<std::int64_t>(cfg_.repetition))
        .set("sampled", join_ids(cfg_.sampled_nodes))
        .set("log_level", std::string(to_string(cfg_.log_level)));
    for (const auto& a : agents_) {
      const auto& p = a.profile();
      record(SimTime{0}, RecordKind::profile, p.id, kNoNode)
          .set("skill", tax_.label(p.skill))
          .set("interests", p.interests.to_string());
    }
  }

  void seed_events() {
    Rng offsets(derive_seed(cfg_.seed, 0x6F6666ull));
    const auto interval = static_cast<std::uint64_t>(cfg_.announce_interval.count());
    for (NodeId id = 0; id < agents_.size(); ++id) {
      push(SimTime{static_cast<std::int64_t>(offsets.below(interval))}, Rank::timer, id, AnnounceFire{});
    }
    for (const auto& e : cfg_.emergencies) push(e.time, Rank::emergency, e.node, EmergencyFire{e.priority});
    if (cfg_.warmup < cfg_.duration) push(cfg_.warmup, Rank::marker, 0, TransientEnd{});
    for (std::size_t k = 0; k < trace_.snapshots.size(); ++k) {
      const auto t = trace_.snapshots[k].time;
      if (t >= cfg_.warmup && t < cfg_.duration && !cfg_.sampled_nodes.empty()) {
        push(t, Rank::marker, 0, SnapshotTick{k});
      }
    }
  }

  void dispatch(const Event& ev) {
    std::visit(
        [&](const auto& p) {
          using T = std::decay_t<decltype(p)>;
          if constexpr (std::is_same_v<T, TransientEnd>) {
            record(ev.time, RecordKind::transient_end, kNoNode, kNoNode);
          } else if constexpr (std::is_same_v<T, SnapshotTick>) {
            sample(ev.time, p.index);
          } else if constexpr (std::is_same_v<T, Delivery>) {
            const auto type = type_of(p.msg);
            if (!chatty(type) || chatty_logged(ev.actor, p.receiver)) {
              record(ev.time, RecordKind::recv, ev.actor, p.receiver)
                  .set("msg", std::string(stealth::to_string(type)))
                  .set("id", static_cast<std::int64_t>(p.msg_id));
            }
            apply(p.receiver, agents_[p.receiver].handle(p.msg, ev.time), ev.time);
          } else if constexpr (std::is_same_v<T, EmergencyFire>) {
            apply(ev.actor, agents_[ev.actor].trigger_emergency(ev.time, p.priority), ev.time);
          } else if constexpr (std::is_same_v<T, AnnounceFire>) {
            auto& agent = agents_[ev.actor];
            apply(ev.actor, agent.on_announce_timer(ev.time), ev.time);
            if (agent.announcing()) push(ev.time + cfg_.announce_interval, Rank::timer, ev.actor, AnnounceFire{});
          } else {
            apply(ev.actor, agents_[ev.actor].on_timer(p.timer, ev.time), ev.time);
          }
        },
        ev.payload);
  }

  void sample(SimTime now, std::size_t snap) {
    for (auto id : cfg_.sampled_nodes) {
      const auto& community = agents_[id].community();
      record(now, RecordKind::sample, id, kNoNode)
          .set("nbrs", static_cast<std::int64_t>(contacts_.degree(snap, id)))
          .set("coi", static_cast<std::int64_t>(community.persistent_size()))
          .set("registry", static_cast<std::int64_t>(community.size()));
    }
  }

  void apply(NodeId node, const Effects& fx, SimTime now) {
    for (const auto& n : fx.notes) log_note(node, n, now);
    for (const auto& out : fx.sends) send(node, out, now);
    for (const auto& t : fx.timers) push(now + t.delay, Rank::timer, node, AgentTimer{t});
  }

  void log_note(NodeId node, const Note& n, SimTime now) {
    std::visit(
        [&](const auto& x) {
          using T = std::decay_t<decltype(x)>;
          if constexpr (std::is_same_v<T, note::Registered>) {
            if (!chatty_logged(node, x.neighbor)) return;
            record(now, RecordKind::registered, x.neighbor, node)
                .set("trust", x.trust.total)
                .set("t_i", x.trust.interest_trust)
                .set("t_s", x.trust.skill_trust)
                .set("common", static_cast<std::int64_t>(x.common));
          } else if constexpr (std::is_same_v<T, note::Joined>) {
            if (!chatty_logged(node, x.neighbor)) return;
            record(now, RecordKind::join, x.neighbor, node);
          } else if constexpr (std::is_same_v<T, note::Left>) {
            if (!chatty_logged(node, x.neighbor)) return;
            // Stale periods close as of the previous round start, which the
            // agent knows; the record carries that time.
            const auto& periods = agents_[node].community().periods().at(x.neighbor);
            const auto at = periods.back().leave.value_or(now);
            record(now, RecordKind::leave, x.neighbor, node)
                .set("reason", std::string(stealth::to_string(x.reason)))
                .set("at_ms", format_ms(at));
          } else if constexpr (std::is_same_v<T, note::EmergencyRaised>) {
            record(now, RecordKind::emergency, node, kNoNode).set("prio", static_cast<std::int64_t>(x.priority));
          } else if constexpr (std::is_same_v<T, note::CommunityView>) {
            std::string members;
            for (const auto& m : x.members) {
              if (!members.empty()) members.push_back(' ');
              members += std::to_string(m.id) + ':' + format_double(m.trust.total) + ':' +
                         std::to_string(m.common_interests);
            }
            record(now, RecordKind::community, node, kNoNode)
                .set("size", static_cast<std::int64_t>(x.members.size()))
                .set("members", members);
          } else if constexpr (std::is_same_v<T, note::AlertLogged>) {
            record(now, RecordKind::alert_rx, x.from, node)
                .set("attempt", static_cast<std::int64_t>(x.attempt))
                .set("prio", static_cast<std::int64_t>(x.priority))
                .set("tier", std::string(stealth::to_string(x.tier)));
          } else if constexpr (std::is_same_v<T, note::AckQueued>) {
            record(now, RecordKind::ack_order, node, x.to)
                .set("ref", static_cast<std::int64_t>(x.alert_ref))
                .set("prio", static_cast<std::int64_t>(x.priority))
                .set("arrived_ms", format_ms(x.arrived_at))
                .set("batch", static_cast<std::int64_t>(x.batch));
          } else if constexpr (std::is_same_v<T, note::AckAccepted>) {
            record(now, RecordKind::ack_ok, x.from, node).set("attempt", static_cast<std::int64_t>(x.attempt));
          } else if constexpr (std::is_same_v<T, note::AckIgnored>) {
            record(now, RecordKind::ack_ignored, x.from, node).set("attempt", static_cast<std::int64_t>(x.attempt));
          } else if constexpr (std::is_same_v<T, note::Fault>) {
            record(now, RecordKind::fault, node, kNoNode).set("reason", x.reason);
          } else {
            record(now, RecordKind::finish, node, kNoNode);
          }
        },
        n);
  }

  void send(NodeId from, const Outgoing& out, SimTime now) {
    const auto type = type_of(out.msg);
    const auto id = ++msg_counter_;
    const auto size = wire::encoded_size(type);
    const auto snap = trace_.snapshot_index(now);
    const auto& s = trace_.snapshots[snap];
    const bool logged = !chatty(type) || chatty_logged(from, out.to);

    if (logged) {
      auto& r = record(now, RecordKind::send, from, out.to)
                    .set("msg", std::string(stealth::to_string(type)))
                    .set("id", static_cast<std::int64_t>(id))
                    .set("size", static_cast<std::int64_t>(size));
      if (const auto* a = std::get_if<Alert>(&out.msg)) {
        r.set("attempt", static_cast<std::int64_t>(a->attempt))
            .set("prio", static_cast<std::int64_t>(a->priority))
            .set("tier", std::string(stealth::to_string(a->payload.tier)));
      } else if (const auto* k = std::get_if<AckAlert>(&out.msg)) {
        r.set("ref", static_cast<std::int64_t>(k->alert_ref));
      }
    }

    if (out.to == kNoNode) {
      if (!s.present[from]) return;
      for (NodeId peer : contacts_.neighbors(snap, from)) {
        if (auto ms = deliver(size, s.position[from], s.position[peer], cfg_.radio, radio_rng_)) {
          schedule_delivery(now, *ms, from, peer, id, out.msg);
        }
      }
      return;
    }

    std::optional<double> ms;
    if (out.to < agents_.size() && s.present[from] && s.present[out.to]) {
      ms = deliver(size, s.position[from], s.position[out.to], cfg_.radio, radio_rng_);
    }
    if (ms) {
      schedule_delivery(now, *ms, from, out.to, id, out.msg);
    } else if (logged) {
      record(now, RecordKind::drop, from, out.to)
          .set("msg", std::string(stealth::to_string(type)))
          .set("id", static_cast<std::int64_t>(id))
          .set("reason", std::string("out_of_range"));
    }
  }

  void schedule_delivery(SimTime now, double latency_ms, NodeId from, NodeId to, std::uint64_t id,
                         const Message& msg) {
    const auto delay = std::llround(latency_ms * 1000.0);
    push(now + SimTime{delay}, Rank::delivery, from, Delivery{to, id, msg});
  }

  const EngineConfig& cfg_;
  const MobilityTrace& trace_;
  const ContactTable& contacts_;
  const SkillTaxonomy& tax_;
  Rng radio_rng_;
  std::vector<NodeAgent> agents_;
  std::vector<std::uint8_t> sampled_;
  std::priority_queue<Event, std::vector<Event>, std::greater<>> queue_;
  std::uint64_t next_seq_ = 0;
  std::uint64_t msg_counter_ = 0;
  EventLog log_;
};

void validate(const EngineConfig& cfg, const MobilityTrace& trace, const ContactTable& contacts,
              std::span<const NodeProfile> profiles, const SkillTaxonomy& tax) {
  if (cfg.duration.count() <= 0) throw ConfigError("duration must be positive");
  if (cfg.announce_interval.count() <= 0) throw ConfigError("announce interval must be positive");
  if (cfg.agent.ack_timeout.count() <= 0) throw ConfigError("ack timeout must be positive");
  if (cfg.warmup.count() < 0) throw ConfigError("warmup must be non-negative");
  if (trace.snapshots.empty()) throw ConfigError("trace has no snapshots");
  if (trace.snapshots.front().time > SimTime{0}) throw ConfigError("trace must start at t=0");
  if (trace.end_time() < cfg.duration) throw ConfigError("trace does not cover the run duration");
  if (contacts.snapshot_count() != trace.snapshots.size() || contacts.node_count() != trace.node_count) {
    throw ConfigError("contact table does not match the trace");
  }
  if (profiles.size() != trace.node_count) {
    throw ConfigError("profile count " + std::to_string(profiles.size()) + " != trace nodes " +
                      std::to_string(trace.node_count));
  }
  for (std::size_t i = 0; i < profiles.size(); ++i) {
    if (profiles[i].id != i) throw ConfigError("profile ids must equal their index");
    if (profiles[i].skill >= tax.size()) throw ConfigError("profile skill outside the taxonomy");
  }
  for (const auto& e : cfg.emergencies) {
    if (e.node >= trace.node_count) throw ConfigError("emergency node out of range");
    if (e.priority < 1 || e.priority > 4) throw ConfigError("alert priority must be 1..4");
  }
  for (auto id : cfg.sampled_nodes) {
    if (id >= trace.node_count) throw ConfigError("sampled node out of range");
  }
}

}  // namespace

EventLog run(const EngineConfig& cfg, const MobilityTrace& trace, const ContactTable& contacts,
             std::span<const NodeProfile> profiles, const SkillTaxonomy& tax) {
  validate(cfg, trace, contacts, profiles, tax);
  return Engine(cfg, trace, contacts, profiles, tax).run();
}

}  // namespace stealth::sim
