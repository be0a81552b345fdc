#pragma once

// Per-node state machines for community management (announce / answer /
// registry) and critical-event management (alert / ack / stop-announce).
//
// Handlers are pure with respect to the outside world: they mutate the node's
// own state and return an Effects bundle (messages to send, timers to arm,
// notes for the event log). The simulation engine owns delivery and timing.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "stealth/taxonomy.hpp"
#include "stealth/trust.hpp"
#include "stealth/types.hpp"

namespace stealth {

struct NodeProfile {
  NodeId id = kNoNode;
  SkillId skill = 0;
  InterestSet interests;

  friend bool operator==(const NodeProfile&, const NodeProfile&) = default;
};

struct NeighborRecord {
  NodeId id = kNoNode;
  SkillId skill = 0;
  InterestSet interests;
  TrustScore trust;
  int common_interests = 0;
  SimTime registered_at{};
};

struct MembershipPeriod {
  SimTime join{};
  std::optional<SimTime> leave;  // open while unset
};

enum class LeaveReason : std::uint8_t { stale, stop_announce, ack_timeout, shutdown };
std::string_view to_string(LeaveReason r);

/// Round-scoped registry of health-interested neighbors plus the membership
/// periods derived from consecutive rounds.
class HealthCommunity {
 public:
  /// Closes the round that is ending (members with an open period that did
  /// not answer in it leave as of that round's start) and clears the
  /// registry. Returns the ids whose period was closed.
  std::vector<NodeId> begin_round(SimTime now);

  /// Inserts or overwrites. Returns true when this opened a new period.
  bool register_neighbor(const NeighborRecord& rec, SimTime now);

  /// Drops the member from the registry and closes its period. Returns true
  /// if a period was closed.
  bool remove(NodeId id, SimTime now);

  /// Closes every open period; the registry is left untouched.
  std::vector<NodeId> close_all(SimTime now);

  const std::map<NodeId, NeighborRecord>& members() const noexcept { return members_; }
  const std::map<NodeId, std::vector<MembershipPeriod>>& periods() const noexcept {
    return periods_;
  }
  bool empty() const noexcept { return members_.empty(); }
  std::size_t size() const noexcept { return members_.size(); }
  /// Members with an open membership period.
  std::size_t persistent_size() const noexcept { return open_; }

 private:
  bool close_period(NodeId id, SimTime at);

  std::map<NodeId, NeighborRecord> members_;
  std::map<NodeId, std::vector<MembershipPeriod>> periods_;
  std::size_t open_ = 0;
  SimTime round_start_{};
};

/// Highest total trust, then more common interests, then lowest id.
std::optional<NodeId> try_select_receiver(const HealthCommunity& community);
/// Throws NoReceiver when the community is empty.
NodeId select_receiver(const HealthCommunity& community);

enum class Tier : std::uint8_t { full_record = 0, vitals_and_medication = 1, vitals_only = 2 };
std::string_view to_string(Tier t);

struct DataTier {
  Tier tier = Tier::vitals_only;
  NodeId subject = kNoNode;

  friend bool operator==(const DataTier&, const DataTier&) = default;
};

Tier tailor_tier(const SkillTaxonomy& tax, SkillId receiver_skill);
/// Throws UnknownSkill.
DataTier tailor_payload(const SkillTaxonomy& tax, std::string_view receiver_skill,
                        NodeId subject = kNoNode);

// Messages. `round` ties an answer to the announce it responds to; `attempt`
// identifies one alert transmission of an emergency.
struct Announce {
  NodeId sender = kNoNode;
  std::uint32_t round = 0;
  friend bool operator==(const Announce&, const Announce&) = default;
};
struct AnswerAnnounce {
  NodeId sender = kNoNode;
  std::uint32_t round = 0;
  SkillId skill = 0;
  InterestSet interests;
  friend bool operator==(const AnswerAnnounce&, const AnswerAnnounce&) = default;
};
struct Alert {
  NodeId sender = kNoNode;
  std::uint32_t attempt = 0;
  DataTier payload;
  std::uint8_t priority = 1;
  friend bool operator==(const Alert&, const Alert&) = default;
};
struct AckAlert {
  NodeId sender = kNoNode;
  std::uint32_t alert_ref = 0;
  friend bool operator==(const AckAlert&, const AckAlert&) = default;
};
struct StopAnnounce {
  NodeId sender = kNoNode;
  friend bool operator==(const StopAnnounce&, const StopAnnounce&) = default;
};

using Message = std::variant<Announce, AnswerAnnounce, Alert, AckAlert, StopAnnounce>;

enum class MessageType : std::uint8_t { announce = 1, answer, alert, ack, stop };
MessageType type_of(const Message& m);
NodeId sender_of(const Message& m);
std::string_view to_string(MessageType t);

enum class AckMode : std::uint8_t {
  none,         // alerts are logged, never acknowledged
  immediate,    // one ack per alert on arrival
  by_priority,  // alerts collected for a short window, acked by priority then arrival
};

struct AgentConfig {
  AckMode ack_mode = AckMode::none;
  SimTime ack_timeout = SimTime{500'000};
  SimTime ack_batch_window = SimTime{20'000};
};

enum class Phase : std::uint8_t { active, awaiting_ack, finished };

// Timer kinds the agent can ask the engine to arm.
enum class TimerKind : std::uint8_t { ack_timeout, ack_flush };

struct TimerRequest {
  TimerKind kind;
  SimTime delay;
  std::uint32_t ref = 0;
};

struct Outgoing {
  NodeId to = kNoNode;  // kNoNode = broadcast
  Message msg;
};

namespace note {
struct Registered { NodeId neighbor; TrustScore trust; int common; };
struct Joined { NodeId neighbor; };
struct Left { NodeId neighbor; LeaveReason reason; };
struct EmergencyRaised { std::uint8_t priority; };
struct CommunityView { std::vector<NeighborRecord> members; };
struct AlertLogged { NodeId from; std::uint32_t attempt; std::uint8_t priority; Tier tier; };
struct AckQueued {
  NodeId to;
  std::uint32_t alert_ref;
  std::uint8_t priority;
  SimTime arrived_at;
  std::uint32_t batch;
};
struct AckAccepted { NodeId from; std::uint32_t attempt; };
struct AckIgnored { NodeId from; std::uint32_t attempt; };
struct Fault { std::string reason; };
struct Finished {};
}  // namespace note

using Note = std::variant<note::Registered, note::Joined, note::Left, note::EmergencyRaised,
                          note::CommunityView, note::AlertLogged, note::AckQueued,
                          note::AckAccepted, note::AckIgnored, note::Fault, note::Finished>;

struct Effects {
  std::vector<Outgoing> sends;
  std::vector<TimerRequest> timers;
  std::vector<Note> notes;
};

/// One node running both algorithms. Single-owner: the engine invokes the
/// handlers sequentially in timestamp order.
class NodeAgent {
 public:
  NodeAgent(NodeProfile profile, const SkillTaxonomy& tax, AgentConfig cfg);

  const NodeProfile& profile() const noexcept { return profile_; }
  Phase phase() const noexcept { return phase_; }
  /// False once the node has entered an emergency.
  bool announcing() const noexcept { return phase_ == Phase::active; }
  const HealthCommunity& community() const noexcept { return community_; }
  std::uint32_t round() const noexcept { return round_; }
  std::optional<NodeId> pending_receiver() const noexcept { return current_receiver_; }

  Effects on_announce_timer(SimTime now);
  Effects handle(const Message& msg, SimTime now);
  Effects trigger_emergency(SimTime now, std::uint8_t priority);
  Effects on_timer(const TimerRequest& timer, SimTime now);

 private:
  void on_announce(const Announce& m, Effects& fx);
  void on_answer(const AnswerAnnounce& m, SimTime now, Effects& fx);
  void on_alert(const Alert& m, SimTime now, Effects& fx);
  void on_ack(const AckAlert& m, SimTime now, Effects& fx);
  void on_stop(const StopAnnounce& m, SimTime now, Effects& fx);
  void on_ack_timeout(std::uint32_t ref, SimTime now, Effects& fx);
  void flush_acks(SimTime now, Effects& fx);
  void send_alert(NodeId receiver, Effects& fx);
  void finish(SimTime now, Effects& fx);

  struct PendingAlert {
    NodeId from;
    std::uint32_t attempt;
    std::uint8_t priority;
    SimTime arrived_at;
    std::uint64_t seq;
  };

  NodeProfile profile_;
  const SkillTaxonomy* tax_;
  AgentConfig cfg_;
  Phase phase_ = Phase::active;
  HealthCommunity community_;
  std::uint32_t round_ = 0;

  // Emergency side.
  std::uint8_t priority_ = 1;
  std::uint32_t attempt_ = 0;
  std::optional<NodeId> current_receiver_;

  // Receiver side.
  std::vector<PendingAlert> pending_;
  bool flush_armed_ = false;
  std::uint64_t arrival_seq_ = 0;
  std::uint32_t batch_ = 0;
};

}  // namespace stealth
