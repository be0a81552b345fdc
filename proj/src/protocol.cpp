#include "stealth/protocol.hpp"

#include <algorithm>
#include <tuple>

#include "stealth/errors.hpp"

namespace stealth {

std::string_view to_string(LeaveReason r) {
  switch (r) {
    case LeaveReason::stale: return "stale";
    case LeaveReason::stop_announce: return "stop";
    case LeaveReason::ack_timeout: return "ack_timeout";
    case LeaveReason::shutdown: return "shutdown";
  }
  return "?";
}

std::string_view to_string(Tier t) {
  switch (t) {
    case Tier::full_record: return "full_record";
    case Tier::vitals_and_medication: return "vitals_and_medication";
    case Tier::vitals_only: return "vitals_only";
  }
  return "?";
}

std::string_view to_string(MessageType t) {
  switch (t) {
    case MessageType::announce: return "announce";
    case MessageType::answer: return "answer";
    case MessageType::alert: return "alert";
    case MessageType::ack: return "ack";
    case MessageType::stop: return "stop";
  }
  return "?";
}

MessageType type_of(const Message& m) {
  return static_cast<MessageType>(m.index() + 1);
}

NodeId sender_of(const Message& m) {
  return std::visit([](const auto& x) { return x.sender; }, m);
}

// --- HealthCommunity -------------------------------------------------------

bool HealthCommunity::close_period(NodeId id, SimTime at) {
  auto it = periods_.find(id);
  if (it == periods_.end() || it->second.empty() || it->second.back().leave) return false;
  auto& p = it->second.back();
  p.leave = std::max(at, p.join);
  --open_;
  return true;
}

std::vector<NodeId> HealthCommunity::begin_round(SimTime now) {
  std::vector<NodeId> closed;
  for (auto& [id, list] : periods_) {
    if (list.empty() || list.back().leave) continue;
    if (!members_.contains(id) && close_period(id, round_start_)) closed.push_back(id);
  }
  members_.clear();
  round_start_ = now;
  return closed;
}

bool HealthCommunity::register_neighbor(const NeighborRecord& rec, SimTime now) {
  members_[rec.id] = rec;
  auto& list = periods_[rec.id];
  if (!list.empty() && !list.back().leave) return false;
  list.push_back({now, std::nullopt});
  ++open_;
  return true;
}

bool HealthCommunity::remove(NodeId id, SimTime now) {
  members_.erase(id);
  return close_period(id, now);
}

std::vector<NodeId> HealthCommunity::close_all(SimTime now) {
  std::vector<NodeId> closed;
  for (auto& [id, list] : periods_) {
    if (close_period(id, now)) closed.push_back(id);
  }
  return closed;
}

std::optional<NodeId> try_select_receiver(const HealthCommunity& community) {
  const NeighborRecord* best = nullptr;
  for (const auto& [id, rec] : community.members()) {
    // Members iterate in ascending id order, so strict comparison keeps the
    // lowest id among exact ties.
    if (!best || std::tie(rec.trust.total, rec.common_interests) >
                     std::tie(best->trust.total, best->common_interests)) {
      best = &rec;
    }
  }
  if (!best) return std::nullopt;
  return best->id;
}

NodeId select_receiver(const HealthCommunity& community) {
  if (auto id = try_select_receiver(community)) return *id;
  throw NoReceiver("health community is empty");
}

Tier tailor_tier(const SkillTaxonomy& tax, SkillId receiver_skill) {
  if (tax.is_descendant_or_self(receiver_skill, tax.doctor())) return Tier::full_record;
  if (tax.is_descendant_or_self(receiver_skill, tax.nurse())) return Tier::vitals_and_medication;
  return Tier::vitals_only;
}

DataTier tailor_payload(const SkillTaxonomy& tax, std::string_view receiver_skill, NodeId subject) {
  return {tailor_tier(tax, tax.id(receiver_skill)), subject};
}

// --- NodeAgent ---------------------------------------------------------------

NodeAgent::NodeAgent(NodeProfile profile, const SkillTaxonomy& tax, AgentConfig cfg)
    : profile_(profile), tax_(&tax), cfg_(cfg) {}

Effects NodeAgent::on_announce_timer(SimTime now) {
  Effects fx;
  if (phase_ != Phase::active) return fx;
  for (NodeId id : community_.begin_round(now)) {
    fx.notes.emplace_back(note::Left{id, LeaveReason::stale});
  }
  ++round_;
  fx.sends.push_back({kNoNode, Announce{profile_.id, round_}});
  return fx;
}

Effects NodeAgent::handle(const Message& msg, SimTime now) {
  Effects fx;
  if (sender_of(msg) == profile_.id) return fx;
  std::visit(
      [&](const auto& m) {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, Announce>) {
          on_announce(m, fx);
        } else if constexpr (std::is_same_v<T, AnswerAnnounce>) {
          on_answer(m, now, fx);
        } else if constexpr (std::is_same_v<T, Alert>) {
          on_alert(m, now, fx);
        } else if constexpr (std::is_same_v<T, AckAlert>) {
          on_ack(m, now, fx);
        } else {
          on_stop(m, now, fx);
        }
      },
      msg);
  return fx;
}

void NodeAgent::on_announce(const Announce& m, Effects& fx) {
  if (phase_ != Phase::active) return;
  fx.sends.push_back(
      {m.sender, AnswerAnnounce{profile_.id, m.round, profile_.skill, profile_.interests}});
}

void NodeAgent::on_answer(const AnswerAnnounce& m, SimTime now, Effects& fx) {
  if (phase_ != Phase::active || m.round != round_) return;
  if (!profile_.interests.contains(Interest::health)) return;
  const auto common = profile_.interests & m.interests;
  if (common.empty() || !m.interests.contains(Interest::health)) return;

  NeighborRecord rec;
  rec.id = m.sender;
  rec.skill = m.skill;
  rec.interests = m.interests;
  rec.trust = total_trust(profile_.interests, m.interests, m.skill, *tax_);
  rec.common_interests = common.size();
  rec.registered_at = now;
  fx.notes.emplace_back(note::Registered{rec.id, rec.trust, rec.common_interests});
  if (community_.register_neighbor(rec, now)) fx.notes.emplace_back(note::Joined{rec.id});
}

void NodeAgent::on_alert(const Alert& m, SimTime now, Effects& fx) {
  if (phase_ != Phase::active) return;
  fx.notes.emplace_back(note::AlertLogged{m.sender, m.attempt, m.priority, m.payload.tier});
  switch (cfg_.ack_mode) {
    case AckMode::none:
      break;
    case AckMode::immediate:
      fx.notes.emplace_back(note::AckQueued{m.sender, m.attempt, m.priority, now, ++batch_});
      fx.sends.push_back({m.sender, AckAlert{profile_.id, m.attempt}});
      break;
    case AckMode::by_priority:
      pending_.push_back({m.sender, m.attempt, m.priority, now, arrival_seq_++});
      if (!flush_armed_) {
        flush_armed_ = true;
        fx.timers.push_back({TimerKind::ack_flush, cfg_.ack_batch_window, 0});
      }
      break;
  }
}

void NodeAgent::flush_acks(SimTime, Effects& fx) {
  flush_armed_ = false;
  if (phase_ != Phase::active || pending_.empty()) {
    pending_.clear();
    return;
  }
  std::sort(pending_.begin(), pending_.end(), [](const PendingAlert& a, const PendingAlert& b) {
    return std::tie(a.priority, a.arrived_at, a.seq) < std::tie(b.priority, b.arrived_at, b.seq);
  });
  ++batch_;
  for (const auto& p : pending_) {
    fx.notes.emplace_back(note::AckQueued{p.from, p.attempt, p.priority, p.arrived_at, batch_});
    fx.sends.push_back({p.from, AckAlert{profile_.id, p.attempt}});
  }
  pending_.clear();
}

void NodeAgent::on_ack(const AckAlert& m, SimTime now, Effects& fx) {
  if (phase_ == Phase::awaiting_ack && current_receiver_ == m.sender && m.alert_ref == attempt_) {
    fx.notes.emplace_back(note::AckAccepted{m.sender, m.alert_ref});
    finish(now, fx);
  } else if (phase_ != Phase::active) {
    fx.notes.emplace_back(note::AckIgnored{m.sender, m.alert_ref});
  }
}

void NodeAgent::on_stop(const StopAnnounce& m, SimTime now, Effects& fx) {
  if (phase_ == Phase::finished) return;
  if (community_.remove(m.sender, now)) {
    fx.notes.emplace_back(note::Left{m.sender, LeaveReason::stop_announce});
  }
}

void NodeAgent::send_alert(NodeId receiver, Effects& fx) {
  const auto& rec = community_.members().at(receiver);
  std::vector<NeighborRecord> view;
  view.reserve(community_.size());
  for (const auto& [id, r] : community_.members()) view.push_back(r);
  fx.notes.emplace_back(note::CommunityView{std::move(view)});

  ++attempt_;
  current_receiver_ = receiver;
  fx.sends.push_back(
      {receiver, Alert{profile_.id, attempt_, {tailor_tier(*tax_, rec.skill), profile_.id}, priority_}});
}

Effects NodeAgent::trigger_emergency(SimTime now, std::uint8_t priority) {
  Effects fx;
  if (phase_ != Phase::active) return fx;
  priority_ = std::clamp<std::uint8_t>(priority, 1, 4);
  fx.notes.emplace_back(note::EmergencyRaised{priority_});
  pending_.clear();

  const auto receiver = try_select_receiver(community_);
  if (receiver) send_alert(*receiver, fx);
  fx.sends.push_back({kNoNode, StopAnnounce{profile_.id}});

  if (!receiver) {
    fx.notes.emplace_back(note::Fault{"no_receiver"});
    finish(now, fx);
  } else if (cfg_.ack_mode == AckMode::none) {
    finish(now, fx);
  } else {
    phase_ = Phase::awaiting_ack;
    fx.timers.push_back({TimerKind::ack_timeout, cfg_.ack_timeout, attempt_});
  }
  return fx;
}

void NodeAgent::on_ack_timeout(std::uint32_t ref, SimTime now, Effects& fx) {
  if (phase_ != Phase::awaiting_ack || ref != attempt_ || !current_receiver_) return;
  if (community_.remove(*current_receiver_, now)) {
    fx.notes.emplace_back(note::Left{*current_receiver_, LeaveReason::ack_timeout});
  }
  const auto next = try_select_receiver(community_);
  if (!next) {
    fx.notes.emplace_back(note::Fault{"exhausted"});
    finish(now, fx);
    return;
  }
  send_alert(*next, fx);
  fx.timers.push_back({TimerKind::ack_timeout, cfg_.ack_timeout, attempt_});
}

Effects NodeAgent::on_timer(const TimerRequest& timer, SimTime now) {
  Effects fx;
  switch (timer.kind) {
    case TimerKind::ack_timeout: on_ack_timeout(timer.ref, now, fx); break;
    case TimerKind::ack_flush: flush_acks(now, fx); break;
  }
  return fx;
}

void NodeAgent::finish(SimTime now, Effects& fx) {
  phase_ = Phase::finished;
  current_receiver_.reset();
  for (NodeId id : community_.close_all(now)) {
    fx.notes.emplace_back(note::Left{id, LeaveReason::shutdown});
  }
  fx.notes.emplace_back(note::Finished{});
}

}  // namespace stealth
