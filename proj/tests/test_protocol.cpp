#include <doctest.h>

#include <algorithm>

#include "stealth/errors.hpp"
#include "stealth/protocol.hpp"
#include "stealth/wire.hpp"

using namespace stealth;
using I = Interest;

namespace {

const SkillTaxonomy& tax() {
  static const auto t = SkillTaxonomy::build_default();
  return t;
}

SimTime at(double s) { return from_seconds(s); }

NeighborRecord member(NodeId id, double trust, int common) {
  NeighborRecord r;
  r.id = id;
  r.trust.total = trust;
  r.common_interests = common;
  return r;
}

template <typename T>
std::vector<T> notes_of(const Effects& fx) {
  std::vector<T> out;
  for (const auto& n : fx.notes) {
    if (const auto* x = std::get_if<T>(&n)) out.push_back(*x);
  }
  return out;
}

AnswerAnnounce answer(NodeId id, std::uint32_t round, std::string_view skill, InterestSet interests) {
  return AnswerAnnounce{id, round, tax().id(skill), interests};
}

// Runs one announce round for `agent` with the given answers.
void round_with(NodeAgent& agent, SimTime now, const std::vector<AnswerAnnounce>& answers) {
  agent.on_announce_timer(now);
  for (auto a : answers) {
    a.round = agent.round();
    agent.handle(a, now + SimTime{1000});
  }
}

NodeAgent focal_agent(AckMode mode, NodeId id = 70) {
  AgentConfig cfg;
  cfg.ack_mode = mode;
  return NodeAgent({id, tax().other(), InterestSet::all()}, tax(), cfg);
}

}  // namespace

TEST_CASE("receiver selection") {
  HealthCommunity c;
  CHECK_THROWS_AS(select_receiver(c), NoReceiver);
  CHECK_FALSE(try_select_receiver(c).has_value());

  c.register_neighbor(member(60, 0.95, 2), SimTime{0});
  c.register_neighbor(member(62, 0.85, 4), SimTime{0});
  CHECK(select_receiver(c) == 60);

  HealthCommunity tie;
  tie.register_neighbor(member(89, 0.5, 2), SimTime{0});
  tie.register_neighbor(member(13, 0.5, 3), SimTime{0});
  CHECK(select_receiver(tie) == 13);

  HealthCommunity full_tie;
  full_tie.register_neighbor(member(40, 0.5, 3), SimTime{0});
  full_tie.register_neighbor(member(12, 0.5, 3), SimTime{0});
  full_tie.register_neighbor(member(33, 0.5, 3), SimTime{0});
  CHECK(select_receiver(full_tie) == 12);
}

TEST_CASE("selection agrees with a sort on random communities") {
  std::uint64_t x = 12345;
  auto next = [&] {
    x = x * 6364136223846793005ull + 1442695040888963407ull;
    return x >> 33;
  };
  for (int trial = 0; trial < 500; ++trial) {
    HealthCommunity c;
    std::vector<NeighborRecord> all;
    const int n = 1 + static_cast<int>(next() % 8);
    for (int k = 0; k < n; ++k) {
      auto r = member(static_cast<NodeId>(next() % 50), static_cast<double>(next() % 4) / 4.0,
                      1 + static_cast<int>(next() % 5));
      c.register_neighbor(r, SimTime{0});
      all.erase(std::remove_if(all.begin(), all.end(), [&](const auto& o) { return o.id == r.id; }), all.end());
      all.push_back(r);
    }
    std::sort(all.begin(), all.end(), [](const auto& a, const auto& b) {
      if (a.trust.total != b.trust.total) return a.trust.total > b.trust.total;
      if (a.common_interests != b.common_interests) return a.common_interests > b.common_interests;
      return a.id < b.id;
    });
    CHECK(select_receiver(c) == all.front().id);
  }
}

TEST_CASE("payload tiers") {
  CHECK(tailor_payload(tax(), "doctor").tier == Tier::full_record);
  CHECK(tailor_payload(tax(), "nurse").tier == Tier::vitals_and_medication);
  CHECK(tailor_payload(tax(), "caregiver").tier == Tier::vitals_only);
  CHECK(tailor_payload(tax(), "firefighter").tier == Tier::vitals_only);
  CHECK(tailor_payload(tax(), "other").tier == Tier::vitals_only);
  CHECK(tailor_payload(tax(), "doctor", 7).subject == 7);
  CHECK_THROWS_AS(tailor_payload(tax(), "wizard"), UnknownSkill);
}

TEST_CASE("membership periods") {
  HealthCommunity c;
  CHECK(c.register_neighbor(member(5, 0.5, 1), at(1.0)));
  CHECK_FALSE(c.register_neighbor(member(5, 0.6, 1), at(1.1)));
  CHECK(c.members().at(5).trust.total == 0.6);
  CHECK(c.size() == 1);

  // Round 2 starts at 2 s; 5 answers again.
  CHECK(c.begin_round(at(2.0)).empty());
  c.register_neighbor(member(5, 0.5, 1), at(2.1));
  // Round 3 starts at 3 s; 5 stays silent, so at round 4 its period ends at 3 s.
  CHECK(c.begin_round(at(3.0)).empty());
  CHECK(c.persistent_size() == 1);
  CHECK(c.empty());
  const auto closed = c.begin_round(at(4.0));
  REQUIRE(closed.size() == 1);
  CHECK(c.periods().at(5).back().leave == at(3.0));
  CHECK(c.persistent_size() == 0);

  c.register_neighbor(member(5, 0.5, 1), at(4.2));
  CHECK(c.periods().at(5).size() == 2);
  CHECK(c.remove(5, at(4.5)));
  CHECK_FALSE(c.remove(5, at(4.6)));
  for (const auto& p : c.periods().at(5)) {
    REQUIRE(p.leave.has_value());
    CHECK(p.join <= *p.leave);
  }
  CHECK(c.periods().at(5)[0].leave <= c.periods().at(5)[1].join);
}

TEST_CASE("announce round resets the registry") {
  auto a = focal_agent(AckMode::none);
  round_with(a, at(1.0), {answer(1, 0, "doctor", {I::health}), answer(2, 0, "nurse", {I::health}),
                          answer(3, 0, "caregiver", {I::health, I::music})});
  CHECK(a.community().size() == 3);
  const auto fx = a.on_announce_timer(at(2.0));
  CHECK(a.community().empty());
  REQUIRE(fx.sends.size() == 1);
  CHECK(fx.sends[0].to == kNoNode);
  CHECK(std::holds_alternative<Announce>(fx.sends[0].msg));

  const auto again = a.on_announce_timer(at(3.0));
  CHECK(a.community().empty());
  CHECK(again.sends.size() == 1);
}

TEST_CASE("answers from an earlier round are ignored") {
  auto a = focal_agent(AckMode::none);
  a.on_announce_timer(at(1.0));
  const auto old_round = a.round();
  a.on_announce_timer(at(2.0));
  a.handle(answer(4, old_round, "doctor", {I::health}), at(2.001));
  CHECK(a.community().empty());
  a.handle(answer(4, a.round(), "doctor", {I::health}), at(2.002));
  CHECK(a.community().size() == 1);
}

TEST_CASE("registration rules") {
  auto a = focal_agent(AckMode::none);
  a.on_announce_timer(at(1.0));
  const auto r = a.round();

  auto fx = a.handle(answer(8, r, "doctor", {I::music}), at(1.001));
  CHECK(a.community().empty());
  CHECK(notes_of<note::Registered>(fx).empty());

  fx = a.handle(answer(9, r, "caregiver", {I::health, I::music}), at(1.002));
  REQUIRE(notes_of<note::Registered>(fx).size() == 1);
  const auto& rec = a.community().members().at(9);
  CHECK(rec.common_interests == 2);
  CHECK(rec.trust.interest_trust == doctest::Approx(2.0 / 5.0));
  CHECK(rec.trust.total == doctest::Approx((2.0 / 5.0 + 2.0 / 7.0) / 2.0));

  // Duplicate answer overwrites.
  a.handle(answer(9, r, "caregiver", {I::health, I::music}), at(1.003));
  CHECK(a.community().size() == 1);

  // Own broadcast is ignored.
  CHECK(a.handle(Announce{70, 1}, at(1.004)).sends.empty());
}

TEST_CASE("a node without health registers nobody") {
  NodeAgent a({4, tax().doctor(), {I::music}}, tax(), {});
  round_with(a, at(1.0), {answer(1, 0, "doctor", {I::health, I::music})});
  CHECK(a.community().empty());
}

TEST_CASE("answering an announce") {
  NodeAgent n({50, tax().nurse(), {I::health, I::books}}, tax(), {});
  const auto fx = n.handle(Announce{37, 12}, at(5.0));
  REQUIRE(fx.sends.size() == 1);
  CHECK(fx.sends[0].to == 37);
  const auto& ans = std::get<AnswerAnnounce>(fx.sends[0].msg);
  CHECK(ans.sender == 50);
  CHECK(ans.round == 12);
  CHECK(ans.skill == tax().nurse());
  CHECK(ans.interests == InterestSet{I::health, I::books});
}

TEST_CASE("emergency sends alert then stop and goes silent") {
  auto a = focal_agent(AckMode::none);
  round_with(a, at(299.0), {answer(1, 0, "nurse", {I::health}), answer(2, 0, "doctor", {I::health})});
  const auto fx = a.trigger_emergency(at(300.0), 1);
  REQUIRE(fx.sends.size() == 2);
  CHECK(fx.sends[0].to == 2);
  const auto& alert = std::get<Alert>(fx.sends[0].msg);
  CHECK(alert.payload.tier == Tier::full_record);
  CHECK(alert.attempt == 1);
  CHECK(fx.sends[1].to == kNoNode);
  CHECK(std::holds_alternative<StopAnnounce>(fx.sends[1].msg));
  CHECK(a.phase() == Phase::finished);

  CHECK(a.on_announce_timer(at(301.0)).sends.empty());
  CHECK(a.handle(Announce{1, 5}, at(301.0)).sends.empty());
  CHECK(notes_of<note::AlertLogged>(a.handle(Alert{1, 1, {}, 1}, at(301.0))).empty());
}

TEST_CASE("emergency with an empty community is a fault") {
  auto a = focal_agent(AckMode::immediate);
  a.on_announce_timer(at(1.0));
  const auto fx = a.trigger_emergency(at(1.5), 1);
  REQUIRE(fx.sends.size() == 1);
  CHECK(std::holds_alternative<StopAnnounce>(fx.sends[0].msg));
  const auto faults = notes_of<note::Fault>(fx);
  REQUIRE(faults.size() == 1);
  CHECK(faults[0].reason == "no_receiver");
  CHECK(a.phase() == Phase::finished);
}

TEST_CASE("stop announce removes the sender") {
  auto a = focal_agent(AckMode::none);
  round_with(a, at(1.0), {answer(1, 0, "nurse", {I::health})});
  const auto fx = a.handle(StopAnnounce{1}, at(1.2));
  CHECK(a.community().empty());
  CHECK(notes_of<note::Left>(fx).size() == 1);
  CHECK(a.handle(StopAnnounce{1}, at(1.3)).notes.empty());
  CHECK(a.on_announce_timer(at(2.0)).sends.size() == 1);
}

TEST_CASE("ack timeout retries the next member, then gives up") {
  auto a = focal_agent(AckMode::immediate);
  round_with(a, at(299.0), {answer(1, 0, "doctor", {I::health}), answer(2, 0, "nurse", {I::health})});
  auto fx = a.trigger_emergency(at(300.0), 1);
  REQUIRE(fx.timers.size() == 1);
  const auto t1 = fx.timers[0];
  CHECK(t1.kind == TimerKind::ack_timeout);
  CHECK(t1.delay == SimTime{500'000});
  CHECK(a.pending_receiver() == NodeId{1});

  fx = a.on_timer(t1, at(300.5));
  REQUIRE(fx.sends.size() == 1);
  CHECK(fx.sends[0].to == 2);
  CHECK(std::get<Alert>(fx.sends[0].msg).attempt == 2);
  CHECK(std::get<Alert>(fx.sends[0].msg).payload.tier == Tier::vitals_and_medication);
  REQUIRE(fx.timers.size() == 1);
  const auto t2 = fx.timers[0];

  // A late ack for attempt 1 does not count.
  fx = a.handle(AckAlert{1, 1}, at(300.6));
  CHECK(notes_of<note::AckIgnored>(fx).size() == 1);
  CHECK(a.phase() == Phase::awaiting_ack);

  fx = a.on_timer(t2, at(301.0));
  CHECK(notes_of<note::Fault>(fx).size() == 1);
  CHECK(notes_of<note::Fault>(fx)[0].reason == "exhausted");
  CHECK(a.phase() == Phase::finished);
}

TEST_CASE("ack before timeout finishes") {
  auto a = focal_agent(AckMode::immediate);
  round_with(a, at(299.0), {answer(1, 0, "doctor", {I::health})});
  const auto fx = a.trigger_emergency(at(300.0), 1);
  const auto done = a.handle(AckAlert{1, 1}, at(300.01));
  CHECK(notes_of<note::AckAccepted>(done).size() == 1);
  CHECK(a.phase() == Phase::finished);
  CHECK(a.on_timer(fx.timers[0], at(300.5)).sends.empty());
}

TEST_CASE("immediate ack") {
  AgentConfig cfg;
  cfg.ack_mode = AckMode::immediate;
  NodeAgent r({63, tax().doctor(), InterestSet::all()}, tax(), cfg);
  const auto fx = r.handle(Alert{70, 1, {Tier::full_record, 70}, 3}, at(485.0));
  REQUIRE(fx.sends.size() == 1);
  CHECK(fx.sends[0].to == 70);
  CHECK(std::get<AckAlert>(fx.sends[0].msg).alert_ref == 1);
  CHECK(notes_of<note::AlertLogged>(fx).size() == 1);

  AgentConfig none;
  NodeAgent quiet({64, tax().doctor(), InterestSet::all()}, tax(), none);
  const auto q = quiet.handle(Alert{70, 1, {}, 1}, at(485.0));
  CHECK(q.sends.empty());
  CHECK(notes_of<note::AlertLogged>(q).size() == 1);
}

TEST_CASE("priority acks within a batch") {
  AgentConfig cfg;
  cfg.ack_mode = AckMode::by_priority;
  NodeAgent r({63, tax().doctor(), InterestSet::all()}, tax(), cfg);

  auto fx = r.handle(Alert{52, 1, {}, 2}, at(485.001));
  REQUIRE(fx.timers.size() == 1);
  const auto flush = fx.timers[0];
  CHECK(flush.kind == TimerKind::ack_flush);
  CHECK(flush.delay == SimTime{20'000});
  CHECK(fx.sends.empty());
  CHECK(r.handle(Alert{69, 1, {}, 1}, at(485.002)).timers.empty());
  r.handle(Alert{80, 1, {}, 3}, at(485.003));
  r.handle(Alert{81, 1, {}, 3}, at(485.004));

  fx = r.on_timer(flush, at(485.021));
  std::vector<NodeId> order;
  for (const auto& s : fx.sends) order.push_back(s.to);
  CHECK(order == std::vector<NodeId>{69, 52, 80, 81});
  const auto queued = notes_of<note::AckQueued>(fx);
  REQUIRE(queued.size() == 4);
  for (const auto& q : queued) CHECK(q.batch == queued[0].batch);
  CHECK(queued[0].arrived_at == at(485.002));

  // A later alert opens a new batch.
  fx = r.handle(Alert{90, 1, {}, 1}, at(486.0));
  REQUIRE(fx.timers.size() == 1);
  const auto next = notes_of<note::AckQueued>(r.on_timer(fx.timers[0], at(486.02)));
  REQUIRE(next.size() == 1);
  CHECK(next[0].batch > queued[0].batch);
}

TEST_CASE("message helpers") {
  CHECK(type_of(Message{Announce{3, 1}}) == MessageType::announce);
  CHECK(type_of(Message{StopAnnounce{3}}) == MessageType::stop);
  CHECK(sender_of(Message{AckAlert{9, 2}}) == 9);
  CHECK(to_string(MessageType::answer) == "answer");
}

TEST_CASE("wire sizes") {
  CHECK(wire::encoded_size(MessageType::announce) == 8);
  CHECK(wire::encoded_size(MessageType::answer) == 10);
  CHECK(wire::encoded_size(MessageType::alert) == 74);
  CHECK(wire::encoded_size(MessageType::ack) == 8);
  CHECK(wire::encoded_size(MessageType::stop) == 8);
}

TEST_CASE("wire round trip") {
  const std::vector<Message> msgs{
      Announce{37, 1234},
      AnswerAnnounce{50, 77, tax().nurse(), {I::health, I::books}},
      Alert{70, 2, {Tier::vitals_and_medication, 70}, 3},
      AckAlert{63, 2},
      StopAnnounce{52},
  };
  for (const auto& m : msgs) {
    const auto bytes = wire::encode(m);
    CHECK(bytes.size() == wire::encoded_size(m));
    CHECK(wire::decode(bytes) == m);
  }
  const auto b = wire::encode(Announce{0x1234, 0x01020304});
  CHECK(b[0] == 1);
  CHECK(b[2] == 0x34);
  CHECK(b[3] == 0x12);
  CHECK(b[4] == 0x04);
  CHECK(b[7] == 0x01);
}

TEST_CASE("wire errors") {
  CHECK_THROWS_AS(wire::encode(Announce{70000, 1}), InvalidParams);
  const std::vector<std::uint8_t> truncated{1, 0, 3};
  CHECK_THROWS_AS(wire::decode(truncated), ParseError);
  const std::vector<std::uint8_t> unknown{9, 0, 0, 0, 0, 0, 0, 0};
  CHECK_THROWS_AS(wire::decode(unknown), ParseError);
  auto alert = wire::encode(Alert{1, 1, {}, 1});
  alert.pop_back();
  CHECK_THROWS_AS(wire::decode(alert), ParseError);
}
