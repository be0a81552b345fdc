#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "stealth/errors.hpp"
#include "stealth/metrics.hpp"
#include "support.hpp"

using namespace stealth;
using namespace stealth::metrics;
using test_support::LogBuilder;

namespace {

// One repetition for focal node 1; receiver 2 holds `skill`.
sim::EventLog senack_rep(std::optional<double> latency_ms, const std::string& skill = "nurse") {
  LogBuilder b("senack", "none");
  b.profile(1, "other").profile(2, skill).profile(3, "doctor");
  b.sample(1000, 1, 2, 1).emergency(300'000, 1);
  if (latency_ms) {
    b.alert(300'000, 1, 2, 1).alert_rx(300'000 + *latency_ms, 1, 2, 1);
  } else {
    b.fault(300'000, 1);
  }
  return b.build();
}

}  // namespace

TEST_CASE("three-event fixture") {
  const std::vector<sim::EventLog> logs{senack_rep(4.0), senack_rep(std::nullopt), senack_rep(6.5)};
  const auto hr = hit_rate(logs, 1);
  CHECK(hr.hr == 2.0 / 3.0 * 100.0);
  CHECK(hr.hr + hr.fr == 100.0);
  CHECK(hr.successes == 2);
  CHECK(hr.emergencies == 3);
  CHECK(avg_access_time(logs, 1) == (4.0 + 6.5) / 2.0);
}

TEST_CASE("hit rate from counts") {
  CHECK(hit_rate_from_counts(34, 35).hr == doctest::Approx(97.142857).epsilon(1e-6));
  const auto full = hit_rate_from_counts(35, 35);
  CHECK(full.hr == 100.0);
  CHECK(full.fr == 0.0);
  const auto none = hit_rate_from_counts(0, 35);
  CHECK(none.hr == 0.0);
  CHECK(none.fr == 100.0);
  CHECK_THROWS_AS(hit_rate_from_counts(0, 0), NoEmergencies);
  for (std::size_t e = 1; e <= 60; ++e) {
    for (std::size_t s = 0; s <= e; ++s) {
      const auto h = hit_rate_from_counts(s, e);
      CHECK(h.hr + h.fr == 100.0);
    }
  }
}

TEST_CASE("hit rate by skill") {
  std::vector<sim::EventLog> logs;
  for (int i = 0; i < 10; ++i) logs.push_back(senack_rep(3.0, "other"));
  for (int i = 0; i < 3; ++i) logs.push_back(senack_rep(3.0, "caregiver"));
  logs.push_back(senack_rep(std::nullopt));
  const auto by = hit_rate_by_skill(logs, 1);
  CHECK(by.at("other") == doctest::Approx(76.92).epsilon(1e-4));
  CHECK(by.at("doctor") == 0.0);
  const double sum = std::accumulate(by.begin(), by.end(), 0.0, [](double a, const auto& kv) { return a + kv.second; });
  CHECK(sum == doctest::Approx(100.0).epsilon(1e-4));

  const std::vector<sim::EventLog> one{senack_rep(1.0, "nurse")};
  CHECK(hit_rate_by_skill(one, 1).at("nurse") == 100.0);

  const std::vector<sim::EventLog> fail{senack_rep(std::nullopt)};
  CHECK_THROWS_AS(hit_rate_by_skill(fail, 1), NoSuccesses);
  CHECK_THROWS_AS(avg_access_time(fail, 1), NoSuccesses);
}

TEST_CASE("acknowledged success needs the ack") {
  LogBuilder ok("seack", "immediate");
  ok.profile(1, "other").profile(2, "nurse").profile(3, "doctor");
  ok.emergency(300'000, 1).alert(300'000, 1, 2, 1).alert_rx(300'003, 1, 2, 1);
  ok.alert(300'500, 1, 3, 2).alert_rx(300'504, 1, 3, 2).ack_ok(300'508, 3, 1, 2);
  LogBuilder lost("seack", "immediate");
  lost.profile(1, "other").profile(2, "nurse");
  lost.emergency(300'000, 1).alert(300'000, 1, 2, 1).alert_rx(300'003, 1, 2, 1);

  const std::vector<sim::EventLog> logs{ok.build(), lost.build()};
  const auto run = summarize_focal(logs[0], 1);
  CHECK(run.success);
  CHECK(run.attempts == 2);
  CHECK(run.receiver == NodeId{3});
  CHECK(run.receiver_skill == "doctor");
  // From the first dissemination to receipt of the acknowledged alert.
  CHECK(*run.latency() == test_support::ms(504));
  CHECK_FALSE(summarize_focal(logs[1], 1).success);
  CHECK(hit_rate(logs, 1).hr == 50.0);
}

TEST_CASE("neighbors and communities") {
  LogBuilder a("senack", "none", 25'000);
  a.profile(1, "other");
  a.sample(24'600, 1, 9, 9);  // transient
  for (int k = 0; k < 10; ++k) a.sample(25'000 + 600.0 * k, 1, 3, k < 3 || (k >= 5 && k < 7) ? 1 : 0);
  LogBuilder b("senack", "none", 25'000);
  b.profile(1, "other");
  for (int k = 0; k < 10; ++k) b.sample(25'000 + 600.0 * k, 1, 5, 0);
  const std::vector<sim::EventLog> one{a.build()};
  const std::vector<sim::EventLog> both{a.build(), b.build()};

  CHECK(avg_neighbors(one, 1) == 3.0);
  CHECK(avg_neighbors(both, 1) == 4.0);
  const auto c = avg_communities(one, 1);
  CHECK(c.episode_count == 2.0);
  CHECK(c.interval_avg == doctest::Approx(0.5));
  CHECK(avg_communities(both, 1).episode_count == 1.0);
  CHECK_THROWS_AS(avg_neighbors(std::vector<sim::EventLog>{}, 1), EmptyLogs);
}

TEST_CASE("isolated node") {
  LogBuilder a("senack", "none");
  a.profile(69, "other");
  for (int k = 0; k < 100; ++k) a.sample(600.0 * k, 69, k < 85 ? 0 : 2, 0);
  const std::vector<sim::EventLog> logs{a.build()};
  CHECK(avg_neighbors(logs, 69) == doctest::Approx(0.3));
  CHECK(avg_communities(logs, 69).interval_avg == 0.0);
}

TEST_CASE("zero latency access time") {
  const std::vector<sim::EventLog> logs{senack_rep(0.0)};
  CHECK(avg_access_time(logs, 1) == 0.0);
  const std::vector<sim::EventLog> two{senack_rep(4.0), senack_rep(6.0)};
  CHECK(avg_access_time(two, 1) == 5.0);
}

TEST_CASE("metrics ignore order among equal timestamps") {
  LogBuilder b("senack", "none");
  b.profile(1, "other").profile(2, "nurse");
  b.sample(300'000, 1, 4, 1).emergency(300'000, 1).alert(300'000, 1, 2, 1).alert_rx(300'004, 1, 2, 1);
  const auto log = b.build();
  auto swapped = log;
  // Records 3..5 share t = 300 s.
  std::reverse(swapped.records.begin() + 3, swapped.records.begin() + 6);
  REQUIRE(swapped.records[3].time == swapped.records[5].time);
  const std::vector<sim::EventLog> a{log}, c{swapped};
  const std::vector<NodeId> focal{1};
  std::ostringstream oa, oc;
  write_report_text(oa, compute_report(a, focal));
  write_report_text(oc, compute_report(c, focal));
  CHECK(oa.str() == oc.str());
}

TEST_CASE("report matches the single-metric functions") {
  std::vector<sim::EventLog> logs{senack_rep(4.0, "doctor"), senack_rep(std::nullopt), senack_rep(2.0, "nurse")};
  const std::vector<NodeId> focal{1};
  const auto r = compute_report(logs, focal);
  REQUIRE(r.nodes.size() == 1);
  const auto& m = r.nodes[0];
  CHECK(r.scenario == "senack");
  CHECK(r.repetitions == 3);
  CHECK(m.rate.hr == hit_rate(logs, 1).hr);
  CHECK(m.avg_neighbors == avg_neighbors(logs, 1));
  CHECK(*m.access_time_ms == avg_access_time(logs, 1));
  CHECK(m.hr_by_skill == hit_rate_by_skill(logs, 1));
  CHECK(*m.access_time_sd_ms == doctest::Approx(std::sqrt(2.0)));

  std::ostringstream txt, csv, jsonl;
  write_report_text(txt, r);
  write_report_csv(csv, r);
  write_report_jsonl(jsonl, r);
  CHECK(txt.str().find("1.hit_rate=66.6667\n") != std::string::npos);
  CHECK(txt.str().find("1.hr_skill.doctor=50.0000\n") != std::string::npos);
  CHECK(csv.str().find("scenario,node,reps,intervals,N_N") == 0);
  CHECK(csv.str().find("\nsenack,1,3,") != std::string::npos);
  const auto j = nlohmann::json::parse(jsonl.str());
  CHECK(j.at("node") == 1);
  CHECK(j.at("hit_rate").get<double>() == doctest::Approx(200.0 / 3.0));
}
