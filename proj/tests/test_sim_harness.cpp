// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include "ucsim/sim_harness.hpp"

using namespace ucsim;

namespace {

const Address kA = parse_address("64 49 46 68 00 53");
const Address kB = parse_address("89 47 46 68 00 53");

Scenario single_point() {
  Scenario sc;
  sc.seed = 3;
  sc.duration_s = 0.01;
  SlaveSpec s;
  s.address = kA;
  s.mode = SlaveMode::Sensor;
  s.temperature_c = 19.7;
  sc.slaves.push_back(s);
  sc.poll_schedule.push_back({0.0, kA});
  return sc;
}

Scenario two_point() {
  Scenario sc = single_point();
  SlaveSpec s;
  s.address = kB;
  sc.slaves.push_back(s);
  sc.poll_schedule.push_back({0.002, kB});
  sc.poll_schedule.push_back({0.004, kA});
  return sc;
}

const TimelineRecord* find(const Report& r, const std::string& node, const std::string& action) {
  for (const auto& t : r.timeline)
    if (t.node == node && t.action == action) return &t;
  return nullptr;
}

}  // namespace

TEST_CASE("single-point poll completes with the sensor reply") {
  const Report r = run_scenario(single_point());
  REQUIRE(r.nodes.size() == 2);
  REQUIRE(r.polls.size() == 1);
  CHECK_FALSE(r.polls[0].timed_out);
  CHECK(r.polls[0].payload == "13 07");
  CHECK(r.nodes[0].frames_sent == 1);
  CHECK(r.nodes[1].frames_sent == 1);
  CHECK(r.nodes[0].frames_received == 1);
  CHECK(r.nodes[1].frames_received == 1);
  CHECK(r.nodes[1].decode_errors == 0);
  CHECK(r.link.bit_errors == 0);
  CHECK(r.link.physical_bits == 2 * 8 * 12);
}

TEST_CASE("slave wake latency appears in the timeline") {
  const Report r = run_scenario(single_point());
  const TimelineRecord* rx = find(r, "slave1", "frame_received");
  REQUIRE(rx);
  const TimelineRecord* wake = nullptr;
  for (const auto& t : r.timeline)
    if (t.node == "slave1" && t.action == "enter_phase" && t.detail == "WAKE_CHECK") wake = &t;
  REQUIRE(wake);
  CHECK(wake->time_ps - rx->time_ps == 7'800'000);
}

TEST_CASE("empty schedule: nothing on the cable, standby energy only") {
  Scenario sc = single_point();
  sc.poll_schedule.clear();
  sc.duration_s = 3600.0;
  const auto res = simulate(sc);
  for (const auto& n : res.report.nodes) {
    CHECK(n.frames_sent == 0);
    CHECK(n.frames_received == 0);
  }
  CHECK(res.report.polls.empty());
  CHECK(res.report.nodes[1].energy_uah == doctest::Approx(660.0));
  CHECK(res.report.nodes[0].energy_uah == doctest::Approx(660.0));
}

TEST_CASE("determinism: same scenario, same report") {
  Scenario sc = two_point();
  sc.ebn0_db = 9.0;
  CHECK(run_scenario(sc) == run_scenario(sc));
}

TEST_CASE("conservation: every sent frame is accounted for at every other node") {
  Scenario sc = two_point();
  sc.ebn0_db = 6.0;
  sc.poll_schedule.push_back({0.006, kB});
  sc.collision_injections.push_back({0.0060001, 1});
  sc.duration_s = 0.05;  // let every reception complete
  const Report r = run_scenario(sc);
  std::uint64_t sent = 0;
  for (const auto& n : r.nodes) sent += n.frames_sent;
  for (std::size_t i = 0; i < r.nodes.size(); ++i) {
    const auto& n = r.nodes[i];
    CHECK(n.frames_received + n.frames_filtered + n.frames_missed + n.decode_errors == sent - n.frames_sent);
  }
}

TEST_CASE("multi-point: non-addressed slave filters the command") {
  const Report r = run_scenario(two_point());
  REQUIRE(r.polls.size() == 3);
  for (const auto& p : r.polls) CHECK_FALSE(p.timed_out);
  CHECK(r.polls[1].payload == "00 ff");
  CHECK(r.nodes[2].frames_received == 1);
  CHECK(r.nodes[2].frames_filtered >= 2);
}

TEST_CASE("collision injection corrupts the exchange") {
  Scenario sc = single_point();
  const Report clean = run_scenario(sc);
  sc.collision_injections.push_back({20e-6, 0});
  const Report hit = run_scenario(sc);
  const auto errs = [](const Report& r) {
    std::uint64_t e = 0;
    for (const auto& n : r.nodes) e += n.decode_errors + n.timeouts + n.frames_missed;
    return e;
  };
  CHECK(errs(hit) > errs(clean));
}

TEST_CASE("poll to an absent address times out and leaves slaves in standby") {
  Scenario sc = single_point();
  sc.poll_schedule = {{0.0, kB}};
  const auto res = simulate(sc);
  REQUIRE(res.report.polls.size() == 1);
  CHECK(res.report.polls[0].timed_out);
  CHECK(res.report.nodes[0].timeouts == 1);
  CHECK(res.report.nodes[1].frames_filtered == 1);
  CHECK(res.report.nodes[1].frames_sent == 0);
  for (const auto& t : res.report.timeline) CHECK((t.node != "slave1" || t.action == "frame_received"));
}

TEST_CASE("deferred polls run after the current exchange") {
  Scenario sc = two_point();
  sc.poll_schedule = {{0.0, kA}, {1e-6, kB}};
  const Report r = run_scenario(sc);
  REQUIRE(r.polls.size() == 2);
  CHECK(r.polls[0].target == to_string(kA));
  CHECK(r.polls[1].target == to_string(kB));
  CHECK_FALSE(r.polls[1].timed_out);
  CHECK(find(r, "master", "deferred") != nullptr);
}

TEST_CASE("reported energy equals the integrated traces") {
  const auto res = simulate(two_point());
  REQUIRE(res.traces.size() == res.report.nodes.size());
  for (std::size_t i = 0; i < res.traces.size(); ++i) {
    const double uah = charge_consumed(res.traces[i], res.budgets[i], res.modes).microamp_hours;
    CHECK(res.report.nodes[i].energy_uah == doctest::Approx(uah).epsilon(1e-12));
    double total = 0;
    for (const auto& rec : res.traces[i].records) total += rec.duration_s;
    CHECK(total == doctest::Approx(0.01));
  }
}

TEST_CASE("waveforms are kept on request") {
  const auto res = simulate(single_point(), SimulationOptions{true});
  CHECK(res.waveforms.size() == 2);
  CHECK(simulate(single_point()).waveforms.empty());
}

TEST_CASE("validation names the offending field") {
  auto expect_path = [](const Scenario& sc, const std::string& path) {
    try {
      sc.validate();
      FAIL("no exception for " << path);
    } catch (const ConfigInvalid& e) {
      CHECK(e.path() == path);
    }
  };
  Scenario sc = two_point();
  sc.slaves[1].address = kA;
  expect_path(sc, "slaves[1].address");

  sc = single_point();
  sc.poll_schedule[0].time_s = 5.0;
  expect_path(sc, "poll_schedule[0].time_s");

  sc = single_point();
  sc.channel.turns = 9;
  expect_path(sc, "channel");

  sc = single_point();
  sc.slaves[0].temperature_c = 120;
  expect_path(sc, "slaves[0].temperature_c");

  sc = single_point();
  sc.collision_injections.push_back({0.0, 4});
  expect_path(sc, "collision_injections[0].node");

  sc = single_point();
  sc.duration_s = 0;
  expect_path(sc, "duration_s");
}

TEST_CASE("airtime and default timeout") {
  const ModemConfig m;
  CHECK(frame_airtime_s(m, 11) == doctest::Approx(89.0 * 14 / 1.67e6));
  CHECK(default_master_timeout_s(m) == doctest::Approx(2 * (2 * 97.0 * 14 / 1.67e6 + 7.8e-6)));
}
