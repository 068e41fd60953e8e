// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "ucsim/report_io.hpp"

using namespace ucsim;
using nlohmann::json;

namespace {

json minimal() {
  return json::parse(R"({
    "_comment": "one sensor slave, one poll",
    "seed": 5,
    "duration_s": 0.005,
    "slaves": [{"address": "64 49 46 68 00 53", "mode": "sensor", "temperature_c": 24.8}],
    "poll_schedule": [{"time_s": 0.0, "target": "64 49 46 68 00 53"}]
  })");
}

std::string path_of(const json& j) {
  try {
    scenario_from_json(j);
  } catch (const ConfigInvalid& e) {
    return e.path();
  }
  return "<accepted>";
}

}  // namespace

TEST_CASE("scenario parsing with defaults") {
  const Scenario sc = scenario_from_json(minimal());
  CHECK(sc.seed == 5);
  CHECK(sc.modem.bit_rate_bps == 115200);
  CHECK(sc.channel.turns == 4);
  CHECK(sc.ebn0_db == 20.0);
  REQUIRE(sc.slaves.size() == 1);
  CHECK(sc.slaves[0].mode == SlaveMode::Sensor);
  CHECK(sc.poll_schedule.size() == 1);
}

TEST_CASE("scenario: poll_rounds expands round robin") {
  json j = minimal();
  j["slaves"].push_back({{"address", "89 47 46 68 00 53"}});
  j["poll_rounds"] = {{"start_s", 0.001}, {"interval_s", 0.001}, {"rounds", 2}};
  j.erase("poll_schedule");
  const Scenario sc = scenario_from_json(j);
  REQUIRE(sc.poll_schedule.size() == 4);
  CHECK(sc.poll_schedule[1].target == parse_address("89 47 46 68 00 53"));
  CHECK(sc.poll_schedule[3].time_s == doctest::Approx(0.004));
}

TEST_CASE("scenario errors carry the field path") {
  json j = minimal();
  j["slaves"][0]["adress"] = "x";
  CHECK(path_of(j) == "slaves[0].adress");

  j = minimal();
  j["channel"] = {{"turns", "four"}};
  CHECK(path_of(j) == "channel.turns");

  j = minimal();
  j["poll_schedule"][0]["target"] = "64 49";
  CHECK(path_of(j) == "poll_schedule[0].target");

  j = minimal();
  j["modem"] = {{"detector", "magic"}};
  CHECK(path_of(j) == "modem.detector");

  j = minimal();
  j["slaves"][0]["temperature_c"] = 150;
  CHECK(path_of(j) == "slaves[0].temperature_c");

  j = minimal();
  j["channel"] = {{"ebn0_db", nullptr}, {"noise_sigma_v", 0.0}};
  CHECK(path_of(j) == "<accepted>");
  CHECK_FALSE(scenario_from_json(j).ebn0_db.has_value());
}

TEST_CASE("scenario JSON round trip") {
  json j = minimal();
  j["channel"] = {{"interference", {{{"freq_hz", 50e3}, {"amplitude_v", 0.01}}}}};
  j["master"] = {{"timeout_s", 0.002}, {"retries", 1}};
  const Scenario a = scenario_from_json(j);
  const Scenario b = scenario_from_json(scenario_to_json(a));
  CHECK(scenario_to_json(a) == scenario_to_json(b));
  CHECK(b.master.timeout_s == 0.002);
  CHECK(b.channel.interference.size() == 1);
}

TEST_CASE("report JSON round trip and stable text") {
  const Scenario sc = scenario_from_json(minimal());
  const Report r = run_scenario(sc);
  CHECK(report_from_json(report_to_json(r)) == r);
  CHECK(report_json_text(r) == report_json_text(run_scenario(sc)));
  CHECK(report_json_text(r).back() == '\n');
  CHECK_THROWS_AS(report_from_json(json::object()), ConfigInvalid);
}

TEST_CASE("report CSV") {
  Scenario sc = scenario_from_json(minimal());
  sc.poll_schedule.clear();
  std::ostringstream os;
  write_report_csv(os, run_scenario(sc));
  std::istringstream in(os.str());
  std::string header, line;
  std::getline(in, header);
  CHECK(header.rfind("kind,name,address,frames_sent", 0) == 0);
  const auto columns = std::count(header.begin(), header.end(), ',');
  int rows = 0;
  while (std::getline(in, line)) {
    CHECK(std::count(line.begin(), line.end(), ',') == columns);
    ++rows;
  }
  CHECK(rows == 3);
}

TEST_CASE("emit_report writes report and timeline") {
  const auto dir = std::filesystem::temp_directory_path() / "ucsim_test_report_io";
  std::filesystem::create_directories(dir);
  const Report r = run_scenario(scenario_from_json(minimal()));
  emit_report(r, ReportFormat::Json, dir / "report.json");
  emit_report(r, ReportFormat::Csv, dir / "report.csv");
  std::ifstream tl(dir / "timeline.jsonl");
  std::size_t lines = 0;
  std::string line;
  while (std::getline(tl, line)) {
    const json rec = json::parse(line);
    CHECK(rec.contains("time_ps"));
    ++lines;
  }
  CHECK(lines == r.timeline.size());
  std::ifstream js(dir / "report.json");
  CHECK(report_from_json(json::parse(js)) == r);
  std::filesystem::remove_all(dir);
  CHECK_THROWS_AS(emit_report(r, ReportFormat::Csv, dir / "missing" / "x.csv"), IoFailure);
}
