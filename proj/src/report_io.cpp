// SPDX-License-Identifier: Apache-2.0

#include "ucsim/report_io.hpp"

#include <fstream>
#include <initializer_list>
#include <ostream>
#include <set>
#include <sstream>

namespace ucsim {

using nlohmann::json;

namespace {

/// Typed access to one JSON object with path-qualified errors.
class Fields {
 public:
  Fields(const json& j, std::string path, std::initializer_list<const char*> allowed) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigInvalid(path_.empty() ? "<root>" : path_, "expected an object");
    std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& [k, v] : j_.items()) {
      if (!k.empty() && k[0] == '_') continue;
      if (!ok.count(k)) throw ConfigInvalid(at(k), "unknown field");
    }
  }

  std::string at(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }
  bool has(const char* key) const { return j_.contains(key); }
  const json& raw(const char* key) const { return j_.at(key); }

  double number(const char* key, double def) const {
    if (!j_.contains(key)) return def;
    const auto& v = j_.at(key);
    if (!v.is_number()) throw ConfigInvalid(at(key), "expected a number");
    return v.get<double>();
  }

  std::optional<double> optional_number(const char* key, std::optional<double> def) const {
    if (!j_.contains(key)) return def;
    if (j_.at(key).is_null()) return std::nullopt;
    return number(key, 0.0);
  }

  std::int64_t integer(const char* key, std::int64_t def) const {
    if (!j_.contains(key)) return def;
    const auto& v = j_.at(key);
    if (!v.is_number_integer()) throw ConfigInvalid(at(key), "expected an integer");
    return v.get<std::int64_t>();
  }

  bool boolean(const char* key, bool def) const {
    if (!j_.contains(key)) return def;
    const auto& v = j_.at(key);
    if (!v.is_boolean()) throw ConfigInvalid(at(key), "expected true/false");
    return v.get<bool>();
  }

  std::string string(const char* key, const std::string& def) const {
    if (!j_.contains(key)) return def;
    const auto& v = j_.at(key);
    if (!v.is_string()) throw ConfigInvalid(at(key), "expected a string");
    return v.get<std::string>();
  }

  Address address(const char* key) const {
    if (!j_.contains(key)) throw ConfigInvalid(at(key), "required");
    try {
      return parse_address(string(key, ""));
    } catch (const std::invalid_argument& e) {
      throw ConfigInvalid(at(key), e.what());
    }
  }

  const json& array(const char* key) const {
    static const json kEmpty = json::array();
    if (!j_.contains(key)) return kEmpty;
    const auto& v = j_.at(key);
    if (!v.is_array()) throw ConfigInvalid(at(key), "expected an array");
    return v;
  }

 private:
  const json& j_;
  std::string path_;
};

Gating gating_from_json(const json& j, const std::string& path) {
  Fields f(j, path, {"carrier", "signal_processing", "power_conversion", "master_unit"});
  Gating g;
  g.carrier = f.boolean("carrier", true);
  g.signal_processing = f.boolean("signal_processing", true);
  g.power_conversion = f.boolean("power_conversion", true);
  g.master_unit = f.boolean("master_unit", true);
  return g;
}

json gating_to_json(const Gating& g) {
  return {{"carrier", g.carrier},
          {"signal_processing", g.signal_processing},
          {"power_conversion", g.power_conversion},
          {"master_unit", g.master_unit}};
}

UnitBudget budget_from_json(const json& j, const std::string& path) {
  Fields f(j, path,
           {"carrier_ua", "signal_processing_ua", "power_conversion_ua", "master_unit_ua", "transmit_burst_ua", "gating"});
  UnitBudget b;
  b.carrier_ua = f.number("carrier_ua", b.carrier_ua);
  b.signal_processing_ua = f.number("signal_processing_ua", b.signal_processing_ua);
  b.power_conversion_ua = f.number("power_conversion_ua", b.power_conversion_ua);
  b.master_unit_ua = f.number("master_unit_ua", b.master_unit_ua);
  b.transmit_burst_ua = f.number("transmit_burst_ua", b.transmit_burst_ua);
  if (f.has("gating")) b.gating = gating_from_json(f.raw("gating"), f.at("gating"));
  return b;
}

json budget_to_json(const UnitBudget& b) {
  return {{"carrier_ua", b.carrier_ua},
          {"signal_processing_ua", b.signal_processing_ua},
          {"power_conversion_ua", b.power_conversion_ua},
          {"master_unit_ua", b.master_unit_ua},
          {"transmit_burst_ua", b.transmit_burst_ua},
          {"gating", gating_to_json(b.gating)}};
}

SlaveMode parse_slave_mode(const std::string& s, const std::string& path) {
  if (s == "function_test") return SlaveMode::FunctionTest;
  if (s == "sensor") return SlaveMode::Sensor;
  throw ConfigInvalid(path, "mode must be 'function_test' or 'sensor'");
}

std::uint64_t u64(const json& j, const char* key) { return j.at(key).get<std::uint64_t>(); }

}  // namespace

Scenario scenario_from_json(const json& j) {
  Fields root(j, "",
              {"seed", "duration_s", "modem", "channel", "front_end", "master", "slaves", "poll_schedule", "poll_rounds",
               "collision_injections"});
  Scenario sc;
  const std::int64_t seed = root.integer("seed", 1);
  if (seed < 0) throw ConfigInvalid("seed", "must be >= 0");
  sc.seed = static_cast<std::uint64_t>(seed);
  sc.duration_s = root.number("duration_s", sc.duration_s);

  if (root.has("modem")) {
    Fields m(root.raw("modem"), "modem",
             {"carrier_hz", "samples_per_cycle", "bit_rate_bps", "amplitude_v", "detector"});
    sc.modem.carrier_hz = m.number("carrier_hz", sc.modem.carrier_hz);
    sc.modem.samples_per_cycle = static_cast<int>(m.integer("samples_per_cycle", sc.modem.samples_per_cycle));
    sc.modem.bit_rate_bps = m.number("bit_rate_bps", sc.modem.bit_rate_bps);
    sc.modem.amplitude_v = m.number("amplitude_v", sc.modem.amplitude_v);
    const std::string det = m.string("detector", "carrier_correlation");
    if (det == "carrier_correlation") {
      sc.modem.detector = Detector::kCarrierCorrelation;
    } else if (det == "sample_product") {
      sc.modem.detector = Detector::kSampleProduct;
    } else {
      throw ConfigInvalid("modem.detector", "must be 'carrier_correlation' or 'sample_product'");
    }
  }

  if (root.has("channel")) {
    Fields c(root.raw("channel"), "channel",
             {"turns", "cable_length_m", "attenuation_per_m", "noise_sigma_v", "ebn0_db", "interference",
              "propagation_speed_mps"});
    sc.channel.turns = static_cast<int>(c.integer("turns", sc.channel.turns));
    sc.channel.cable_length_m = c.number("cable_length_m", sc.channel.cable_length_m);
    sc.channel.attenuation_per_m = c.number("attenuation_per_m", sc.channel.attenuation_per_m);
    sc.channel.noise_sigma_v = c.number("noise_sigma_v", sc.channel.noise_sigma_v);
    sc.channel.propagation_speed_mps = c.number("propagation_speed_mps", sc.channel.propagation_speed_mps);
    sc.ebn0_db = c.optional_number("ebn0_db", sc.ebn0_db);
    const auto& tones = c.array("interference");
    for (std::size_t i = 0; i < tones.size(); ++i) {
      Fields t(tones[i], "channel.interference[" + std::to_string(i) + "]", {"freq_hz", "amplitude_v"});
      sc.channel.interference.push_back({t.number("freq_hz", 0.0), t.number("amplitude_v", 0.0)});
    }
  }

  if (root.has("front_end")) {
    Fields fe(root.raw("front_end"), "front_end", {"center_hz", "passband_gain", "quality_factor"});
    sc.front_end.center_hz = fe.number("center_hz", sc.front_end.center_hz);
    sc.front_end.passband_gain = fe.number("passband_gain", sc.front_end.passband_gain);
    sc.front_end.quality_factor = fe.number("quality_factor", sc.front_end.quality_factor);
  }

  if (root.has("master")) {
    Fields m(root.raw("master"), "master", {"budget", "timeout_s", "retries"});
    if (m.has("budget")) sc.master.budget = budget_from_json(m.raw("budget"), "master.budget");
    sc.master.timeout_s = m.optional_number("timeout_s", std::nullopt);
    sc.master.retries = static_cast<int>(m.integer("retries", 0));
  }

  const auto& slaves = root.array("slaves");
  for (std::size_t i = 0; i < slaves.size(); ++i) {
    const std::string p = "slaves[" + std::to_string(i) + "]";
    Fields s(slaves[i], p, {"address", "mode", "temperature_c", "acquire_time_s", "budget"});
    SlaveSpec spec;
    spec.address = s.address("address");
    spec.mode = parse_slave_mode(s.string("mode", "function_test"), s.at("mode"));
    spec.temperature_c = s.number("temperature_c", 0.0);
    spec.acquire_time_s = s.number("acquire_time_s", 0.0);
    if (s.has("budget")) spec.budget = budget_from_json(s.raw("budget"), s.at("budget"));
    sc.slaves.push_back(spec);
  }

  const auto& polls = root.array("poll_schedule");
  for (std::size_t i = 0; i < polls.size(); ++i) {
    Fields p(polls[i], "poll_schedule[" + std::to_string(i) + "]", {"time_s", "target"});
    if (!p.has("time_s")) throw ConfigInvalid(p.at("time_s"), "required");
    sc.poll_schedule.push_back({p.number("time_s", 0.0), p.address("target")});
  }

  if (root.has("poll_rounds")) {
    // Round-robin over every slave: poll k (0-based) goes at start + k * interval.
    Fields r(root.raw("poll_rounds"), "poll_rounds", {"start_s", "interval_s", "rounds"});
    const double start = r.number("start_s", 0.0);
    const double interval = r.number("interval_s", 0.0);
    const std::int64_t rounds = r.integer("rounds", 0);
    if (!(interval > 0)) throw ConfigInvalid("poll_rounds.interval_s", "must be > 0");
    if (rounds < 0) throw ConfigInvalid("poll_rounds.rounds", "must be >= 0");
    std::size_t k = 0;
    for (std::int64_t round = 0; round < rounds; ++round)
      for (const auto& s : sc.slaves) sc.poll_schedule.push_back({start + static_cast<double>(k++) * interval, s.address});
  }

  const auto& inj = root.array("collision_injections");
  for (std::size_t i = 0; i < inj.size(); ++i) {
    Fields c(inj[i], "collision_injections[" + std::to_string(i) + "]", {"time_s", "node"});
    sc.collision_injections.push_back({c.number("time_s", 0.0), static_cast<int>(c.integer("node", 0))});
  }

  sc.validate();
  return sc;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoFailure("cannot open scenario " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigInvalid("<file>", e.what());
  }
  return scenario_from_json(j);
}

json scenario_to_json(const Scenario& sc) {
  json j;
  j["seed"] = sc.seed;
  j["duration_s"] = sc.duration_s;
  j["modem"] = {{"carrier_hz", sc.modem.carrier_hz},
                {"samples_per_cycle", sc.modem.samples_per_cycle},
                {"bit_rate_bps", sc.modem.bit_rate_bps},
                {"amplitude_v", sc.modem.amplitude_v},
                {"detector", sc.modem.detector == Detector::kSampleProduct ? "sample_product" : "carrier_correlation"}};
  json tones = json::array();
  for (const auto& t : sc.channel.interference) tones.push_back({{"freq_hz", t.freq_hz}, {"amplitude_v", t.amplitude_v}});
  j["channel"] = {{"turns", sc.channel.turns},
                  {"cable_length_m", sc.channel.cable_length_m},
                  {"attenuation_per_m", sc.channel.attenuation_per_m},
                  {"noise_sigma_v", sc.channel.noise_sigma_v},
                  {"ebn0_db", sc.ebn0_db ? json(*sc.ebn0_db) : json(nullptr)},
                  {"interference", tones},
                  {"propagation_speed_mps", sc.channel.propagation_speed_mps}};
  j["front_end"] = {{"center_hz", sc.front_end.center_hz},
                    {"passband_gain", sc.front_end.passband_gain},
                    {"quality_factor", sc.front_end.quality_factor}};
  j["master"] = {{"budget", budget_to_json(sc.master.budget)},
                 {"timeout_s", sc.master.timeout_s ? json(*sc.master.timeout_s) : json(nullptr)},
                 {"retries", sc.master.retries}};
  j["slaves"] = json::array();
  for (const auto& s : sc.slaves) {
    j["slaves"].push_back({{"address", to_string(s.address)},
                           {"mode", to_string(s.mode)},
                           {"temperature_c", s.temperature_c},
                           {"acquire_time_s", s.acquire_time_s},
                           {"budget", budget_to_json(s.budget)}});
  }
  j["poll_schedule"] = json::array();
  for (const auto& p : sc.poll_schedule) j["poll_schedule"].push_back({{"time_s", p.time_s}, {"target", to_string(p.target)}});
  j["collision_injections"] = json::array();
  for (const auto& c : sc.collision_injections) j["collision_injections"].push_back({{"time_s", c.time_s}, {"node", c.node}});
  return j;
}

json report_to_json(const Report& r) {
  json j;
  j["nodes"] = json::array();
  for (const auto& n : r.nodes) {
    j["nodes"].push_back({{"name", n.name},
                          {"address", n.address},
                          {"frames_sent", n.frames_sent},
                          {"frames_received", n.frames_received},
                          {"frames_filtered", n.frames_filtered},
                          {"frames_missed", n.frames_missed},
                          {"decode_errors", n.decode_errors},
                          {"timeouts", n.timeouts},
                          {"energy_uah", n.energy_uah}});
  }
  j["link"] = {{"physical_bits", r.link.physical_bits},
               {"bit_errors", r.link.bit_errors},
               {"measured_ber", r.link.measured_ber},
               {"nominal_bps", r.link.nominal_bps},
               {"effective_bps", r.link.effective_bps}};
  j["polls"] = json::array();
  for (const auto& p : r.polls) {
    j["polls"].push_back({{"completed_ps", p.completed_ps},
                          {"target", p.target},
                          {"timed_out", p.timed_out},
                          {"payload", p.payload}});
  }
  j["timeline"] = json::array();
  for (const auto& t : r.timeline) {
    j["timeline"].push_back({{"time_ps", t.time_ps},
                             {"seq", t.seq},
                             {"node", t.node},
                             {"phase", t.phase},
                             {"action", t.action},
                             {"detail", t.detail},
                             {"frame", t.frame}});
  }
  return j;
}

Report report_from_json(const json& j) {
  try {
    Report r;
    for (const auto& n : j.at("nodes")) {
      NodeReport nr;
      nr.name = n.at("name").get<std::string>();
      nr.address = n.at("address").get<std::string>();
      nr.frames_sent = u64(n, "frames_sent");
      nr.frames_received = u64(n, "frames_received");
      nr.frames_filtered = u64(n, "frames_filtered");
      nr.frames_missed = u64(n, "frames_missed");
      nr.decode_errors = u64(n, "decode_errors");
      nr.timeouts = u64(n, "timeouts");
      nr.energy_uah = n.at("energy_uah").get<double>();
      r.nodes.push_back(std::move(nr));
    }
    const auto& l = j.at("link");
    r.link.physical_bits = u64(l, "physical_bits");
    r.link.bit_errors = u64(l, "bit_errors");
    r.link.measured_ber = l.at("measured_ber").get<double>();
    r.link.nominal_bps = l.at("nominal_bps").get<double>();
    r.link.effective_bps = l.at("effective_bps").get<double>();
    for (const auto& p : j.at("polls")) {
      r.polls.push_back({p.at("completed_ps").get<SimTime>(), p.at("target").get<std::string>(),
                         p.at("timed_out").get<bool>(), p.at("payload").get<std::string>()});
    }
    for (const auto& t : j.at("timeline")) {
      r.timeline.push_back({t.at("time_ps").get<SimTime>(), u64(t, "seq"), t.at("node").get<std::string>(),
                            t.at("phase").get<std::string>(), t.at("action").get<std::string>(),
                            t.at("detail").get<std::string>(), t.at("frame").get<std::string>()});
    }
    return r;
  } catch (const json::exception& e) {
    throw ConfigInvalid("<report>", e.what());
  }
}

std::string report_json_text(const Report& r) { return report_to_json(r).dump(2) + "\n"; }

void write_report_csv(std::ostream& os, const Report& r) {
  os << "kind,name,address,frames_sent,frames_received,frames_filtered,frames_missed,decode_errors,timeouts,"
        "energy_uah,physical_bits,bit_errors,measured_ber,nominal_bps,effective_bps\n";
  char num[40];
  auto fmt = [&](double v) {
    std::snprintf(num, sizeof num, "%.17g", v);
    return std::string(num);
  };
  for (const auto& n : r.nodes) {
    os << "node," << n.name << ',' << n.address << ',' << n.frames_sent << ',' << n.frames_received << ','
       << n.frames_filtered << ',' << n.frames_missed << ',' << n.decode_errors << ',' << n.timeouts << ','
       << fmt(n.energy_uah) << ",,,,,\n";
  }
  os << "link,link,,,,,,,,," << r.link.physical_bits << ',' << r.link.bit_errors << ',' << fmt(r.link.measured_ber)
     << ',' << fmt(r.link.nominal_bps) << ',' << fmt(r.link.effective_bps) << '\n';
}

void write_timeline_jsonl(std::ostream& os, const std::vector<TimelineRecord>& timeline) {
  for (const auto& t : timeline) {
    json line = {{"time_s", to_seconds(t.time_ps)},
                 {"time_ps", t.time_ps},
                 {"node", t.node},
                 {"phase", t.phase},
                 {"action", t.action},
                 {"detail", t.detail},
                 {"frame", t.frame}};
    os << line.dump() << '\n';
  }
}

void emit_report(const Report& r, ReportFormat format, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoFailure("cannot write " + path.string());
  if (format == ReportFormat::Json) {
    out << report_json_text(r);
    const auto timeline_path = path.parent_path() / "timeline.jsonl";
    std::ofstream tl(timeline_path, std::ios::binary);
    if (!tl) throw IoFailure("cannot write " + timeline_path.string());
    write_timeline_jsonl(tl, r.timeline);
    if (!tl) throw IoFailure("write failed: " + timeline_path.string());
  } else {
    write_report_csv(out, r);
  }
  if (!out) throw IoFailure("write failed: " + path.string());
}

}  // namespace ucsim
