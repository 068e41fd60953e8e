// SPDX-License-Identifier: Apache-2.0

#include "ucsim/acceptance.hpp"

#include <chrono>
#include <cmath>
#include <functional>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>

#include "ucsim/report_io.hpp"

namespace ucsim {

namespace {

struct Outcome {
  bool passed = true;
  std::ostringstream detail;

  void expect(bool ok, const std::string& what) {
    if (!ok) {
      if (!passed) detail << "; ";
      else detail.str("");
      passed = false;
      detail << what;
    }
  }
};

CriterionResult timed(int id, std::string name, const std::function<void(Outcome&)>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    body(o);
  } catch (const std::exception& e) {
    o.passed = false;
    o.detail.str("");
    o.detail << "exception: " << e.what();
  }
  const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return {id, std::move(name), o.passed, o.detail.str(), dt};
}

std::string fmt(double v, int digits = 6) {
  std::ostringstream os;
  os.precision(digits);
  os << v;
  return os.str();
}

const Address kSinglePointSlave = parse_address("64 49 46 68 00 53");

Scenario single_point_scenario(double bit_rate) {
  Scenario sc;
  sc.seed = 11;
  sc.modem.bit_rate_bps = bit_rate;
  SlaveSpec s;
  s.address = kSinglePointSlave;
  s.mode = SlaveMode::FunctionTest;
  sc.slaves.push_back(s);
  sc.poll_schedule.push_back({0.0, kSinglePointSlave});
  sc.duration_s = 4.0 * default_master_timeout_s(sc.modem);
  return sc;
}

// Brute force: the sum byte is the unique s with (fold + 256 - s) % 256 == 0,
// the xor byte the unique x whose xor with the fold is zero.
std::pair<int, int> brute_force_checks(const Bytes& span) {
  int sum = -1, x = -1;
  for (int cand = 0; cand < 256; ++cand) {
    int acc = 256 - cand;
    int xacc = cand;
    for (auto b : span) {
      acc += b;
      xacc ^= b;
    }
    if (acc % 256 == 0) sum = cand;
    if (xacc == 0) x = cand;
  }
  return {sum, x};
}

double tail_peak(const Waveform& w, std::size_t skip) {
  double p = 0;
  for (std::size_t i = skip; i < w.size(); ++i) p = std::max(p, std::abs(w.samples[i]));
  return p;
}

}  // namespace

Scenario multi_point_scenario(int polls_per_slave) {
  Scenario sc;
  sc.seed = 2024;
  sc.modem.bit_rate_bps = 115200;
  sc.channel.cable_length_m = 700;
  sc.channel.turns = 4;
  sc.ebn0_db = 20.0;
  const char* addrs[] = {"64 49 46 68 00 53", "89 47 46 68 00 53", "03 03 46 68 00 53", "11 01 46 68 00 53",
                         "22 05 46 68 00 53"};
  const double temps[] = {19.7, 24.8, 3.5, 12.0, 0.0};
  for (int i = 0; i < 5; ++i) {
    SlaveSpec s;
    s.address = parse_address(addrs[i]);
    s.mode = i == 4 ? SlaveMode::FunctionTest : SlaveMode::Sensor;
    s.temperature_c = temps[i];
    sc.slaves.push_back(s);
  }
  // one poll per master timeout so a lost reply can never pile up behind the next poll
  const double interval = default_master_timeout_s(sc.modem) * 1.25;
  for (int round = 0; round < polls_per_slave; ++round)
    for (int i = 0; i < 5; ++i)
      sc.poll_schedule.push_back({interval * (round * 5 + i), sc.slaves[static_cast<std::size_t>(i)].address});
  sc.duration_s = interval * (5 * polls_per_slave + 2);
  return sc;
}

std::vector<CriterionResult> run_acceptance() {
  std::vector<CriterionResult> out;

  out.push_back(timed(1, "frame codec round trip", [](Outcome& o) {
    const auto t0 = std::chrono::steady_clock::now();
    std::mt19937_64 rng(1);
    std::uniform_int_distribution<int> byte(0, 255);
    auto random_frame = [&] {
      Frame f;
      f.relay_depth = static_cast<std::uint8_t>(byte(rng));
      for (auto& b : f.address.bytes) b = static_cast<std::uint8_t>(byte(rng));
      f.payload.resize(static_cast<std::size_t>(byte(rng)));
      for (auto& b : f.payload) b = static_cast<std::uint8_t>(byte(rng));
      return f;
    };
    int mismatches = 0;
    for (int i = 0; i < 1000; ++i) {
      const Frame f = random_frame();
      const auto r = decode_frame(encode_frame(f));
      if (!std::holds_alternative<Frame>(r) || std::get<Frame>(r) != f) ++mismatches;
    }
    int silent = 0;
    std::size_t corruptions = 0;
    for (int i = 0; i < 100; ++i) {
      const Bytes wire = encode_frame(random_frame());
      for (std::size_t pos = 0; pos < wire.size(); ++pos) {
        for (int delta = 1; delta < 256; ++delta) {
          Bytes bad = wire;
          bad[pos] = static_cast<std::uint8_t>(bad[pos] + delta);
          ++corruptions;
          if (std::holds_alternative<Frame>(decode_frame(bad))) ++silent;
        }
      }
    }
    const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    o.expect(mismatches == 0, std::to_string(mismatches) + " round-trip mismatches");
    o.expect(silent == 0, std::to_string(silent) + " undetected corruptions");
    o.expect(dt < 5.0, "runtime " + fmt(dt) + " s");
    if (o.passed)
      o.detail << "1000 frames exact; " << corruptions << " single-byte corruptions all detected; " << fmt(dt, 3)
               << " s";
  }));

  out.push_back(timed(2, "checksum worked example", [](Outcome& o) {
    const Bytes wire = from_hex("01 64 49 46 68 00 53 02 12 34 f7 75");
    const Bytes span(wire.begin(), wire.end() - 2);
    const auto [sum, x] = brute_force_checks(span);
    o.expect(sum == 0xF7 && x == 0x75, "oracle gives " + std::to_string(sum) + "/" + std::to_string(x));
    const Checks c = compute_checks(span);
    o.expect(c.sum == sum && c.xr == x, "codec checks disagree with the oracle");
    const auto r = decode_frame(wire);
    o.expect(std::holds_alternative<Frame>(r), "worked frame does not validate");
    if (std::holds_alternative<Frame>(r))
      o.expect(encode_frame(std::get<Frame>(r)) == wire, "re-encode differs");
    if (o.passed) o.detail << "oracle F7/75 matches; frame validates";
  }));

  out.push_back(timed(3, "channel calibration", [](Outcome& o) {
    const ModemConfig m;
    const double fs = m.sample_rate_hz();
    Waveform tx{std::vector<double>(8000), fs};
    for (std::size_t i = 0; i < tx.size(); ++i)
      tx.samples[i] = 12.0 * std::cos(2 * std::numbers::pi * m.carrier_hz * static_cast<double>(i) / fs);
    ChannelConfig ch;
    ch.turns = 4;
    ch.noise_sigma_v = 0;
    const std::size_t delay = ch.delay_samples(fs);
    const Waveform rx = propagate(tx, ch, 0);
    const double before = tail_peak(rx, delay);
    const double after = tail_peak(condition(rx, FrontEndConfig{}), delay + 4000);
    o.expect(std::abs(before - 0.392) <= 0.005 * 0.392, "pre front end " + fmt(before) + " V");
    o.expect(std::abs(after - 1.176) <= 0.02 * 1.176, "post front end " + fmt(after) + " V");
    if (o.passed) o.detail << fmt(before) << " V before, " << fmt(after) << " V after the front end";
  }));

  out.push_back(timed(4, "modem fidelity", [](Outcome& o) {
    const auto t0 = std::chrono::steady_clock::now();
    std::mt19937_64 rng(4);
    Bits bits(10000);
    for (auto& b : bits) b = static_cast<std::uint8_t>(rng() & 1U);
    for (double rate : {4800.0, 9600.0, 115200.0}) {
      ModemConfig m;
      m.bit_rate_bps = rate;
      o.expect(demodulate(modulate(bits, m), m, bits.size()) == bits, "noiseless mismatch at " + fmt(rate));
    }
    const auto pts = measure_ber(ModemConfig{}, {5.0, 7.0, 9.0}, 100000, 4);
    std::ostringstream summary;
    for (const auto& p : pts) {
      const double rel = (p.measured_ber - p.theoretical_ber) / p.theoretical_ber;
      o.expect(std::abs(rel) <= 0.20, fmt(p.ebn0_db) + " dB: " + fmt(p.measured_ber) + " vs " + fmt(p.theoretical_ber));
      summary << fmt(p.ebn0_db) << " dB " << fmt(p.measured_ber, 4) << " (theory " << fmt(p.theoretical_ber, 4)
              << "); ";
    }
    const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    o.expect(dt < 60.0, "runtime " + fmt(dt) + " s");
    if (o.passed) o.detail << "noiseless exact at 4800/9600/115200; " << summary.str() << fmt(dt, 3) << " s";
  }));

  out.push_back(timed(5, "single-point reproduction", [](Outcome& o) {
    for (double rate : {9600.0, 115200.0}) {
      const Report r = run_scenario(single_point_scenario(rate));
      const std::string tag = fmt(rate) + " bps: ";
      o.expect(r.polls.size() == 1 && !r.polls[0].timed_out && r.polls[0].payload == "00 ff",
               tag + "poll did not return 00 ff");
      bool command_seen = false;
      for (const auto& t : r.timeline)
        if (t.node == "slave1" && t.action == "frame_received") command_seen = t.frame == "01 64 49 46 68 00 53 02 12 34 f7 75";
      o.expect(command_seen, tag + "slave did not receive the 12 34 command frame");
      std::uint64_t errs = r.link.bit_errors;
      for (const auto& n : r.nodes) errs += n.decode_errors + n.timeouts;
      o.expect(errs == 0, tag + std::to_string(errs) + " errors");
    }
    if (o.passed) o.detail << "12 34 -> 00 ff with zero errors at 9600 and 115200 bps";
  }));

  Report multi_first;
  out.push_back(timed(6, "multi-point reproduction", [&](Outcome& o) {
    const Scenario sc = multi_point_scenario(100);
    multi_first = run_scenario(sc);
    const Report& r = multi_first;
    std::uint64_t decode_errors = 0, timeouts = 0;
    for (const auto& n : r.nodes) {
      decode_errors += n.decode_errors;
      timeouts += n.timeouts;
    }
    o.expect(r.polls.size() == 500, std::to_string(r.polls.size()) + " polls completed");
    o.expect(decode_errors == 0, std::to_string(decode_errors) + " decode errors");
    o.expect(timeouts == 0, std::to_string(timeouts) + " timeouts");
    std::vector<int> per_slave(5, 0);
    bool payloads_ok = true;
    for (const auto& p : r.polls) {
      for (std::size_t i = 0; i < 5; ++i) {
        if (p.target != to_string(sc.slaves[i].address)) continue;
        ++per_slave[i];
        if (i == 0 && p.payload != "13 07") payloads_ok = false;
        if (i == 1 && p.payload != "18 08") payloads_ok = false;
      }
    }
    for (int c : per_slave) o.expect(c == 100, "a slave answered " + std::to_string(c) + " polls");
    o.expect(payloads_ok, "19.7 C / 24.8 C slaves did not return 13 07 / 18 08");
    if (o.passed)
      o.detail << "500 polls, 0 decode errors, 0 timeouts, bit errors " << r.link.bit_errors << "/"
               << r.link.physical_bits << "; 13 07 and 18 08 returned";
  }));

  out.push_back(timed(7, "non-matching address isolation", [](Outcome& o) {
    const Scenario sc = multi_point_scenario(1);
    const Address absent = parse_address("77 77 46 68 00 53");
    const ModeTable modes = ModeTable::defaults().with_standby_folded();
    for (const auto& s : sc.slaves) {
      const SlaveState st = make_slave(s.address, s.mode, s.temperature_c, s.budget.gating);
      const auto [next, actions] = slave_step(st, slave_event::FrameReceived{make_command(absent)}, modes);
      o.expect(next == st && actions.empty(), "slave " + to_string(s.address) + " reacted");
    }
    Scenario run = sc;
    run.poll_schedule = {{0.0, absent}};
    run.duration_s = 3 * default_master_timeout_s(run.modem);
    const auto res = simulate(run);
    for (std::size_t i = 1; i < res.traces.size(); ++i) {
      o.expect(res.traces[i].records.size() == 1 && res.traces[i].records[0].mode == PowerModeName::STOP1,
               res.report.nodes[i].name + " changed power mode");
      o.expect(res.report.nodes[i].frames_sent == 0, res.report.nodes[i].name + " transmitted");
    }
    for (const auto& t : res.report.timeline)
      if (t.node != "master" && t.action != "frame_received")
        o.expect(false, t.node + " logged " + t.action);
    if (o.passed) o.detail << "5 slaves: no state, phase or power-mode change";
  }));

  out.push_back(timed(8, "power budget", [](Outcome& o) {
    UnitBudget b;
    const double all = standby_current(b);
    b.gating.carrier = false;
    const double no_carrier = standby_current(b);
    o.expect(all == 660.0, "standby " + fmt(all) + " uA");
    o.expect(no_carrier == 530.0, "carrier gated " + fmt(no_carrier) + " uA");
    if (o.passed) o.detail << "660 uA standby, 530 uA with the carrier unit gated off";
  }));

  out.push_back(timed(9, "energy accounting", [](Outcome& o) {
    const ModeTable modes = ModeTable::defaults();
    UnitBudget off;
    off.gating = Gating::all_off();
    const EnergyTrace hour{{{PowerModeName::STOP1, Gating::all_off(), 3600.0}}};
    const double uah = charge_consumed(hour, off, modes).microamp_hours;
    o.expect(std::abs(uah - 566.0) <= 1e-9 * 566.0, "1 h STOP1 gives " + fmt(uah, 12) + " uAh");
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> dur(0.0, 100.0);
    double worst = 0;
    for (int trial = 0; trial < 100; ++trial) {
      EnergyTrace a, b, ab;
      for (int i = 0; i < 8; ++i) {
        EnergyRecord r{static_cast<PowerModeName>(rng() % 5), Gating::from_bitmask(static_cast<std::uint8_t>(rng() % 32)),
                       dur(rng)};
        (i % 2 ? a : b).records.push_back(r);
      }
      ab.records = a.records;
      ab.records.insert(ab.records.end(), b.records.begin(), b.records.end());
      const double whole = charge_consumed(ab, UnitBudget{}, modes).microamp_hours;
      const double parts =
          charge_consumed(a, UnitBudget{}, modes).microamp_hours + charge_consumed(b, UnitBudget{}, modes).microamp_hours;
      worst = std::max(worst, std::abs(whole - parts) / whole);
    }
    o.expect(worst <= 1e-9, "additivity error " + fmt(worst));
    if (o.passed) o.detail << "566 uAh; worst concatenation error " << fmt(worst, 3);
  }));

  out.push_back(timed(10, "wake latency", [](Outcome& o) {
    const Report r = run_scenario(single_point_scenario(115200));
    SimTime received = -1, first = -1;
    for (const auto& t : r.timeline) {
      if (t.node != "slave1") continue;
      if (received < 0 && t.action == "frame_received") received = t.time_ps;
      if (received >= 0 && first < 0 && t.action == "enter_phase" && t.detail != "STANDBY") first = t.time_ps;
    }
    o.expect(received >= 0 && first >= 0, "timeline lacks the slave wake-up");
    o.expect(first - received == 7'800'000, "gap " + std::to_string(first - received) + " ps");
    if (o.passed) o.detail << "gap " << (first - received) << " ps = 7.8 us";
  }));

  out.push_back(timed(11, "determinism", [&](Outcome& o) {
    const std::string a = multi_first.nodes.empty() ? report_json_text(run_scenario(multi_point_scenario(100)))
                                                    : report_json_text(multi_first);
    const std::string b = report_json_text(run_scenario(multi_point_scenario(100)));
    o.expect(a == b, "report.json differs between runs");
    if (o.passed) o.detail << "report.json byte-identical (" << a.size() << " bytes)";
  }));

  return out;
}

bool print_acceptance(std::ostream& os, const std::vector<CriterionResult>& results) {
  bool all = true;
  for (const auto& r : results) {
    all = all && r.passed;
    os << (r.passed ? "PASS " : "FAIL ") << r.id << " " << r.name << ": " << r.detail << " [" << fmt(r.seconds, 3)
       << " s]\n";
  }
  return all;
}

}  // namespace ucsim
