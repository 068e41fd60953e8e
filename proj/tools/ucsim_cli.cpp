// SPDX-License-Identifier: Apache-2.0
//
// ucsim: run scenarios, sweep BER, run the acceptance suite.
// Exit codes: 0 success, 1 failure, 2 configuration error.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "ucsim/acceptance.hpp"
#include "ucsim/report_io.hpp"

namespace fs = std::filesystem;
using namespace ucsim;

namespace {

constexpr int kOk = 0;
constexpr int kFailure = 1;
constexpr int kConfigError = 2;

int cmd_run(const fs::path& scenario_path, const fs::path& out_dir, std::optional<std::uint64_t> seed, bool dump) {
  Scenario sc;
  try {
    sc = load_scenario(scenario_path);
    if (seed) sc.seed = *seed;
    sc.validate();
  } catch (const ConfigInvalid& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const IoFailure& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  }
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) {
    std::cerr << "cannot create " << out_dir << ": " << ec.message() << "\n";
    return kFailure;
  }
  const SimulationResult res = simulate(sc, SimulationOptions{dump});
  emit_report(res.report, ReportFormat::Json, out_dir / "report.json");
  emit_report(res.report, ReportFormat::Csv, out_dir / "report.csv");
  if (dump) {
    const fs::path wdir = out_dir / "waveforms";
    fs::create_directories(wdir);
    for (const auto& [name, w] : res.waveforms) {
      std::ofstream os(wdir / (name + ".csv"));
      write_waveform_csv(os, w);
      if (!os) throw IoFailure("write failed: " + (wdir / (name + ".csv")).string());
    }
  }
  std::uint64_t timeouts = 0, decode_errors = 0;
  for (const auto& n : res.report.nodes) {
    timeouts += n.timeouts;
    decode_errors += n.decode_errors;
  }
  std::cout << "polls " << res.report.polls.size() << ", timeouts " << timeouts << ", decode errors " << decode_errors
            << ", bit errors " << res.report.link.bit_errors << "/" << res.report.link.physical_bits << "\n"
            << "wrote " << (out_dir / "report.json").string() << "\n";
  return kOk;
}

int cmd_ber_sweep(const std::vector<double>& ebn0, std::size_t bits, int rate, const fs::path& out, std::uint64_t seed) {
  if (rate != 4800 && rate != 9600 && rate != 115200) {
    std::cerr << "config error: --rate must be 4800, 9600 or 115200\n";
    return kConfigError;
  }
  if (bits < 10000) {
    std::cerr << "config error: --bits must be at least 10000\n";
    return kConfigError;
  }
  ModemConfig m;
  m.bit_rate_bps = rate;
  const auto pts = measure_ber(m, ebn0, bits, seed);
  std::ofstream os(out);
  if (!os) throw IoFailure("cannot write " + out.string());
  os << "ebn0_db,bits,errors,measured_ber,theoretical_ber\n";
  char line[160];
  for (const auto& p : pts) {
    std::snprintf(line, sizeof line, "%.6g,%llu,%llu,%.9g,%.9g\n", p.ebn0_db, static_cast<unsigned long long>(p.bits),
                  static_cast<unsigned long long>(p.errors), p.measured_ber, p.theoretical_ber);
    os << line;
    std::cout << line;
  }
  if (!os) throw IoFailure("write failed: " + out.string());
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Inductive-coupling power-carrier link simulator"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "Simulate a scenario and write report.json, report.csv, timeline.jsonl");
  std::string scenario, out_dir;
  std::uint64_t seed_value = 0;
  bool dump = false;
  run->add_option("--scenario", scenario, "Scenario JSON file")->required();
  run->add_option("--out", out_dir, "Output directory")->required();
  auto* seed_opt = run->add_option("--seed", seed_value, "Override the scenario seed");
  run->add_flag("--dump-waveforms", dump, "Also write receiver-input waveforms as CSV");

  auto* sweep = app.add_subcommand("ber-sweep", "Monte Carlo BER against 0.5 exp(-Eb/N0)");
  std::vector<double> ebn0;
  std::size_t bits = 100000;
  int rate = 115200;
  std::string sweep_out;
  std::uint64_t sweep_seed = 1;
  sweep->add_option("--ebn0", ebn0, "Eb/N0 points in dB")->required()->delimiter(',');
  sweep->add_option("--bits", bits, "Bits per point");
  sweep->add_option("--rate", rate, "4800, 9600 or 115200");
  sweep->add_option("--out", sweep_out, "Output CSV")->required();
  sweep->add_option("--seed", sweep_seed, "Master seed");

  auto* validate = app.add_subcommand("validate", "Run the acceptance suite");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kConfigError;
  }

  try {
    if (*run) {
      std::optional<std::uint64_t> seed;
      if (*seed_opt) seed = seed_value;
      return cmd_run(scenario, out_dir, seed, dump);
    }
    if (*sweep) return cmd_ber_sweep(ebn0, bits, rate, sweep_out, sweep_seed);
    if (*validate) return print_acceptance(std::cout, run_acceptance()) ? kOk : kFailure;
  } catch (const ConfigInvalid& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFailure;
  }
  return kFailure;
}
