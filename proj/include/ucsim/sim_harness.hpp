// SPDX-License-Identifier: Apache-2.0
//
// sim_harness.hpp
// Discrete-event simulation of one master polling N slaves over the shared
// coupled cable. Time is kept in integer picoseconds; events are ordered by
// (time, insertion sequence). Waveforms are only synthesised while a frame is
// on the cable.

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ucsim/channel.hpp"
#include "ucsim/dpsk_modem.hpp"
#include "ucsim/frame_codec.hpp"
#include "ucsim/nodes.hpp"
#include "ucsim/power_model.hpp"

namespace ucsim {

using SimTime = std::int64_t;  // picoseconds

constexpr SimTime to_ps(double seconds) { return static_cast<SimTime>(seconds * 1e12 + (seconds >= 0 ? 0.5 : -0.5)); }
constexpr double to_seconds(SimTime ps) { return static_cast<double>(ps) * 1e-12; }

/// Scenario validation failure; `path()` names the offending field.
class ConfigInvalid : public std::runtime_error {
 public:
  ConfigInvalid(std::string path, const std::string& what)
      : std::runtime_error(path + ": " + what), path_(std::move(path)) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

struct SlaveSpec {
  Address address;
  SlaveMode mode = SlaveMode::FunctionTest;
  double temperature_c = 0.0;
  double acquire_time_s = 0.0;
  UnitBudget budget;
};

struct MasterSpec {
  UnitBudget budget;
  /// Unset: 2 x (command airtime + STOP1 wake latency + reply airtime).
  std::optional<double> timeout_s;
  int retries = 0;
};

struct PollEntry {
  double time_s = 0.0;
  Address target;
};

/// Forces `node` (0 = master, i = slave i) to put a frame on the cable.
struct CollisionInjection {
  double time_s = 0.0;
  int node = 0;
};

struct Scenario {
  std::uint64_t seed = 1;
  double duration_s = 1.0;
  ModemConfig modem;
  ChannelConfig channel;
  /// When set, noise is calibrated to this Eb/N0 at the receiver input and
  /// channel.noise_sigma_v is ignored.
  std::optional<double> ebn0_db = 20.0;
  FrontEndConfig front_end;
  MasterSpec master;
  std::vector<SlaveSpec> slaves;
  std::vector<PollEntry> poll_schedule;
  std::vector<CollisionInjection> collision_injections;

  /// Throws ConfigInvalid.
  void validate() const;
};

struct NodeReport {
  std::string name;
  std::string address;
  std::uint64_t frames_sent = 0;
  std::uint64_t frames_received = 0;
  /// Decoded but not accepted (address mismatch or node busy).
  std::uint64_t frames_filtered = 0;
  /// Not heard because the node was transmitting itself.
  std::uint64_t frames_missed = 0;
  std::uint64_t decode_errors = 0;
  std::uint64_t timeouts = 0;
  double energy_uah = 0.0;

  friend bool operator==(const NodeReport&, const NodeReport&) = default;
};

struct LinkReport {
  std::uint64_t physical_bits = 0;
  std::uint64_t bit_errors = 0;
  double measured_ber = 0.0;
  double nominal_bps = 0.0;
  double effective_bps = 0.0;

  friend bool operator==(const LinkReport&, const LinkReport&) = default;
};

struct PollOutcome {
  SimTime completed_ps = 0;
  std::string target;
  bool timed_out = false;
  std::string payload;  // hex

  friend bool operator==(const PollOutcome&, const PollOutcome&) = default;
};

struct TimelineRecord {
  SimTime time_ps = 0;
  std::uint64_t seq = 0;
  std::string node;
  std::string phase;
  std::string action;
  std::string detail;
  std::string frame;  // hex, empty when no frame is involved

  friend bool operator==(const TimelineRecord&, const TimelineRecord&) = default;
};

struct Report {
  std::vector<NodeReport> nodes;  // master first, then slaves in scenario order
  LinkReport link;
  std::vector<PollOutcome> polls;
  std::vector<TimelineRecord> timeline;

  friend bool operator==(const Report&, const Report&) = default;
};

struct SimulationResult {
  Report report;
  ModeTable modes;
  std::vector<UnitBudget> budgets;  // per node, report order
  std::vector<EnergyTrace> traces;  // per node, report order
  /// Receiver input of every reception, filled only when requested.
  std::vector<std::pair<std::string, Waveform>> waveforms;
};

struct SimulationOptions {
  bool keep_waveforms = false;
};

SimulationResult simulate(const Scenario& sc, const SimulationOptions& opts = {});
inline Report run_scenario(const Scenario& sc) { return simulate(sc).report; }

/// Airtime of an encoded frame of `frame_bytes` bytes, reference symbol included.
double frame_airtime_s(const ModemConfig& modem, std::size_t frame_bytes);
double default_master_timeout_s(const ModemConfig& modem);

struct BerPoint {
  double ebn0_db = 0.0;
  double measured_ber = 0.0;
  std::uint64_t bits = 0;
  std::uint64_t errors = 0;
  double theoretical_ber = 0.0;

  friend bool operator==(const BerPoint&, const BerPoint&) = default;
};

/// Point i uses seed derive_seed(seed, i). Throws std::invalid_argument if
/// n_bits < 10^4.
std::vector<BerPoint> measure_ber(const ModemConfig& modem, const std::vector<double>& ebn0_db, std::size_t n_bits,
                                  std::uint64_t seed);

}  // namespace ucsim
