// SPDX-License-Identifier: Apache-2.0
//
// nodes.hpp
// Surface master and underwater slave protocol machines. Both are pure
// value transformers: step(state, event) -> (state, actions). The
// simulator owns the clocks and carries out the actions.

#pragma once

#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "ucsim/frame_codec.hpp"
#include "ucsim/power_model.hpp"

namespace ucsim {

/// Command payload the master sends to request a reading.
inline const Bytes kAcquireCommand = {0x12, 0x34};
/// Reply payload in function-test mode.
inline const Bytes kFunctionTestReply = {0x00, 0xFF};
constexpr std::uint8_t kDirectRelayDepth = 1;

struct SensorReading {
  std::uint8_t integer_c = 0;
  std::uint8_t decimal_c = 0;

  friend bool operator==(const SensorReading&, const SensorReading&) = default;
};

class NodeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// 0 <= celsius < 100 at one decimal; bytes carry the integer part and the
/// tenths digit as plain binary. Throws NodeError (out of range).
SensorReading encode_temperature(double celsius);
/// Throws NodeError when the tenths digit exceeds 9.
double decode_temperature(SensorReading reading);

// ---- actions -------------------------------------------------------------

struct PowerTransitionAction {
  PowerModeName from;
  PowerModeName to;
  double latency_s;
};
struct EnterPhase {
  const char* phase;
};
struct SetGating {
  Gating gating;
};
struct SendFrame {
  Frame frame;
};
struct RequestTick {
  double delay_s;
};
struct StartTimer {
  double timeout_s;
};
struct CancelTimer {};
struct ReportResult {
  Address target;
  std::optional<Bytes> payload;  // nullopt: timed out
};
struct Deferred {
  Address target;
};
struct Ignored {
  std::string reason;
};

using Action = std::variant<PowerTransitionAction, EnterPhase, SetGating, SendFrame, RequestTick, StartTimer,
                            CancelTimer, ReportResult, Deferred, Ignored>;
using Actions = std::vector<Action>;

/// Short machine-readable name ("power_transition", "send_frame", ...).
const char* action_name(const Action& a);

// ---- slave ---------------------------------------------------------------

enum class SlavePhase { STANDBY, WAKE_CHECK, ACQUIRE, TRANSMIT };
enum class SlaveMode { FunctionTest, Sensor };

const char* to_string(SlavePhase p);
const char* to_string(SlaveMode m);

struct SlaveState {
  SlavePhase phase = SlavePhase::STANDBY;
  Address address;
  SlaveMode mode = SlaveMode::FunctionTest;
  PowerModeName power_mode = PowerModeName::STOP1;
  Gating gating;
  Gating standby_gating;
  double temperature_c = 0.0;
  double acquire_time_s = 0.0;

  friend bool operator==(const SlaveState&, const SlaveState&) = default;
};

SlaveState make_slave(const Address& address, SlaveMode mode, double temperature_c = 0.0,
                      Gating standby_gating = Gating::all_on());

namespace slave_event {
struct FrameReceived {
  Frame frame;
};
struct TxDone {};
struct Tick {};
}  // namespace slave_event

using SlaveEvent = std::variant<slave_event::FrameReceived, slave_event::TxDone, slave_event::Tick>;

std::pair<SlaveState, Actions> slave_step(const SlaveState& state, const SlaveEvent& event,
                                          const ModeTable& modes = ModeTable::defaults());

/// Payload the slave answers with in its current mode.
Bytes reply_payload(const SlaveState& state);

// ---- master --------------------------------------------------------------

enum class MasterPhase { IDLE, SEND_CMD, AWAIT_REPLY, RECEIVE, REPORT };
const char* to_string(MasterPhase p);

struct MasterState {
  MasterPhase phase = MasterPhase::IDLE;
  std::optional<Address> pending_target;
  double timeout_s = 0.0;
  int retries = 0;
  int attempts_left = 0;
  PowerModeName power_mode = PowerModeName::STOP1;
  Gating gating;
  Gating standby_gating;

  friend bool operator==(const MasterState&, const MasterState&) = default;
};

MasterState make_master(double timeout_s, int retries = 0, Gating standby_gating = Gating::all_on());

namespace master_event {
struct PollRequest {
  Address target;
};
struct FrameReceived {
  Frame frame;
};
struct Timeout {};
struct TxDone {};
}  // namespace master_event

using MasterEvent =
    std::variant<master_event::PollRequest, master_event::FrameReceived, master_event::Timeout, master_event::TxDone>;

std::pair<MasterState, Actions> master_step(const MasterState& state, const MasterEvent& event,
                                            const ModeTable& modes = ModeTable::defaults());

Frame make_command(const Address& target);

}  // namespace ucsim
