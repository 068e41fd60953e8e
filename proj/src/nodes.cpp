// SPDX-License-Identifier: Apache-2.0

#include "ucsim/nodes.hpp"

#include <cmath>

namespace ucsim {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

Gating transmit_gating() {
  Gating g = Gating::all_on();
  g.transmitting = true;
  return g;
}

}  // namespace

SensorReading encode_temperature(double celsius) {
  if (!(celsius >= 0.0) || !(celsius < 100.0)) throw NodeError("temperature out of range [0, 100)");
  const long tenths = std::lround(celsius * 10.0);
  if (tenths >= 1000) throw NodeError("temperature out of range [0, 100)");
  return {static_cast<std::uint8_t>(tenths / 10), static_cast<std::uint8_t>(tenths % 10)};
}

double decode_temperature(SensorReading r) {
  if (r.decimal_c > 9) throw NodeError("invalid decimal digit " + std::to_string(r.decimal_c));
  return r.integer_c + r.decimal_c / 10.0;
}

const char* action_name(const Action& a) {
  return std::visit(Overloaded{
                        [](const PowerTransitionAction&) { return "power_transition"; },
                        [](const EnterPhase&) { return "enter_phase"; },
                        [](const SetGating&) { return "set_gating"; },
                        [](const SendFrame&) { return "send_frame"; },
                        [](const RequestTick&) { return "request_tick"; },
                        [](const StartTimer&) { return "start_timer"; },
                        [](const CancelTimer&) { return "cancel_timer"; },
                        [](const ReportResult&) { return "report"; },
                        [](const Deferred&) { return "deferred"; },
                        [](const Ignored&) { return "ignored"; },
                    },
                    a);
}

const char* to_string(SlavePhase p) {
  switch (p) {
    case SlavePhase::STANDBY: return "STANDBY";
    case SlavePhase::WAKE_CHECK: return "WAKE_CHECK";
    case SlavePhase::ACQUIRE: return "ACQUIRE";
    case SlavePhase::TRANSMIT: return "TRANSMIT";
  }
  return "?";
}

const char* to_string(SlaveMode m) { return m == SlaveMode::FunctionTest ? "function_test" : "sensor"; }

const char* to_string(MasterPhase p) {
  switch (p) {
    case MasterPhase::IDLE: return "IDLE";
    case MasterPhase::SEND_CMD: return "SEND_CMD";
    case MasterPhase::AWAIT_REPLY: return "AWAIT_REPLY";
    case MasterPhase::RECEIVE: return "RECEIVE";
    case MasterPhase::REPORT: return "REPORT";
  }
  return "?";
}

SlaveState make_slave(const Address& address, SlaveMode mode, double temperature_c, Gating standby_gating) {
  SlaveState s;
  s.address = address;
  s.mode = mode;
  s.temperature_c = temperature_c;
  s.standby_gating = standby_gating;
  s.gating = standby_gating;
  return s;
}

Bytes reply_payload(const SlaveState& state) {
  if (state.mode == SlaveMode::FunctionTest) return kFunctionTestReply;
  const SensorReading r = encode_temperature(state.temperature_c);
  return {r.integer_c, r.decimal_c};
}

std::pair<SlaveState, Actions> slave_step(const SlaveState& state, const SlaveEvent& event, const ModeTable& modes) {
  SlaveState next = state;
  Actions actions;

  std::visit(Overloaded{
                 [&](const slave_event::FrameReceived& ev) {
                   if (state.phase != SlavePhase::STANDBY) {
                     actions.emplace_back(Ignored{"frame while busy"});
                     return;
                   }
                   // address judgment happens before anything wakes
                   if (!address_matches(ev.frame.address, state.address)) return;
                   const Transition t = transition(state.power_mode, PowerModeName::RUN, modes);
                   next.phase = SlavePhase::ACQUIRE;
                   next.power_mode = PowerModeName::RUN;
                   next.gating = Gating::all_on();
                   actions.emplace_back(PowerTransitionAction{state.power_mode, PowerModeName::RUN, t.latency_s});
                   actions.emplace_back(EnterPhase{to_string(SlavePhase::WAKE_CHECK)});
                   actions.emplace_back(EnterPhase{to_string(SlavePhase::ACQUIRE)});
                   actions.emplace_back(SetGating{next.gating});
                   actions.emplace_back(RequestTick{state.acquire_time_s});
                 },
                 [&](const slave_event::Tick&) {
                   if (state.phase != SlavePhase::ACQUIRE) {
                     actions.emplace_back(Ignored{"tick outside ACQUIRE"});
                     return;
                   }
                   next.phase = SlavePhase::TRANSMIT;
                   next.gating = transmit_gating();
                   Frame reply{kDirectRelayDepth, state.address, reply_payload(state)};
                   actions.emplace_back(EnterPhase{to_string(SlavePhase::TRANSMIT)});
                   actions.emplace_back(SetGating{next.gating});
                   actions.emplace_back(SendFrame{std::move(reply)});
                 },
                 [&](const slave_event::TxDone&) {
                   if (state.phase != SlavePhase::TRANSMIT) {
                     actions.emplace_back(Ignored{"tx_done outside TRANSMIT"});
                     return;
                   }
                   next.phase = SlavePhase::STANDBY;
                   next.gating = state.standby_gating;
                   next.power_mode = PowerModeName::STOP1;
                   actions.emplace_back(SetGating{next.gating});
                   actions.emplace_back(PowerTransitionAction{PowerModeName::RUN, PowerModeName::STOP1,
                                                              transition(PowerModeName::RUN, PowerModeName::STOP1, modes).latency_s});
                   actions.emplace_back(EnterPhase{to_string(SlavePhase::STANDBY)});
                 },
             },
             event);
  return {std::move(next), std::move(actions)};
}

MasterState make_master(double timeout_s, int retries, Gating standby_gating) {
  MasterState m;
  m.timeout_s = timeout_s;
  m.retries = retries;
  m.standby_gating = standby_gating;
  m.gating = standby_gating;
  return m;
}

Frame make_command(const Address& target) { return Frame{kDirectRelayDepth, target, kAcquireCommand}; }

std::pair<MasterState, Actions> master_step(const MasterState& state, const MasterEvent& event,
                                            const ModeTable& modes) {
  MasterState next = state;
  Actions actions;

  auto send_command = [&](const Address& target) {
    next.phase = MasterPhase::SEND_CMD;
    next.gating = transmit_gating();
    actions.emplace_back(EnterPhase{to_string(MasterPhase::SEND_CMD)});
    actions.emplace_back(SetGating{next.gating});
    actions.emplace_back(SendFrame{make_command(target)});
    actions.emplace_back(StartTimer{state.timeout_s});
  };
  auto back_to_idle = [&] {
    next.phase = MasterPhase::IDLE;
    next.pending_target.reset();
    next.attempts_left = 0;
    next.gating = state.standby_gating;
    next.power_mode = PowerModeName::STOP1;
    actions.emplace_back(SetGating{next.gating});
    actions.emplace_back(PowerTransitionAction{PowerModeName::RUN, PowerModeName::STOP1, 0.0});
    actions.emplace_back(EnterPhase{to_string(MasterPhase::IDLE)});
  };

  std::visit(Overloaded{
                 [&](const master_event::PollRequest& ev) {
                   if (state.phase != MasterPhase::IDLE) {
                     actions.emplace_back(Deferred{ev.target});
                     return;
                   }
                   const Transition t = transition(state.power_mode, PowerModeName::RUN, modes);
                   next.pending_target = ev.target;
                   next.attempts_left = state.retries;
                   next.power_mode = PowerModeName::RUN;
                   actions.emplace_back(PowerTransitionAction{state.power_mode, PowerModeName::RUN, t.latency_s});
                   send_command(ev.target);
                 },
                 [&](const master_event::TxDone&) {
                   if (state.phase != MasterPhase::SEND_CMD) {
                     actions.emplace_back(Ignored{"tx_done outside SEND_CMD"});
                     return;
                   }
                   next.phase = MasterPhase::AWAIT_REPLY;
                   next.gating = Gating::all_on();
                   actions.emplace_back(SetGating{next.gating});
                   actions.emplace_back(EnterPhase{to_string(MasterPhase::AWAIT_REPLY)});
                 },
                 [&](const master_event::FrameReceived& ev) {
                   if (state.phase != MasterPhase::AWAIT_REPLY || !state.pending_target) {
                     actions.emplace_back(Ignored{"not awaiting a reply"});
                     return;
                   }
                   if (!address_matches(ev.frame.address, *state.pending_target)) {
                     actions.emplace_back(Ignored{"reply from unexpected address"});
                     return;
                   }
                   actions.emplace_back(EnterPhase{to_string(MasterPhase::RECEIVE)});
                   actions.emplace_back(CancelTimer{});
                   actions.emplace_back(EnterPhase{to_string(MasterPhase::REPORT)});
                   actions.emplace_back(ReportResult{*state.pending_target, ev.frame.payload});
                   back_to_idle();
                 },
                 [&](const master_event::Timeout&) {
                   if (state.phase != MasterPhase::AWAIT_REPLY || !state.pending_target) {
                     actions.emplace_back(Ignored{"stale timeout"});
                     return;
                   }
                   if (state.attempts_left > 0) {
                     next.attempts_left = state.attempts_left - 1;
                     send_command(*state.pending_target);
                     return;
                   }
                   actions.emplace_back(EnterPhase{to_string(MasterPhase::REPORT)});
                   actions.emplace_back(ReportResult{*state.pending_target, std::nullopt});
                   back_to_idle();
                 },
             },
             event);
  return {std::move(next), std::move(actions)};
}

}  // namespace ucsim
