// SPDX-License-Identifier: Apache-2.0

#include "ucsim/sim_harness.hpp"

#include <algorithm>
#include <cstdio>
#include <deque>
#include <queue>
#include <set>

#include "ucsim/kernels.hpp"

namespace ucsim {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

constexpr int kMaster = 0;

enum class EventKind { Poll, Resume, TxEnd, RxComplete, Tick, Timeout, Inject };

struct Event {
  SimTime time = 0;
  std::uint64_t seq = 0;
  EventKind kind = EventKind::Poll;
  int node = 0;
  std::int64_t tx_id = -1;
  std::uint64_t generation = 0;
  Address target;
  Actions pending;           // Resume: actions still to carry out
  PowerModeName resume_mode = PowerModeName::RUN;
  bool injected = false;
};

struct Later {
  bool operator()(const Event& a, const Event& b) const {
    return a.time != b.time ? a.time > b.time : a.seq > b.seq;
  }
};

struct Transmission {
  std::int64_t id = 0;
  int sender = 0;
  std::int64_t start_sample = 0;
  SimTime start = 0;
  SimTime end = 0;
  Bytes bytes;
  Bits bits;
  std::vector<double> samples;

  std::int64_t end_sample() const { return start_sample + static_cast<std::int64_t>(samples.size()); }
};

struct NodeRuntime {
  std::string name;
  PowerModeName mode = PowerModeName::STOP1;
  Gating gating;
  SimTime last_change = 0;
  EnergyTrace trace;
  std::string phase;
  std::uint64_t timer_generation = 0;
  NodeReport counters;
};

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

class Simulator {
 public:
  Simulator(const Scenario& sc, const SimulationOptions& opts) : sc_(sc), opts_(opts) {
    modes_ = ModeTable::defaults().with_standby_folded();
    fs_ = sc.modem.sample_rate_hz();
    delay_samples_ = sc.channel.delay_samples(fs_);
    delay_ps_ = samples_to_ps(static_cast<std::int64_t>(delay_samples_));

    channel_ = sc.channel;
    if (sc.ebn0_db) {
      const double rx_amplitude = sc.modem.amplitude_v * sc.channel.amplitude_gain();
      channel_.noise_sigma_v =
          rx_amplitude > 0 ? ebn0_to_noise_sigma(db_to_linear(*sc.ebn0_db), rx_amplitude, sc.modem.samples_per_bit())
                           : 0.0;
    }

    const double timeout = sc.master.timeout_s.value_or(default_master_timeout_s(sc.modem));
    master_ = make_master(timeout, sc.master.retries, sc.master.budget.gating);
    nodes_.push_back(make_runtime("master", "", master_.power_mode, master_.gating));
    budgets_.push_back(sc.master.budget);
    for (std::size_t i = 0; i < sc.slaves.size(); ++i) {
      const auto& s = sc.slaves[i];
      SlaveState st = make_slave(s.address, s.mode, s.temperature_c, s.budget.gating);
      st.acquire_time_s = s.acquire_time_s;
      slaves_.push_back(st);
      nodes_.push_back(
          make_runtime("slave" + std::to_string(i + 1), to_string(s.address), st.power_mode, st.gating));
      nodes_.back().phase = to_string(st.phase);
      budgets_.push_back(s.budget);
    }
    nodes_[kMaster].phase = to_string(master_.phase);
  }

  SimulationResult run() {
    for (const auto& p : sc_.poll_schedule) {
      Event e;
      e.kind = EventKind::Poll;
      e.time = to_ps(p.time_s);
      e.node = kMaster;
      e.target = p.target;
      push(std::move(e));
    }
    for (const auto& c : sc_.collision_injections) {
      Event e;
      e.kind = EventKind::Inject;
      e.time = to_ps(c.time_s);
      e.node = c.node;
      push(std::move(e));
    }

    const SimTime end = to_ps(sc_.duration_s);
    while (!queue_.empty() && queue_.top().time <= end) {
      Event e = queue_.top();
      queue_.pop();
      now_ = e.time;
      dispatch(e);
    }

    SimulationResult out;
    out.modes = modes_;
    out.budgets = budgets_;
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
      close_energy(static_cast<int>(i), end);
      auto& n = nodes_[i];
      n.counters.energy_uah = charge_consumed(n.trace, budgets_[i], modes_).microamp_hours;
      report_.nodes.push_back(n.counters);
      out.traces.push_back(n.trace);
    }
    report_.link.nominal_bps = sc_.modem.bit_rate_bps;
    report_.link.effective_bps = sc_.modem.effective_bit_rate();
    report_.link.measured_ber =
        report_.link.physical_bits ? static_cast<double>(report_.link.bit_errors) / report_.link.physical_bits : 0.0;
    out.report = std::move(report_);
    out.waveforms = std::move(waveforms_);
    return out;
  }

 private:
  NodeRuntime make_runtime(std::string name, std::string address, PowerModeName mode, Gating gating) {
    NodeRuntime n;
    n.name = name;
    n.mode = mode;
    n.gating = gating;
    n.counters.name = std::move(name);
    n.counters.address = std::move(address);
    return n;
  }

  SimTime samples_to_ps(std::int64_t n) const { return to_ps(static_cast<double>(n) / fs_); }

  void push(Event e) {
    e.seq = next_seq_++;
    queue_.push(std::move(e));
  }

  void log(int node, std::string action, std::string detail = {}, std::string frame = {}) {
    TimelineRecord r;
    r.time_ps = now_;
    r.seq = report_.timeline.size();
    r.node = nodes_[static_cast<std::size_t>(node)].name;
    r.phase = nodes_[static_cast<std::size_t>(node)].phase;
    r.action = std::move(action);
    r.detail = std::move(detail);
    r.frame = std::move(frame);
    report_.timeline.push_back(std::move(r));
  }

  // ---- energy --------------------------------------------------------------

  void close_energy(int node, SimTime t) {
    auto& n = nodes_[static_cast<std::size_t>(node)];
    if (t > n.last_change) n.trace.records.push_back({n.mode, n.gating, to_seconds(t - n.last_change)});
    n.last_change = std::max(n.last_change, t);
  }

  void set_power(int node, PowerModeName mode, Gating gating) {
    close_energy(node, now_);
    auto& n = nodes_[static_cast<std::size_t>(node)];
    n.mode = mode;
    n.gating = gating;
  }

  // ---- dispatch ------------------------------------------------------------

  void dispatch(const Event& e) {
    switch (e.kind) {
      case EventKind::Poll: {
        log(kMaster, "poll_request", "target=" + to_string(e.target));
        step_master(master_event::PollRequest{e.target});
        break;
      }
      case EventKind::Resume: {
        auto& n = nodes_[static_cast<std::size_t>(e.node)];
        set_power(e.node, e.resume_mode, n.gating);
        apply(e.node, e.pending);
        break;
      }
      case EventKind::TxEnd: on_tx_end(e); break;
      case EventKind::RxComplete: on_rx_complete(e); break;
      case EventKind::Tick: step_slave(e.node, slave_event::Tick{}); break;
      case EventKind::Timeout: {
        if (e.generation != nodes_[kMaster].timer_generation) break;  // cancelled
        log(kMaster, "timeout");
        step_master(master_event::Timeout{});
        break;
      }
      case EventKind::Inject: {
        Frame f = e.node == kMaster
                      ? make_command(Address{{0xFF, 0xFF, 0xFF, 0xFF, 0xFF, 0xFF}})
                      : Frame{kDirectRelayDepth, slaves_[static_cast<std::size_t>(e.node - 1)].address,
                              reply_payload(slaves_[static_cast<std::size_t>(e.node - 1)])};
        log(e.node, "inject", "forced transmission");
        start_transmission(e.node, f, true);
        break;
      }
    }
  }

  void step_master(const MasterEvent& ev) {
    auto [next, actions] = master_step(master_, ev, modes_);
    master_ = std::move(next);
    apply(kMaster, actions);
  }

  void step_slave(int node, const SlaveEvent& ev) {
    auto& st = slaves_[static_cast<std::size_t>(node - 1)];
    auto [next, actions] = slave_step(st, ev, modes_);
    st = std::move(next);
    apply(node, actions);
  }

  /// Carries out `actions` at now_. A power transition with nonzero latency
  /// suspends the rest of the list until the transition completes.
  void apply(int node, const Actions& actions) {
    auto& n = nodes_[static_cast<std::size_t>(node)];
    for (std::size_t i = 0; i < actions.size(); ++i) {
      const Action& a = actions[i];
      bool suspended = false;
      std::visit(
          Overloaded{
              [&](const PowerTransitionAction& p) {
                log(node, action_name(a),
                    std::string(to_string(p.from)) + "->" + to_string(p.to) + " latency_s=" + format_double(p.latency_s));
                const SimTime latency = to_ps(p.latency_s);
                if (latency > 0) {
                  Event r;
                  r.kind = EventKind::Resume;
                  r.time = now_ + latency;
                  r.node = node;
                  r.resume_mode = p.to;
                  r.pending.assign(actions.begin() + static_cast<std::ptrdiff_t>(i) + 1, actions.end());
                  push(std::move(r));
                  suspended = true;
                } else {
                  set_power(node, p.to, n.gating);
                }
              },
              [&](const EnterPhase& p) {
                n.phase = p.phase;
                log(node, action_name(a), p.phase);
              },
              [&](const SetGating& g) {
                set_power(node, n.mode, g.gating);
                log(node, action_name(a), "mask=" + std::to_string(g.gating.bitmask()));
              },
              [&](const SendFrame& s) { start_transmission(node, s.frame, false); },
              [&](const RequestTick& t) {
                Event e;
                e.kind = EventKind::Tick;
                e.time = now_ + to_ps(t.delay_s);
                e.node = node;
                push(std::move(e));
              },
              [&](const StartTimer& t) {
                Event e;
                e.kind = EventKind::Timeout;
                e.time = now_ + to_ps(t.timeout_s);
                e.node = node;
                e.generation = ++n.timer_generation;
                push(std::move(e));
                log(node, action_name(a), "timeout_s=" + format_double(t.timeout_s));
              },
              [&](const CancelTimer&) {
                ++n.timer_generation;
                log(node, action_name(a));
              },
              [&](const ReportResult& r) {
                PollOutcome o;
                o.completed_ps = now_;
                o.target = to_string(r.target);
                o.timed_out = !r.payload;
                if (r.payload) o.payload = to_hex(*r.payload);
                if (o.timed_out) ++n.counters.timeouts;
                log(node, action_name(a), o.timed_out ? "timeout " + o.target : "ok " + o.target, o.payload);
                report_.polls.push_back(std::move(o));
              },
              [&](const Deferred& d) {
                deferred_polls_.push_back(d.target);
                log(node, action_name(a), to_string(d.target));
              },
              [&](const Ignored& ig) { log(node, action_name(a), ig.reason); },
          },
          a);
      if (suspended) return;
    }
    if (node == kMaster && master_.phase == MasterPhase::IDLE && !deferred_polls_.empty()) {
      Event e;
      e.kind = EventKind::Poll;
      e.time = now_;
      e.node = kMaster;
      e.target = deferred_polls_.front();
      deferred_polls_.pop_front();
      push(std::move(e));
    }
  }

  // ---- physical layer ------------------------------------------------------

  void start_transmission(int node, const Frame& frame, bool injected) {
    Transmission t;
    t.id = next_tx_id_++;
    t.sender = node;
    t.bytes = encode_frame(frame);
    t.bits = bytes_to_bits(t.bytes);
    t.samples = modulate(t.bits, sc_.modem).samples;
    t.start = now_;
    t.start_sample = static_cast<std::int64_t>(std::llround(to_seconds(now_) * fs_));
    t.end = now_ + samples_to_ps(static_cast<std::int64_t>(t.samples.size()));
    max_tx_samples_ = std::max(max_tx_samples_, t.samples.size());
    ++nodes_[static_cast<std::size_t>(node)].counters.frames_sent;
    log(node, injected ? "send_frame_injected" : "send_frame", "tx=" + std::to_string(t.id), to_hex(t.bytes));

    Event done;
    done.kind = EventKind::TxEnd;
    done.time = t.end;
    done.node = node;
    done.tx_id = t.id;
    done.injected = injected;
    push(std::move(done));
    for (std::size_t r = 0; r < nodes_.size(); ++r) {
      if (static_cast<int>(r) == node) continue;
      Event rx;
      rx.kind = EventKind::RxComplete;
      rx.time = t.end + delay_ps_;
      rx.node = static_cast<int>(r);
      rx.tx_id = t.id;
      push(std::move(rx));
    }
    active_.push_back(std::move(t));
  }

  const Transmission& find_tx(std::int64_t id) const {
    for (const auto& t : active_)
      if (t.id == id) return t;
    throw std::logic_error("transmission " + std::to_string(id) + " no longer buffered");
  }

  void on_tx_end(const Event& e) {
    if (e.injected) return;  // injected frames have no state machine behind them
    if (e.node == kMaster) {
      step_master(master_event::TxDone{});
    } else {
      step_slave(e.node, slave_event::TxDone{});
    }
  }

  bool transmitting_during(int node, const Transmission& t) const {
    for (const auto& u : active_) {
      if (u.sender == node && u.id != t.id && u.start_sample < t.end_sample() && t.start_sample < u.end_sample())
        return true;
    }
    return false;
  }

  void on_rx_complete(const Event& e) {
    const Transmission& t = find_tx(e.tx_id);
    const int r = e.node;
    auto& node = nodes_[static_cast<std::size_t>(r)];

    if (transmitting_during(r, t)) {
      ++node.counters.frames_missed;
      log(r, "rx_missed", "tx=" + std::to_string(t.id) + " receiver was transmitting");
      prune();
      return;
    }

    // Everything on the cable during t's window, seen from receiver r.
    const std::size_t len = t.samples.size() + delay_samples_;
    Waveform clean;
    clean.sample_rate_hz = fs_;
    clean.samples.assign(len, 0.0);
    const std::int64_t w0 = t.start_sample, w1 = t.start_sample + static_cast<std::int64_t>(len);
    for (const auto& u : active_) {
      if (u.sender == r || u.end_sample() <= w0 || u.start_sample >= w1) continue;
      const std::int64_t lo = std::max(w0, u.start_sample), hi = std::min(w1, u.end_sample());
      for (std::int64_t g = lo; g < hi; ++g)
        clean.samples[static_cast<std::size_t>(g - w0)] += u.samples[static_cast<std::size_t>(g - u.start_sample)];
    }

    const Waveform received = propagate(clean, channel_, derive_seed(sc_.seed, static_cast<std::uint64_t>(t.id),
                                                                     static_cast<std::uint64_t>(r)));
    if (opts_.keep_waveforms) waveforms_.emplace_back("tx" + std::to_string(t.id) + "_" + node.name, received);
    const Waveform conditioned = condition(received, sc_.front_end);
    const Bits bits = demodulate(conditioned, sc_.modem, t.bits.size(), delay_samples_);

    std::uint64_t errors = 0;
    for (std::size_t i = 0; i < bits.size(); ++i) errors += bits[i] != t.bits[i];
    report_.link.physical_bits += bits.size();
    report_.link.bit_errors += errors;

    const Bytes bytes = bits_to_bytes(bits);
    const DecodeResult decoded = decode_frame(bytes);
    if (const auto* err = std::get_if<CodecError>(&decoded)) {
      ++node.counters.decode_errors;
      log(r, "decode_error",
          std::string(to_string(err->kind)) + " offset=" + std::to_string(err->offset) + " tx=" + std::to_string(t.id),
          to_hex(bytes));
      prune();
      return;
    }

    const Frame& frame = std::get<Frame>(decoded);
    log(r, "frame_received", "tx=" + std::to_string(t.id) + " bit_errors=" + std::to_string(errors), to_hex(bytes));
    const std::size_t before = report_.timeline.size();
    if (r == kMaster) {
      step_master(master_event::FrameReceived{frame});
    } else {
      step_slave(r, slave_event::FrameReceived{frame});
    }
    // Accepted iff the machine reacted with something other than "ignored".
    const bool accepted = report_.timeline.size() > before && report_.timeline[before].action != "ignored";
    if (accepted) {
      ++node.counters.frames_received;
    } else {
      ++node.counters.frames_filtered;
    }
    prune();
  }

  void prune() {
    const std::int64_t now_sample = static_cast<std::int64_t>(std::llround(to_seconds(now_) * fs_));
    const std::int64_t horizon = now_sample - static_cast<std::int64_t>(delay_samples_ + 2 * max_tx_samples_);
    std::erase_if(active_, [&](const Transmission& t) { return t.end_sample() < horizon; });
  }

  const Scenario& sc_;
  SimulationOptions opts_;
  ModeTable modes_;
  ChannelConfig channel_;
  double fs_ = 0.0;
  std::size_t delay_samples_ = 0;
  SimTime delay_ps_ = 0;

  MasterState master_;
  std::vector<SlaveState> slaves_;
  std::vector<NodeRuntime> nodes_;
  std::vector<UnitBudget> budgets_;

  std::priority_queue<Event, std::vector<Event>, Later> queue_;
  std::uint64_t next_seq_ = 0;
  SimTime now_ = 0;
  std::deque<Address> deferred_polls_;

  std::vector<Transmission> active_;
  std::int64_t next_tx_id_ = 0;
  std::size_t max_tx_samples_ = 0;

  Report report_;
  std::vector<std::pair<std::string, Waveform>> waveforms_;
};

}  // namespace

void Scenario::validate() const {
  auto wrap = [](const std::string& path, auto&& fn) {
    try {
      fn();
    } catch (const std::invalid_argument& e) {
      throw ConfigInvalid(path, e.what());
    } catch (const ChannelError& e) {
      throw ConfigInvalid(path, e.what());
    }
  };
  if (!(duration_s > 0)) throw ConfigInvalid("duration_s", "must be > 0");
  wrap("modem", [&] { modem.validate(); });
  wrap("channel", [&] { channel.validate(); });
  wrap("front_end", [&] { front_end.validate(); });
  if (!(modem.sample_rate_hz() > 2.0 * front_end.center_hz))
    throw ConfigInvalid("front_end.center_hz", "must be below half the sample rate");
  if (ebn0_db && !std::isfinite(*ebn0_db)) throw ConfigInvalid("channel.ebn0_db", "must be finite");
  wrap("master.budget", [&] { master.budget.validate(); });
  if (master.timeout_s && !(*master.timeout_s > 0)) throw ConfigInvalid("master.timeout_s", "must be > 0");
  if (master.retries < 0) throw ConfigInvalid("master.retries", "must be >= 0");

  std::set<Address> seen;
  for (std::size_t i = 0; i < slaves.size(); ++i) {
    const std::string p = "slaves[" + std::to_string(i) + "]";
    if (!seen.insert(slaves[i].address).second) throw ConfigInvalid(p + ".address", "duplicate address");
    if (slaves[i].mode == SlaveMode::Sensor) {
      try {
        encode_temperature(slaves[i].temperature_c);
      } catch (const NodeError& e) {
        throw ConfigInvalid(p + ".temperature_c", e.what());
      }
    }
    if (!(slaves[i].acquire_time_s >= 0)) throw ConfigInvalid(p + ".acquire_time_s", "must be >= 0");
    wrap(p + ".budget", [&] { slaves[i].budget.validate(); });
  }
  for (std::size_t i = 0; i < poll_schedule.size(); ++i) {
    const double t = poll_schedule[i].time_s;
    if (!(t >= 0 && t <= duration_s))
      throw ConfigInvalid("poll_schedule[" + std::to_string(i) + "].time_s", "outside [0, duration_s]");
  }
  for (std::size_t i = 0; i < collision_injections.size(); ++i) {
    const auto& c = collision_injections[i];
    const std::string p = "collision_injections[" + std::to_string(i) + "]";
    if (!(c.time_s >= 0 && c.time_s <= duration_s)) throw ConfigInvalid(p + ".time_s", "outside [0, duration_s]");
    if (c.node < 0 || c.node > static_cast<int>(slaves.size())) throw ConfigInvalid(p + ".node", "no such node");
  }
}

double frame_airtime_s(const ModemConfig& modem, std::size_t frame_bytes) {
  return static_cast<double>((8 * frame_bytes + 1) * static_cast<std::size_t>(modem.samples_per_bit())) /
         modem.sample_rate_hz();
}

double default_master_timeout_s(const ModemConfig& modem) {
  const double command = frame_airtime_s(modem, kFrameOverhead + kAcquireCommand.size());
  const double reply = frame_airtime_s(modem, kFrameOverhead + 2);
  const double wake = ModeTable::defaults().at(PowerModeName::STOP1).wakeup_time_s;
  return 2.0 * (command + wake + reply);
}

SimulationResult simulate(const Scenario& sc, const SimulationOptions& opts) {
  sc.validate();
  return Simulator(sc, opts).run();
}

std::vector<BerPoint> measure_ber(const ModemConfig& modem, const std::vector<double>& ebn0_db, std::size_t n_bits,
                                  std::uint64_t seed) {
  if (n_bits < 10000) throw std::invalid_argument("measure_ber needs at least 10^4 bits per point");
  modem.validate();
  std::vector<BerPoint> out;
  out.reserve(ebn0_db.size());
  for (std::size_t i = 0; i < ebn0_db.size(); ++i) {
    const double lin = db_to_linear(ebn0_db[i]);
    const BerCount c = kernels::count_dpsk_errors(modem, lin, n_bits, derive_seed(seed, i));
    out.push_back({ebn0_db[i], c.ber(), c.bits, c.errors, theoretical_dpsk_ber(lin)});
  }
  return out;
}

}  // namespace ucsim
