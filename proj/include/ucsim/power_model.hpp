// SPDX-License-Identifier: Apache-2.0
//
// power_model.hpp
// Controller operating modes, per-unit static currents with power gating,
// and charge/energy integration over a mode trace.

#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string_view>
#include <vector>

namespace ucsim {

enum class PowerModeName : std::uint8_t { RUN, LPRUN, SLEEP, STOP1, SHUTDOWN };

const char* to_string(PowerModeName m);
/// Throws std::invalid_argument.
PowerModeName parse_power_mode(std::string_view s);

struct PowerMode {
  PowerModeName name;
  double mcu_current_ua;
  double wakeup_time_s;  // time to reach RUN
};

class ModeTable {
 public:
  /// Controller datasheet figures: RUN 12 mA, LPRUN 3.35 mA / 64 us,
  /// SLEEP 1.2 mA / 6 cycles at 80 MHz, STOP1 566 uA / 7.8 us,
  /// SHUTDOWN 0.23 uA / 306 us.
  static ModeTable defaults();

  /// Same table with the STOP1 controller draw set to zero; used for node
  /// profiles whose standby draw is carried entirely by the unit budget.
  ModeTable with_standby_folded() const;

  const PowerMode& at(PowerModeName m) const { return modes_[static_cast<std::size_t>(m)]; }
  PowerMode& at(PowerModeName m) { return modes_[static_cast<std::size_t>(m)]; }

 private:
  std::array<PowerMode, 5> modes_{};
};

/// Per-unit supply switches. `transmitting` selects the carrier unit's
/// active draw instead of its static draw.
struct Gating {
  bool carrier = true;
  bool signal_processing = true;
  bool power_conversion = true;
  bool master_unit = true;
  bool transmitting = false;

  static Gating all_on() { return {}; }
  static Gating all_off() { return {false, false, false, false, false}; }

  /// bit0 carrier, bit1 signal processing, bit2 power conversion,
  /// bit3 master unit, bit4 transmitting
  std::uint8_t bitmask() const;
  static Gating from_bitmask(std::uint8_t m);

  friend bool operator==(const Gating&, const Gating&) = default;
};

struct UnitBudget {
  double carrier_ua = 130.0;
  double signal_processing_ua = 300.0;
  double power_conversion_ua = 180.0;
  double master_unit_ua = 50.0;
  /// Carrier draw while transmitting: 0.045 W at 3.3 V.
  double transmit_burst_ua = 0.045 / 3.3 * 1e6;
  /// Gating applied in standby.
  Gating gating;

  void validate() const;
  friend bool operator==(const UnitBudget&, const UnitBudget&) = default;
};

/// Sum of the static currents of the units enabled in `budget.gating`.
double standby_current(const UnitBudget& budget);
/// Unit draw for an arbitrary gating snapshot.
double unit_current(const UnitBudget& budget, const Gating& gating);

struct Transition {
  double latency_s = 0.0;
  bool allowed = false;
};

/// RUN <-> any low-power mode is allowed; low-power -> RUN costs that mode's
/// wakeup time; low-power -> a different low-power mode is refused.
Transition transition(PowerModeName current, PowerModeName target, const ModeTable& modes = ModeTable::defaults());

struct EnergyRecord {
  PowerModeName mode = PowerModeName::RUN;
  Gating gating;
  double duration_s = 0.0;

  friend bool operator==(const EnergyRecord&, const EnergyRecord&) = default;
};

struct EnergyTrace {
  std::vector<EnergyRecord> records;
  double supply_v = 3.7;

  friend bool operator==(const EnergyTrace&, const EnergyTrace&) = default;
};

struct Charge {
  double microamp_hours = 0.0;
  double joules = 0.0;
};

Charge charge_consumed(const EnergyTrace& trace, const UnitBudget& budget, const ModeTable& modes);

struct DutyEntry {
  PowerModeName mode;
  Gating gating;
  double fraction;
};

class PowerError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// capacity / time-weighted mean current. Throws PowerError when the
/// fractions do not sum to 1 (within 1e-9) or any fraction is negative.
double battery_life(double capacity_mah, std::span<const DutyEntry> duty, const UnitBudget& budget,
                    const ModeTable& modes);

/// CSV with header `mode,gating,duration_s`; gating is the decimal bitmask.
void write_trace_csv(std::ostream& os, const EnergyTrace& trace);
/// Throws std::invalid_argument on malformed rows.
EnergyTrace read_trace_csv(std::istream& is, double supply_v = 3.7);

}  // namespace ucsim
