// SPDX-License-Identifier: Apache-2.0

#include "ucsim/power_model.hpp"

#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>

namespace ucsim {

const char* to_string(PowerModeName m) {
  switch (m) {
    case PowerModeName::RUN: return "RUN";
    case PowerModeName::LPRUN: return "LPRUN";
    case PowerModeName::SLEEP: return "SLEEP";
    case PowerModeName::STOP1: return "STOP1";
    case PowerModeName::SHUTDOWN: return "SHUTDOWN";
  }
  return "?";
}

PowerModeName parse_power_mode(std::string_view s) {
  for (auto m : {PowerModeName::RUN, PowerModeName::LPRUN, PowerModeName::SLEEP, PowerModeName::STOP1,
                 PowerModeName::SHUTDOWN}) {
    if (s == to_string(m)) return m;
  }
  throw std::invalid_argument("unknown power mode '" + std::string(s) + "'");
}

ModeTable ModeTable::defaults() {
  ModeTable t;
  t.at(PowerModeName::RUN) = {PowerModeName::RUN, 12000.0, 0.0};
  t.at(PowerModeName::LPRUN) = {PowerModeName::LPRUN, 3350.0, 64e-6};
  t.at(PowerModeName::SLEEP) = {PowerModeName::SLEEP, 1200.0, 6.0 / 80e6};
  t.at(PowerModeName::STOP1) = {PowerModeName::STOP1, 566.0, 7.8e-6};
  t.at(PowerModeName::SHUTDOWN) = {PowerModeName::SHUTDOWN, 0.23, 306e-6};
  return t;
}

ModeTable ModeTable::with_standby_folded() const {
  ModeTable t = *this;
  t.at(PowerModeName::STOP1).mcu_current_ua = 0.0;
  return t;
}

std::uint8_t Gating::bitmask() const {
  return static_cast<std::uint8_t>((carrier ? 1 : 0) | (signal_processing ? 2 : 0) | (power_conversion ? 4 : 0) |
                                   (master_unit ? 8 : 0) | (transmitting ? 16 : 0));
}

Gating Gating::from_bitmask(std::uint8_t m) {
  return {(m & 1) != 0, (m & 2) != 0, (m & 4) != 0, (m & 8) != 0, (m & 16) != 0};
}

void UnitBudget::validate() const {
  for (double v : {carrier_ua, signal_processing_ua, power_conversion_ua, master_unit_ua, transmit_burst_ua})
    if (!(v >= 0)) throw std::invalid_argument("unit currents must be >= 0");
}

double unit_current(const UnitBudget& b, const Gating& g) {
  double ua = 0.0;
  if (g.carrier) ua += g.transmitting ? b.transmit_burst_ua : b.carrier_ua;
  if (g.signal_processing) ua += b.signal_processing_ua;
  if (g.power_conversion) ua += b.power_conversion_ua;
  if (g.master_unit) ua += b.master_unit_ua;
  return ua;
}

double standby_current(const UnitBudget& budget) {
  Gating g = budget.gating;
  g.transmitting = false;
  return unit_current(budget, g);
}

Transition transition(PowerModeName current, PowerModeName target, const ModeTable& modes) {
  if (current == target) return {0.0, true};
  if (target == PowerModeName::RUN) return {modes.at(current).wakeup_time_s, true};
  if (current == PowerModeName::RUN) return {0.0, true};
  return {0.0, false};
}

Charge charge_consumed(const EnergyTrace& trace, const UnitBudget& budget, const ModeTable& modes) {
  double uah = 0.0;
  for (const auto& r : trace.records) {
    const double ua = modes.at(r.mode).mcu_current_ua + unit_current(budget, r.gating);
    uah += ua * r.duration_s / 3600.0;
  }
  return {uah, uah * 3600.0 * trace.supply_v * 1e-6};
}

double battery_life(double capacity_mah, std::span<const DutyEntry> duty, const UnitBudget& budget,
                    const ModeTable& modes) {
  double total = 0.0, mean_ua = 0.0;
  for (const auto& d : duty) {
    if (d.fraction < 0) throw PowerError("duty fraction must be >= 0");
    total += d.fraction;
    mean_ua += d.fraction * (modes.at(d.mode).mcu_current_ua + unit_current(budget, d.gating));
  }
  if (std::abs(total - 1.0) > 1e-9) throw PowerError("duty fractions sum to " + std::to_string(total) + ", not 1");
  if (mean_ua <= 0) return std::numeric_limits<double>::infinity();
  return capacity_mah * 1000.0 / mean_ua;
}

void write_trace_csv(std::ostream& os, const EnergyTrace& trace) {
  os << "mode,gating,duration_s\n";
  char num[40];
  for (const auto& r : trace.records) {
    std::snprintf(num, sizeof num, "%.17g", r.duration_s);
    os << to_string(r.mode) << ',' << static_cast<int>(r.gating.bitmask()) << ',' << num << '\n';
  }
}

EnergyTrace read_trace_csv(std::istream& is, double supply_v) {
  EnergyTrace trace;
  trace.supply_v = supply_v;
  std::string line;
  std::size_t row = 0;
  while (std::getline(is, line)) {
    ++row;
    if (line.empty() || (row == 1 && line.rfind("mode", 0) == 0)) continue;
    std::stringstream ss(line);
    std::string mode, mask, dur;
    if (!std::getline(ss, mode, ',') || !std::getline(ss, mask, ',') || !std::getline(ss, dur))
      throw std::invalid_argument("trace row " + std::to_string(row) + ": expected 3 columns");
    EnergyRecord r;
    r.mode = parse_power_mode(mode);
    const int m = std::stoi(mask);
    if (m < 0 || m > 31) throw std::invalid_argument("trace row " + std::to_string(row) + ": bad gating mask");
    r.gating = Gating::from_bitmask(static_cast<std::uint8_t>(m));
    r.duration_s = std::stod(dur);
    if (!(r.duration_s >= 0)) throw std::invalid_argument("trace row " + std::to_string(row) + ": negative duration");
    trace.records.push_back(r);
  }
  return trace;
}

}  // namespace ucsim
