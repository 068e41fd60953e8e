// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <random>
#include <sstream>

#include "ucsim/power_model.hpp"

using namespace ucsim;

TEST_CASE("mode table") {
  const ModeTable t = ModeTable::defaults();
  CHECK(t.at(PowerModeName::RUN).mcu_current_ua == 12000.0);
  CHECK(t.at(PowerModeName::LPRUN).mcu_current_ua == 3350.0);
  CHECK(t.at(PowerModeName::SLEEP).mcu_current_ua == 1200.0);
  CHECK(t.at(PowerModeName::STOP1).mcu_current_ua == 566.0);
  CHECK(t.at(PowerModeName::SHUTDOWN).mcu_current_ua == 0.23);
  CHECK(t.at(PowerModeName::SLEEP).wakeup_time_s == doctest::Approx(6.0 / 80e6));
  CHECK(t.at(PowerModeName::SHUTDOWN).wakeup_time_s == doctest::Approx(306e-6));
  CHECK(t.with_standby_folded().at(PowerModeName::STOP1).mcu_current_ua == 0.0);
  CHECK(t.with_standby_folded().at(PowerModeName::RUN).mcu_current_ua == 12000.0);
  for (auto m : {PowerModeName::RUN, PowerModeName::LPRUN, PowerModeName::SLEEP, PowerModeName::STOP1,
                 PowerModeName::SHUTDOWN})
    CHECK(parse_power_mode(to_string(m)) == m);
  CHECK_THROWS_AS(parse_power_mode("STOP2"), std::invalid_argument);
}

TEST_CASE("standby current and gating") {
  UnitBudget b;
  CHECK(standby_current(b) == doctest::Approx(660.0));
  b.gating.carrier = false;
  CHECK(standby_current(b) == doctest::Approx(530.0));
  b.gating = Gating::all_off();
  CHECK(standby_current(b) == 0.0);
  CHECK(b.transmit_burst_ua == doctest::Approx(13636.36).epsilon(1e-5));

  Gating tx = Gating::all_on();
  tx.transmitting = true;
  CHECK(unit_current(UnitBudget{}, tx) == doctest::Approx(530.0 + 0.045 / 3.3 * 1e6));
  for (int m = 0; m < 32; ++m) CHECK(Gating::from_bitmask(static_cast<std::uint8_t>(m)).bitmask() == m);
}

TEST_CASE("standby current is monotone in the enabled units") {
  const UnitBudget base;
  for (int m = 0; m < 16; ++m) {
    for (int bit = 0; bit < 4; ++bit) {
      if (m & (1 << bit)) continue;
      UnitBudget lo = base, hi = base;
      lo.gating = Gating::from_bitmask(static_cast<std::uint8_t>(m));
      hi.gating = Gating::from_bitmask(static_cast<std::uint8_t>(m | (1 << bit)));
      CHECK(standby_current(hi) >= standby_current(lo));
    }
  }
}

TEST_CASE("transitions") {
  const auto t = transition(PowerModeName::STOP1, PowerModeName::RUN);
  CHECK(t.allowed);
  CHECK(t.latency_s == doctest::Approx(7.8e-6));
  CHECK(transition(PowerModeName::RUN, PowerModeName::STOP1).allowed);
  CHECK(transition(PowerModeName::RUN, PowerModeName::STOP1).latency_s == 0.0);
  CHECK(transition(PowerModeName::SHUTDOWN, PowerModeName::RUN).latency_s == doctest::Approx(306e-6));
  CHECK(transition(PowerModeName::LPRUN, PowerModeName::RUN).latency_s == doctest::Approx(64e-6));
  CHECK_FALSE(transition(PowerModeName::STOP1, PowerModeName::SHUTDOWN).allowed);
  CHECK_FALSE(transition(PowerModeName::SLEEP, PowerModeName::LPRUN).allowed);
}

TEST_CASE("charge integration") {
  const ModeTable modes = ModeTable::defaults();
  UnitBudget off;
  off.gating = Gating::all_off();

  EnergyTrace stop{{{PowerModeName::STOP1, Gating::all_off(), 3600.0}}};
  CHECK(charge_consumed(stop, off, modes).microamp_hours == doctest::Approx(566.0));

  EnergyTrace run{{{PowerModeName::RUN, Gating::all_off(), 7200.0}}};
  const Charge c = charge_consumed(run, off, modes);
  CHECK(c.microamp_hours == doctest::Approx(24000.0));
  CHECK(c.joules == doctest::Approx(24000e-6 * 3600 * 3.7));

  EnergyTrace folded{{{PowerModeName::STOP1, Gating::all_on(), 3600.0}}};
  CHECK(charge_consumed(folded, UnitBudget{}, modes.with_standby_folded()).microamp_hours == doctest::Approx(660.0));
}

TEST_CASE("property: charge is additive over concatenated traces") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> dur(0.0, 10.0);
  const ModeTable modes = ModeTable::defaults();
  const UnitBudget b;
  for (int trial = 0; trial < 50; ++trial) {
    EnergyTrace a, c, joined;
    for (int i = 0; i < 6; ++i) {
      EnergyRecord r{static_cast<PowerModeName>(rng() % 5), Gating::from_bitmask(static_cast<std::uint8_t>(rng() % 32)),
                     dur(rng)};
      (i < 3 ? a : c).records.push_back(r);
      joined.records.push_back(r);
    }
    CHECK(charge_consumed(joined, b, modes).microamp_hours ==
          doctest::Approx(charge_consumed(a, b, modes).microamp_hours + charge_consumed(c, b, modes).microamp_hours));
  }
}

TEST_CASE("battery life") {
  const UnitBudget b;
  const std::vector<DutyEntry> standby{{PowerModeName::STOP1, Gating::all_on(), 1.0}};
  CHECK(battery_life(1000, standby, b, ModeTable::defaults().with_standby_folded()) ==
        doctest::Approx(1515.15).epsilon(1e-4));

  const std::vector<DutyEntry> busy{{PowerModeName::RUN, Gating::all_off(), 1.0}};
  CHECK(battery_life(1000, busy, b, ModeTable::defaults()) == doctest::Approx(83.33).epsilon(1e-3));

  const std::vector<DutyEntry> mixed{{PowerModeName::RUN, Gating::all_off(), 0.5},
                                     {PowerModeName::STOP1, Gating::all_off(), 0.5}};
  CHECK(battery_life(1000, mixed, b, ModeTable::defaults()) == doctest::Approx(1e6 / (0.5 * 12000 + 0.5 * 566)));

  const std::vector<DutyEntry> bad{{PowerModeName::RUN, Gating::all_off(), 0.5},
                                   {PowerModeName::STOP1, Gating::all_off(), 0.4}};
  CHECK_THROWS_AS(battery_life(1000, bad, b, ModeTable::defaults()), PowerError);
}

TEST_CASE("trace CSV round trip") {
  EnergyTrace t{{{PowerModeName::RUN, Gating::all_on(), 1e-5},
                 {PowerModeName::STOP1, Gating::from_bitmask(5), 0.123456789012345},
                 {PowerModeName::SHUTDOWN, Gating::all_off(), 7.0}}};
  std::stringstream ss;
  write_trace_csv(ss, t);
  CHECK(read_trace_csv(ss) == t);

  std::stringstream bad("mode,gating,duration_s\nRUN,99,1\n");
  CHECK_THROWS_AS(read_trace_csv(bad), std::invalid_argument);
}
