// SPDX-License-Identifier: Apache-2.0
//
// acceptance.hpp
// End-to-end acceptance checks, shared by the test binary and `ucsim validate`.

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "ucsim/sim_harness.hpp"

namespace ucsim {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

std::vector<CriterionResult> run_acceptance();

/// One "PASS|FAIL <id> <name>: <detail>" line per criterion; returns true if all passed.
bool print_acceptance(std::ostream& os, const std::vector<CriterionResult>& results);

/// Five sensor/function-test slaves on the 700 m cable at 115200 bit/s,
/// `polls_per_slave` round-robin polls, 20 dB Eb/N0.
Scenario multi_point_scenario(int polls_per_slave = 100);

}  // namespace ucsim
