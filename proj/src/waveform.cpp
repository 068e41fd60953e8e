// SPDX-License-Identifier: Apache-2.0

#include "ucsim/waveform.hpp"

#include <cstdio>
#include <ostream>

namespace ucsim {

void write_waveform_csv(std::ostream& os, const Waveform& wave) {
  os << "time_s,volts\n";
  char line[64];
  for (std::size_t i = 0; i < wave.samples.size(); ++i) {
    std::snprintf(line, sizeof line, "%.9e,%.9e\n", static_cast<double>(i) / wave.sample_rate_hz, wave.samples[i]);
    os << line;
  }
}

}  // namespace ucsim
