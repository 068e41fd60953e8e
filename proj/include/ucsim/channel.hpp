// SPDX-License-Identifier: Apache-2.0
//
// channel.hpp
// Linear inductive-coupling link: a measured coupling gain per coil turn
// count, optional cable loss, cable delay, interference tones and AWGN,
// followed by the receive front end (one band-pass biquad with gain).

#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "ucsim/waveform.hpp"

namespace ucsim {

struct InterferenceTone {
  double freq_hz = 0.0;
  double amplitude_v = 0.0;

  friend bool operator==(const InterferenceTone&, const InterferenceTone&) = default;
};

struct ChannelConfig {
  int turns = 4;
  double cable_length_m = 700.0;
  double attenuation_per_m = 0.0;  // nepers/m, amplitude
  double noise_sigma_v = 0.0;
  std::vector<InterferenceTone> interference;
  double propagation_speed_mps = 2e8;

  void validate() const;
  /// coupling_gain(turns) * exp(-attenuation_per_m * cable_length_m)
  double amplitude_gain() const;
  std::size_t delay_samples(double sample_rate_hz) const;
};

struct FrontEndConfig {
  double center_hz = 1.67e6;
  double passband_gain = 3.0;
  double quality_factor = 1.0;

  void validate() const;
};

class ChannelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Receive/transmit amplitude ratio measured at 12.0 V drive, turns 2..8.
/// Throws ChannelError (out of table) otherwise.
double coupling_gain(int turns);

/// Output has the input's length and sample rate; the cable delay shifts the
/// signal right and the tail beyond the input length is dropped.
Waveform propagate(const Waveform& wave, const ChannelConfig& cfg, std::uint64_t seed);

/// Normalised biquad, a0 == 1.
struct Biquad {
  double b0 = 1, b1 = 0, b2 = 0, a1 = 0, a2 = 0;
};

/// Band-pass, -3 dB bandwidth center/Q, peak gain `passband_gain` at the
/// centre, bilinear transform prewarped at the centre frequency.
Biquad design_band_pass(const FrontEndConfig& fe, double sample_rate_hz);

/// Runs the front-end filter over the whole waveform from zero state.
Waveform condition(const Waveform& wave, const FrontEndConfig& fe);

/// Sample-wise sum; shorter inputs are zero-padded to the longest.
/// Throws ChannelError on a sample-rate mismatch.
Waveform superpose(std::span<const Waveform> waves);

}  // namespace ucsim
