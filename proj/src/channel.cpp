// SPDX-License-Identifier: Apache-2.0

#include "ucsim/channel.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "ucsim/dpsk_modem.hpp"

namespace ucsim {

namespace {

// Receiver amplitude in mV at 12.0 V transmit, indexed by turns - 2.
constexpr std::array<double, 7> kReceiveMillivolts = {264, 284, 392, 308, 296, 296, 260};
constexpr double kTransmitMillivolts = 12000.0;

}  // namespace

double coupling_gain(int turns) {
  if (turns < 2 || turns > 8) throw ChannelError("turns " + std::to_string(turns) + " outside the measured table (2..8)");
  return kReceiveMillivolts[static_cast<std::size_t>(turns - 2)] / kTransmitMillivolts;
}

void ChannelConfig::validate() const {
  if (turns < 2 || turns > 8) throw std::invalid_argument("channel.turns must be in 2..8");
  if (!(cable_length_m >= 0)) throw std::invalid_argument("channel.cable_length_m must be >= 0");
  if (!(attenuation_per_m >= 0)) throw std::invalid_argument("channel.attenuation_per_m must be >= 0");
  if (!(noise_sigma_v >= 0)) throw std::invalid_argument("channel.noise_sigma_v must be >= 0");
  if (!(propagation_speed_mps > 0)) throw std::invalid_argument("channel.propagation_speed_mps must be > 0");
  for (std::size_t i = 0; i < interference.size(); ++i) {
    if (!(interference[i].freq_hz >= 0) || !(interference[i].amplitude_v >= 0))
      throw std::invalid_argument("channel.interference[" + std::to_string(i) + "] must be nonnegative");
  }
}

double ChannelConfig::amplitude_gain() const {
  return coupling_gain(turns) * std::exp(-attenuation_per_m * cable_length_m);
}

std::size_t ChannelConfig::delay_samples(double sample_rate_hz) const {
  return static_cast<std::size_t>(std::llround(cable_length_m / propagation_speed_mps * sample_rate_hz));
}

void FrontEndConfig::validate() const {
  if (!(center_hz > 0)) throw std::invalid_argument("front_end.center_hz must be > 0");
  if (!(passband_gain > 0)) throw std::invalid_argument("front_end.passband_gain must be > 0");
  if (!(quality_factor > 0)) throw std::invalid_argument("front_end.quality_factor must be > 0");
}

Waveform propagate(const Waveform& wave, const ChannelConfig& cfg, std::uint64_t seed) {
  Waveform out;
  out.sample_rate_hz = wave.sample_rate_hz;
  out.samples.assign(wave.size(), 0.0);
  if (wave.size() == 0) return out;

  const double gain = cfg.amplitude_gain();
  const std::size_t delay = cfg.delay_samples(wave.sample_rate_hz);
  for (std::size_t i = delay; i < out.size(); ++i) out.samples[i] = gain * wave.samples[i - delay];

  for (const auto& tone : cfg.interference) {
    const double w = 2.0 * std::numbers::pi * tone.freq_hz / wave.sample_rate_hz;
    for (std::size_t i = 0; i < out.size(); ++i) out.samples[i] += tone.amplitude_v * std::cos(w * static_cast<double>(i));
  }
  add_gaussian_noise(out.samples, cfg.noise_sigma_v, seed);
  return out;
}

Biquad design_band_pass(const FrontEndConfig& fe, double sample_rate_hz) {
  // Analog prototype H(s) = G (w0/Q) s / (s^2 + (w0/Q) s + w0^2), mapped with
  // s = K (1 - z^-1)/(1 + z^-1), K = w0 / tan(w0 T / 2).
  const double wd = 2.0 * std::numbers::pi * fe.center_hz / sample_rate_hz;
  const double alpha = std::sin(wd) / (2.0 * fe.quality_factor);
  const double a0 = 1.0 + alpha;
  Biquad q;
  q.b0 = fe.passband_gain * alpha / a0;
  q.b1 = 0.0;
  q.b2 = -fe.passband_gain * alpha / a0;
  q.a1 = -2.0 * std::cos(wd) / a0;
  q.a2 = (1.0 - alpha) / a0;
  return q;
}

Waveform condition(const Waveform& wave, const FrontEndConfig& fe) {
  if (!(wave.sample_rate_hz > 2.0 * fe.center_hz))
    throw ChannelError("front end: sample rate must exceed twice the centre frequency");
  const Biquad q = design_band_pass(fe, wave.sample_rate_hz);
  Waveform out;
  out.sample_rate_hz = wave.sample_rate_hz;
  out.samples.resize(wave.size());
  // transposed direct form II
  double z1 = 0.0, z2 = 0.0;
  for (std::size_t i = 0; i < wave.size(); ++i) {
    const double x = wave.samples[i];
    const double y = q.b0 * x + z1;
    z1 = q.b1 * x - q.a1 * y + z2;
    z2 = q.b2 * x - q.a2 * y;
    out.samples[i] = y;
  }
  return out;
}

Waveform superpose(std::span<const Waveform> waves) {
  Waveform out;
  if (waves.empty()) return out;
  out.sample_rate_hz = waves.front().sample_rate_hz;
  std::size_t n = 0;
  for (const auto& w : waves) {
    if (w.sample_rate_hz != out.sample_rate_hz) throw ChannelError("superpose: sample rate mismatch");
    n = std::max(n, w.size());
  }
  out.samples.assign(n, 0.0);
  for (const auto& w : waves)
    for (std::size_t i = 0; i < w.size(); ++i) out.samples[i] += w.samples[i];
  return out;
}

}  // namespace ucsim
