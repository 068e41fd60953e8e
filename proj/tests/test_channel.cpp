// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <numbers>

#include "ucsim/channel.hpp"
#include "ucsim/dpsk_modem.hpp"

using namespace ucsim;

namespace {

constexpr double kFs = 16 * 1.67e6;

Waveform tone(double freq_hz, double amplitude, std::size_t n) {
  Waveform w{std::vector<double>(n), kFs};
  for (std::size_t i = 0; i < n; ++i)
    w.samples[i] = amplitude * std::cos(2 * std::numbers::pi * freq_hz * static_cast<double>(i) / kFs);
  return w;
}

double tail_peak(const Waveform& w, std::size_t skip) {
  double p = 0;
  for (std::size_t i = skip; i < w.size(); ++i) p = std::max(p, std::abs(w.samples[i]));
  return p;
}

// Analog band-pass magnitude at the bilinear-warped frequency.
double band_pass_gain_oracle(const FrontEndConfig& fe, double f) {
  const double warped = std::tan(std::numbers::pi * f / kFs) / std::tan(std::numbers::pi * fe.center_hz / kFs);
  const double detune = fe.quality_factor * (warped - 1.0 / warped);
  return fe.passband_gain / std::sqrt(1.0 + detune * detune);
}

ChannelConfig quiet(int turns = 4) {
  ChannelConfig c;
  c.turns = turns;
  c.cable_length_m = 0;
  return c;
}

}  // namespace

TEST_CASE("coupling gain table") {
  const double mv[] = {264, 284, 392, 308, 296, 296, 260};
  for (int t = 2; t <= 8; ++t) CHECK(coupling_gain(t) == doctest::Approx(mv[t - 2] / 12000.0));
  CHECK(coupling_gain(4) > coupling_gain(3));
  CHECK(coupling_gain(4) > coupling_gain(5));
  CHECK_THROWS_AS(coupling_gain(9), ChannelError);
  CHECK_THROWS_AS(coupling_gain(1), ChannelError);
}

TEST_CASE("propagate: 12 V carrier, 4 turns, no noise") {
  const Waveform in = tone(1.67e6, 12.0, 4000);
  const Waveform out = propagate(in, quiet(4), 1);
  REQUIRE(out.size() == in.size());
  CHECK(tail_peak(out, 0) == doctest::Approx(0.392).epsilon(0.005));
}

TEST_CASE("propagate: delay, zero length, determinism, linearity") {
  ChannelConfig c = quiet();
  c.cable_length_m = 700;
  CHECK(c.delay_samples(kFs) == 94);
  Waveform impulse{std::vector<double>(200, 0.0), kFs};
  impulse.samples[0] = 1.0;
  const Waveform shifted = propagate(impulse, c, 0);
  CHECK(shifted.samples[94] == doctest::Approx(coupling_gain(4)));
  for (std::size_t i = 0; i < 200; ++i)
    if (i != 94) CHECK(shifted.samples[i] == 0.0);

  CHECK(propagate(Waveform{{}, kFs}, c, 3).size() == 0);

  c.noise_sigma_v = 0.01;
  const Waveform in = tone(1.67e6, 1.0, 1000);
  CHECK(propagate(in, c, 7).samples == propagate(in, c, 7).samples);
  CHECK(propagate(in, c, 7).samples != propagate(in, c, 8).samples);

  c.noise_sigma_v = 0;
  c.attenuation_per_m = 1e-4;
  const Waveform a = tone(1.67e6, 1.0, 500), b = tone(0.9e6, 2.0, 500);
  Waveform mix{std::vector<double>(500), kFs};
  for (std::size_t i = 0; i < 500; ++i) mix.samples[i] = 3 * a.samples[i] - 0.5 * b.samples[i];
  const Waveform pa = propagate(a, c, 0), pb = propagate(b, c, 0), pm = propagate(mix, c, 0);
  for (std::size_t i = 0; i < 500; ++i) CHECK(std::abs(pm.samples[i] - (3 * pa.samples[i] - 0.5 * pb.samples[i])) < 1e-9);
}

TEST_CASE("propagate: interference tone is added after the link") {
  ChannelConfig c = quiet();
  c.interference.push_back({50e3, 0.2});
  const Waveform out = propagate(Waveform{std::vector<double>(100, 0.0), kFs}, c, 0);
  CHECK(out.samples[0] == doctest::Approx(0.2));
}

TEST_CASE("condition: passband gain after the transient") {
  const FrontEndConfig fe;
  const Waveform out = condition(tone(1.67e6, 0.392, 6000), fe);
  CHECK(tail_peak(out, 3000) == doctest::Approx(1.176).epsilon(0.02));
  CHECK(band_pass_gain_oracle(fe, 1.67e6) == doctest::Approx(3.0));
}

TEST_CASE("condition: magnitude follows the independent response oracle") {
  const FrontEndConfig fe;
  for (double f : {50e3, 400e3, 1.0e6, 1.67e6, 2.5e6, 5e6}) {
    const Waveform out = condition(tone(f, 1.0, 40000), fe);
    INFO("f = " << f);
    CHECK(tail_peak(out, 20000) == doctest::Approx(band_pass_gain_oracle(fe, f)).epsilon(0.02));
  }
  const Waveform low = condition(tone(50e3, 1.0, 40000), fe);
  CHECK(20 * std::log10(tail_peak(low, 20000) / 3.0) < -20.0);
}

TEST_CASE("condition: zero in, zero out; invalid rate") {
  const Waveform out = condition(Waveform{std::vector<double>(300, 0.0), kFs}, FrontEndConfig{});
  for (double s : out.samples) CHECK(s == 0.0);
  CHECK_THROWS_AS(condition(Waveform{{1.0}, 3e6}, FrontEndConfig{}), ChannelError);
}

TEST_CASE("superpose") {
  const Waveform w = tone(1.67e6, 1.0, 50);
  CHECK(superpose(std::vector<Waveform>{w}).samples == w.samples);
  Waveform neg = w;
  for (double& s : neg.samples) s = -s;
  for (double s : superpose(std::vector<Waveform>{w, neg}).samples) CHECK(s == 0.0);
  const Waveform shorter = tone(1.67e6, 1.0, 20);
  CHECK(superpose(std::vector<Waveform>{shorter, w}).size() == 50);
  CHECK_THROWS_AS(superpose(std::vector<Waveform>{w, Waveform{{0.0}, 1e6}}), ChannelError);
}
