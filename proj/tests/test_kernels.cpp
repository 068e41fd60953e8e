// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <random>

#include "ucsim/kernels.hpp"

using namespace ucsim;

namespace {

Bits random_bits(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Bits b(n);
  for (auto& x : b) x = static_cast<std::uint8_t>(rng() & 1U);
  return b;
}

}  // namespace

TEST_CASE("parallel modulate matches the closed-form reference") {
  for (double rate : {4800.0, 115200.0}) {
    ModemConfig cfg;
    cfg.bit_rate_bps = rate;
    const Bits b = random_bits(rate == 4800.0 ? 300 : 5000, 3);
    const Waveform fast = modulate(b, cfg);
    const Waveform slow = reference::modulate(b, cfg);
    REQUIRE(fast.size() == slow.size());
    double worst = 0;
    for (std::size_t i = 0; i < fast.size(); ++i) worst = std::max(worst, std::abs(fast.samples[i] - slow.samples[i]));
    CHECK(worst <= 1e-9 * cfg.amplitude_v);
  }
}

TEST_CASE("parallel statistics and decisions match the reference on noisy input") {
  for (Detector d : {Detector::kCarrierCorrelation, Detector::kSampleProduct}) {
    ModemConfig cfg;
    cfg.detector = d;
    const Bits b = random_bits(6000, 8);
    Waveform w = modulate(b, cfg);
    add_gaussian_noise(w.samples, ebn0_to_noise_sigma(db_to_linear(8.0), cfg), 21);
    const auto fast = symbol_statistics(w, cfg, b.size());
    const auto slow = reference::symbol_statistics(w, cfg, b.size());
    REQUIRE(fast.size() == slow.size());
    double scale = 0;
    for (double s : slow) scale = std::max(scale, std::abs(s));
    for (std::size_t k = 0; k < fast.size(); ++k) CHECK(std::abs(fast[k] - slow[k]) <= 1e-9 * scale);
    CHECK(demodulate(w, cfg, b.size()) == reference::demodulate(w, cfg, b.size()));
  }
}

TEST_CASE("BER error counts agree between the kernels and the reference") {
  ModemConfig cfg;
  const auto fast = kernels::count_dpsk_errors(cfg, db_to_linear(5.0), 20000, 17);
  const auto slow = reference::count_dpsk_errors(cfg, db_to_linear(5.0), 20000, 17);
  CHECK(fast == slow);
  CHECK(fast.bits == 20000);
  CHECK(fast.errors > 0);
  // partial trailing block
  CHECK(kernels::count_dpsk_errors(cfg, 2.0, 5000, 4) == reference::count_dpsk_errors(cfg, 2.0, 5000, 4));
}
