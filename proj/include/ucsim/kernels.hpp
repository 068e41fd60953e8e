// SPDX-License-Identifier: Apache-2.0
//
// kernels.hpp
// Data-parallel inner loops of the modem. `kernels::` are the OpenMP
// versions used by the library; `reference::` are straightforward serial
// versions evaluated directly from the closed-form signal definition. The
// reference side is only used by tests and the benchmark.

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "ucsim/dpsk_modem.hpp"

namespace ucsim {

struct BerCount {
  std::uint64_t bits = 0;
  std::uint64_t errors = 0;

  double ber() const { return bits ? static_cast<double>(errors) / static_cast<double>(bits) : 0.0; }
  friend bool operator==(const BerCount&, const BerCount&) = default;
};

/// Monte Carlo trials are split into blocks of this many bits; block b draws
/// its bits and noise from derive_seed(seed, b).
constexpr std::size_t kBerBlockBits = 2048;

namespace kernels {

/// out[k*sps + i] = amplitude * polarity[k] * cycle[i % cycle.size()]
void fill_symbols(std::span<double> out, std::span<const std::int8_t> polarity, std::span<const double> cycle,
                  int samples_per_symbol, double amplitude);

/// Per-symbol I/Q correlation of `n_symbols` consecutive symbols.
void correlate_symbols(std::span<const double> samples, int samples_per_symbol, std::span<const double> cos_cycle,
                       std::span<const double> sin_cycle, std::span<double> in_phase, std::span<double> quadrature);

/// stat[k] = sum_i s[(k+1)*sps + i] * s[k*sps + i]
void product_statistics(std::span<const double> samples, int samples_per_symbol, std::span<double> stat);

BerCount count_dpsk_errors(const ModemConfig& cfg, double ebn0_linear, std::size_t n_bits, std::uint64_t seed);

}  // namespace kernels

namespace reference {

Waveform modulate(std::span<const std::uint8_t> bits, const ModemConfig& cfg);
std::vector<double> symbol_statistics(const Waveform& wave, const ModemConfig& cfg, std::size_t n_bits,
                                      std::size_t offset = 0);
Bits demodulate(const Waveform& wave, const ModemConfig& cfg, std::size_t n_bits, std::size_t offset = 0);
BerCount count_dpsk_errors(const ModemConfig& cfg, double ebn0_linear, std::size_t n_bits, std::uint64_t seed);

}  // namespace reference

}  // namespace ucsim
