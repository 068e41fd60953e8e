// SPDX-License-Identifier: Apache-2.0
//
// dpsk_modem.hpp
// Sampled passband DPSK at an integer number of carrier cycles per symbol.
// Bit 1 flips the carrier phase by pi, bit 0 keeps it. A reference symbol
// of phase 0 precedes the data.

#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "ucsim/frame_codec.hpp"
#include "ucsim/waveform.hpp"

namespace ucsim {

using Bits = std::vector<std::uint8_t>;

enum class Detector {
  /// Per-symbol I/Q correlation against the carrier, then Re(z[k] conj z[k-1]).
  kCarrierCorrelation,
  /// Raw sample-by-sample product with the previous symbol.
  kSampleProduct,
};

struct ModemConfig {
  double carrier_hz = 1.67e6;
  int samples_per_cycle = 16;
  double bit_rate_bps = 115200.0;
  double amplitude_v = 12.0;
  Detector detector = Detector::kCarrierCorrelation;

  double sample_rate_hz() const { return carrier_hz * samples_per_cycle; }
  int cycles_per_bit() const;
  int samples_per_bit() const { return cycles_per_bit() * samples_per_cycle; }
  double effective_bit_rate() const { return carrier_hz / cycles_per_bit(); }

  /// Throws std::invalid_argument naming the offending field.
  void validate() const;
};

class InsufficientSamples : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// LSB first within each byte.
Bits bytes_to_bits(std::span<const std::uint8_t> bytes);
/// Inverse of bytes_to_bits; a trailing partial byte is dropped.
Bytes bits_to_bytes(std::span<const std::uint8_t> bits);

/// |bits| + 1 phases in {0, pi}; phase[0] is the reference.
std::vector<double> diff_encode(std::span<const std::uint8_t> bits);

Waveform modulate(std::span<const std::uint8_t> bits, const ModemConfig& cfg);

/// Decision statistics for symbols 1..n_bits of `wave`, starting at sample
/// `offset`. Negative means a phase flip.
std::vector<double> symbol_statistics(const Waveform& wave, const ModemConfig& cfg, std::size_t n_bits,
                                      std::size_t offset = 0);

Bits demodulate(const Waveform& wave, const ModemConfig& cfg, std::size_t n_bits, std::size_t offset = 0);

/// Differential detection of binary DPSK in AWGN: 0.5 exp(-Eb/N0).
double theoretical_dpsk_ber(double ebn0_linear);

/// Per-sample noise std dev giving the requested Eb/N0 for a carrier of
/// `amplitude_v` and `samples_per_bit` samples per bit.
double ebn0_to_noise_sigma(double ebn0_linear, double amplitude_v, int samples_per_bit);
inline double ebn0_to_noise_sigma(double ebn0_linear, const ModemConfig& cfg) {
  return ebn0_to_noise_sigma(ebn0_linear, cfg.amplitude_v, cfg.samples_per_bit());
}

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

/// Adds N(0, sigma^2) to every sample from a generator seeded with `seed`.
void add_gaussian_noise(std::span<double> samples, double sigma, std::uint64_t seed);

}  // namespace ucsim
