// SPDX-License-Identifier: Apache-2.0

#include "ucsim/dpsk_modem.hpp"

#include <numbers>
#include <random>
#include <string>

#include "ucsim/kernels.hpp"

namespace ucsim {

namespace {

std::vector<double> cycle_table(int samples_per_cycle, bool sine) {
  std::vector<double> t(static_cast<std::size_t>(samples_per_cycle));
  for (int i = 0; i < samples_per_cycle; ++i) {
    const double theta = 2.0 * std::numbers::pi * i / samples_per_cycle;
    t[static_cast<std::size_t>(i)] = sine ? std::sin(theta) : std::cos(theta);
  }
  return t;
}

void require_samples(const Waveform& wave, const ModemConfig& cfg, std::size_t n_bits, std::size_t offset) {
  const std::size_t need = offset + (n_bits + 1) * static_cast<std::size_t>(cfg.samples_per_bit());
  if (wave.size() < need) {
    throw InsufficientSamples("waveform has " + std::to_string(wave.size()) + " samples, " + std::to_string(need) +
                              " needed for " + std::to_string(n_bits) + " bits");
  }
}

}  // namespace

int ModemConfig::cycles_per_bit() const {
  const long c = std::lround(carrier_hz / bit_rate_bps);
  return c < 1 ? 1 : static_cast<int>(c);
}

void ModemConfig::validate() const {
  if (!(carrier_hz > 0) || !std::isfinite(carrier_hz)) throw std::invalid_argument("modem.carrier_hz must be > 0");
  if (samples_per_cycle < 3) throw std::invalid_argument("modem.samples_per_cycle must be >= 3");
  if (!(bit_rate_bps > 0) || !std::isfinite(bit_rate_bps)) throw std::invalid_argument("modem.bit_rate_bps must be > 0");
  if (!(amplitude_v >= 0) || !std::isfinite(amplitude_v)) throw std::invalid_argument("modem.amplitude_v must be >= 0");
  if (std::abs(effective_bit_rate() - bit_rate_bps) / bit_rate_bps >= 0.04) {
    throw std::invalid_argument("modem.bit_rate_bps: no integer cycles-per-bit within 4% of the requested rate");
  }
}

Bits bytes_to_bits(std::span<const std::uint8_t> bytes) {
  Bits bits;
  bits.reserve(bytes.size() * 8);
  for (std::uint8_t b : bytes)
    for (int i = 0; i < 8; ++i) bits.push_back(static_cast<std::uint8_t>((b >> i) & 1U));
  return bits;
}

Bytes bits_to_bytes(std::span<const std::uint8_t> bits) {
  Bytes out(bits.size() / 8, 0);
  for (std::size_t i = 0; i < out.size() * 8; ++i)
    if (bits[i]) out[i / 8] = static_cast<std::uint8_t>(out[i / 8] | (1U << (i % 8)));
  return out;
}

std::vector<double> diff_encode(std::span<const std::uint8_t> bits) {
  std::vector<double> phase;
  phase.reserve(bits.size() + 1);
  phase.push_back(0.0);
  for (std::uint8_t b : bits) {
    const double prev = phase.back();
    phase.push_back(b ? (prev == 0.0 ? std::numbers::pi : 0.0) : prev);
  }
  return phase;
}

Waveform modulate(std::span<const std::uint8_t> bits, const ModemConfig& cfg) {
  // Phases are only ever 0 or pi, so each symbol is +/- one carrier template.
  std::vector<std::int8_t> polarity;
  polarity.reserve(bits.size() + 1);
  for (double p : diff_encode(bits)) polarity.push_back(p == 0.0 ? 1 : -1);

  const int sps = cfg.samples_per_bit();
  Waveform w;
  w.sample_rate_hz = cfg.sample_rate_hz();
  w.samples.resize(polarity.size() * static_cast<std::size_t>(sps));
  const auto cycle = cycle_table(cfg.samples_per_cycle, false);
  kernels::fill_symbols(w.samples, polarity, cycle, sps, cfg.amplitude_v);
  return w;
}

std::vector<double> symbol_statistics(const Waveform& wave, const ModemConfig& cfg, std::size_t n_bits,
                                      std::size_t offset) {
  require_samples(wave, cfg, n_bits, offset);
  const int sps = cfg.samples_per_bit();
  const std::size_t n_symbols = n_bits + 1;
  std::span<const double> span(wave.samples.data() + offset, n_symbols * static_cast<std::size_t>(sps));
  std::vector<double> stat(n_bits);
  if (n_bits == 0) return stat;

  if (cfg.detector == Detector::kSampleProduct) {
    kernels::product_statistics(span, sps, stat);
    return stat;
  }

  std::vector<double> in_phase(n_symbols), quadrature(n_symbols);
  kernels::correlate_symbols(span, sps, cycle_table(cfg.samples_per_cycle, false),
                             cycle_table(cfg.samples_per_cycle, true), in_phase, quadrature);
  for (std::size_t k = 0; k < n_bits; ++k)
    stat[k] = in_phase[k + 1] * in_phase[k] + quadrature[k + 1] * quadrature[k];
  return stat;
}

Bits demodulate(const Waveform& wave, const ModemConfig& cfg, std::size_t n_bits, std::size_t offset) {
  const auto stat = symbol_statistics(wave, cfg, n_bits, offset);
  Bits bits(n_bits);
  for (std::size_t k = 0; k < n_bits; ++k) bits[k] = stat[k] < 0.0 ? 1 : 0;
  return bits;
}

double theoretical_dpsk_ber(double ebn0_linear) { return 0.5 * std::exp(-ebn0_linear); }

double ebn0_to_noise_sigma(double ebn0_linear, double amplitude_v, int samples_per_bit) {
  if (!(ebn0_linear > 0)) throw std::invalid_argument("Eb/N0 must be > 0");
  return amplitude_v * std::sqrt(samples_per_bit / (4.0 * ebn0_linear));
}

void add_gaussian_noise(std::span<double> samples, double sigma, std::uint64_t seed) {
  if (sigma <= 0) return;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, sigma);
  for (double& s : samples) s += gauss(rng);
}

}  // namespace ucsim
