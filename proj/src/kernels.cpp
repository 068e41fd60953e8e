// SPDX-License-Identifier: Apache-2.0

#include "ucsim/kernels.hpp"

#include <cmath>
#include <numbers>
#include <random>

namespace ucsim {

namespace {

// Below this many samples the OpenMP fork costs more than the loop.
constexpr std::size_t kParallelThreshold = 1U << 15;

Bits block_bits(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Bits bits(n);
  for (auto& b : bits) b = static_cast<std::uint8_t>(rng() >> 63);
  return bits;
}

}  // namespace

namespace kernels {

void fill_symbols(std::span<double> out, std::span<const std::int8_t> polarity, std::span<const double> cycle,
                  int samples_per_symbol, double amplitude) {
  const auto n_symbols = static_cast<std::ptrdiff_t>(polarity.size());
  const auto sps = static_cast<std::size_t>(samples_per_symbol);
  const std::size_t spc = cycle.size();
#pragma omp parallel for schedule(static) if (out.size() > kParallelThreshold)
  for (std::ptrdiff_t k = 0; k < n_symbols; ++k) {
    const double a = amplitude * polarity[static_cast<std::size_t>(k)];
    double* dst = out.data() + static_cast<std::size_t>(k) * sps;
    for (std::size_t i = 0; i < sps; ++i) dst[i] = a * cycle[i % spc];
  }
}

void correlate_symbols(std::span<const double> samples, int samples_per_symbol, std::span<const double> cos_cycle,
                       std::span<const double> sin_cycle, std::span<double> in_phase, std::span<double> quadrature) {
  const auto n_symbols = static_cast<std::ptrdiff_t>(in_phase.size());
  const auto sps = static_cast<std::size_t>(samples_per_symbol);
  const std::size_t spc = cos_cycle.size();
#pragma omp parallel for schedule(static) if (samples.size() > kParallelThreshold)
  for (std::ptrdiff_t k = 0; k < n_symbols; ++k) {
    const double* src = samples.data() + static_cast<std::size_t>(k) * sps;
    double i_acc = 0.0, q_acc = 0.0;
    for (std::size_t i = 0; i < sps; ++i) {
      i_acc += src[i] * cos_cycle[i % spc];
      q_acc -= src[i] * sin_cycle[i % spc];
    }
    in_phase[static_cast<std::size_t>(k)] = i_acc;
    quadrature[static_cast<std::size_t>(k)] = q_acc;
  }
}

void product_statistics(std::span<const double> samples, int samples_per_symbol, std::span<double> stat) {
  const auto n = static_cast<std::ptrdiff_t>(stat.size());
  const auto sps = static_cast<std::size_t>(samples_per_symbol);
#pragma omp parallel for schedule(static) if (samples.size() > kParallelThreshold)
  for (std::ptrdiff_t k = 0; k < n; ++k) {
    const double* prev = samples.data() + static_cast<std::size_t>(k) * sps;
    const double* cur = prev + sps;
    double acc = 0.0;
    for (std::size_t i = 0; i < sps; ++i) acc += cur[i] * prev[i];
    stat[static_cast<std::size_t>(k)] = acc;
  }
}

BerCount count_dpsk_errors(const ModemConfig& cfg, double ebn0_linear, std::size_t n_bits, std::uint64_t seed) {
  const double sigma = ebn0_to_noise_sigma(ebn0_linear, cfg);
  const auto n_blocks = static_cast<std::ptrdiff_t>((n_bits + kBerBlockBits - 1) / kBerBlockBits);
  std::uint64_t errors = 0;
  // Integer reduction: the total is independent of thread count and schedule.
#pragma omp parallel for schedule(dynamic, 1) reduction(+ : errors)
  for (std::ptrdiff_t b = 0; b < n_blocks; ++b) {
    const auto ub = static_cast<std::uint64_t>(b);
    const std::size_t n = std::min(kBerBlockBits, n_bits - ub * kBerBlockBits);
    const Bits tx = block_bits(n, derive_seed(seed, ub, 0));
    Waveform w = modulate(tx, cfg);
    add_gaussian_noise(w.samples, sigma, derive_seed(seed, ub, 1));
    const Bits rx = demodulate(w, cfg, n);
    for (std::size_t i = 0; i < n; ++i) errors += tx[i] != rx[i];
  }
  return {n_bits, errors};
}

}  // namespace kernels

namespace reference {

Waveform modulate(std::span<const std::uint8_t> bits, const ModemConfig& cfg) {
  const auto phase = diff_encode(bits);
  const int sps = cfg.samples_per_bit();
  const double fs = cfg.sample_rate_hz();
  Waveform w;
  w.sample_rate_hz = fs;
  w.samples.reserve(phase.size() * static_cast<std::size_t>(sps));
  for (std::size_t k = 0; k < phase.size(); ++k) {
    for (int i = 0; i < sps; ++i) {
      const double t = static_cast<double>(k * static_cast<std::size_t>(sps) + static_cast<std::size_t>(i)) / fs;
      w.samples.push_back(cfg.amplitude_v * std::cos(2.0 * std::numbers::pi * cfg.carrier_hz * t + phase[k]));
    }
  }
  return w;
}

std::vector<double> symbol_statistics(const Waveform& wave, const ModemConfig& cfg, std::size_t n_bits,
                                      std::size_t offset) {
  const auto sps = static_cast<std::size_t>(cfg.samples_per_bit());
  if (wave.size() < offset + (n_bits + 1) * sps) throw InsufficientSamples("reference: waveform too short");
  const double w0 = 2.0 * std::numbers::pi / cfg.samples_per_cycle;
  std::vector<double> stat(n_bits);
  for (std::size_t k = 0; k < n_bits; ++k) {
    const double* prev = wave.samples.data() + offset + k * sps;
    const double* cur = prev + sps;
    if (cfg.detector == Detector::kSampleProduct) {
      double acc = 0.0;
      for (std::size_t i = 0; i < sps; ++i) acc += cur[i] * prev[i];
      stat[k] = acc;
    } else {
      double ip = 0, qp = 0, ic = 0, qc = 0;
      for (std::size_t i = 0; i < sps; ++i) {
        const double c = std::cos(w0 * static_cast<double>(i)), s = std::sin(w0 * static_cast<double>(i));
        ip += prev[i] * c;
        qp -= prev[i] * s;
        ic += cur[i] * c;
        qc -= cur[i] * s;
      }
      stat[k] = ic * ip + qc * qp;
    }
  }
  return stat;
}

Bits demodulate(const Waveform& wave, const ModemConfig& cfg, std::size_t n_bits, std::size_t offset) {
  const auto stat = reference::symbol_statistics(wave, cfg, n_bits, offset);
  Bits bits(n_bits);
  for (std::size_t k = 0; k < n_bits; ++k) bits[k] = stat[k] < 0.0 ? 1 : 0;
  return bits;
}

BerCount count_dpsk_errors(const ModemConfig& cfg, double ebn0_linear, std::size_t n_bits, std::uint64_t seed) {
  const double sigma = ebn0_to_noise_sigma(ebn0_linear, cfg);
  BerCount count{n_bits, 0};
  for (std::uint64_t b = 0; b * kBerBlockBits < n_bits; ++b) {
    const std::size_t n = std::min(kBerBlockBits, n_bits - b * kBerBlockBits);
    const Bits tx = block_bits(n, derive_seed(seed, b, 0));
    Waveform w = reference::modulate(tx, cfg);
    add_gaussian_noise(w.samples, sigma, derive_seed(seed, b, 1));
    const Bits rx = reference::demodulate(w, cfg, n);
    for (std::size_t i = 0; i < n; ++i) count.errors += tx[i] != rx[i];
  }
  return count;
}

}  // namespace reference

}  // namespace ucsim
