// SPDX-License-Identifier: Apache-2.0
//
// Serial reference vs OpenMP kernels on the modem hot loops.

#include <omp.h>

#include <chrono>
#include <cstdio>
#include <random>

#include "ucsim/kernels.hpp"

using namespace ucsim;

namespace {

template <class F>
double best_of(int reps, F&& f) {
  double best = 1e300;
  for (int i = 0; i < reps; ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    f();
    best = std::min(best, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
  }
  return best;
}

void row(const char* name, double serial, double parallel) {
  std::printf("%-22s %10.4f s %10.4f s %8.2fx\n", name, serial, parallel, serial / parallel);
}

}  // namespace

int main(int argc, char** argv) {
  const std::size_t n_bits = argc > 1 ? std::stoul(argv[1]) : 200000;
  std::printf("threads %d, %zu bits at 115200 bps\n", omp_get_max_threads(), n_bits);
  std::printf("%-22s %12s %12s %9s\n", "kernel", "reference", "openmp", "speedup");

  const ModemConfig cfg;
  std::mt19937_64 rng(1);
  Bits bits(n_bits);
  for (auto& b : bits) b = static_cast<std::uint8_t>(rng() & 1U);

  Waveform w;
  const double mod_ref = best_of(3, [&] { w = reference::modulate(bits, cfg); });
  const double mod_par = best_of(3, [&] { w = modulate(bits, cfg); });
  row("modulate", mod_ref, mod_par);

  add_gaussian_noise(w.samples, ebn0_to_noise_sigma(db_to_linear(7.0), cfg), 2);
  Bits a, b;
  const double dem_ref = best_of(3, [&] { a = reference::demodulate(w, cfg, n_bits); });
  const double dem_par = best_of(3, [&] { b = demodulate(w, cfg, n_bits); });
  row("demodulate", dem_ref, dem_par);

  BerCount ca, cb;
  const double ber_ref = best_of(1, [&] { ca = reference::count_dpsk_errors(cfg, db_to_linear(7.0), n_bits, 3); });
  const double ber_par = best_of(1, [&] { cb = kernels::count_dpsk_errors(cfg, db_to_linear(7.0), n_bits, 3); });
  row("ber monte carlo", ber_ref, ber_par);

  const bool same = a == b && ca == cb;
  std::printf("outputs identical: %s (errors %llu)\n", same ? "yes" : "NO", static_cast<unsigned long long>(cb.errors));
  return same ? 0 : 1;
}
