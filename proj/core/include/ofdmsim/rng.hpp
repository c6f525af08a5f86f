#pragma once

#include <complex>
#include <cstdint>
#include <random>

namespace ofdmsim {

using Rng = std::mt19937_64;

// One output of the splitmix64 sequence started at `seed`.
// Reference test vector: splitmix64(0) == 0xE220A8397B1DCDAF.
inline std::uint64_t splitmix64(std::uint64_t seed) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

// Seed for grid cell `index` under a master seed. This is the documented
// mixing rule used by the sweep runner: cell seeds are independent of
// execution order and of the number of worker threads.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  return splitmix64(master ^ splitmix64(index));
}

inline Rng make_rng(std::uint64_t seed) { return Rng{seed}; }

// Circularly-symmetric complex Gaussian, variance `var` per complex sample
// (so each of the two quadratures has variance var/2). Real part drawn first.
inline std::complex<double> draw_cn(Rng& rng, std::normal_distribution<double>& unit,
                                    double var) {
  const double s = std::sqrt(0.5 * var);
  const double re = s * unit(rng);
  const double im = s * unit(rng);
  return {re, im};
}

}  // namespace ofdmsim
