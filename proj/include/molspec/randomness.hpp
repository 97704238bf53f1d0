// randomness.hpp
// Reproducible sampling of atom configurations from a Poisson process via
// i.i.d. exponential gaps. The generator is SplitMix64, fixed bit-exactly:
//
//   state advance:  s_{n+1} = s_n + 0x9E3779B97F4A7C15  (mod 2^64)
//   output:         z = s_{n+1};
//                   z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
//                   z = (z ^ (z >> 27)) * 0x94D049BB133111EB
//                   z = z ^ (z >> 31)
//   uniform (0,1):  u = ((z >> 11) + 0.5) * 2^-53
//   stream seeds:   derive_stream(m, i) = finalize(m + 0x9E3779B97F4A7C15 * (i + 1))
//
// Distinct stream indices give distinct seeds for every index (the update is
// a bijection of the 64-bit state). u never hits 0 or 1, so exponential gaps
// -ln(u)/nu are finite and positive.
//
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <vector>

namespace molspec {

std::uint64_t splitmix64_finalize(std::uint64_t z);

std::uint64_t derive_stream(std::uint64_t master_seed, std::uint64_t stream_index);

class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64();
  double next_open01();  // uniform in the open interval (0,1)

 private:
  std::uint64_t state_;
};

// One realization of the interaction positions: a_1 < a_2 < ... in
// (0, horizon], with the provenance needed to re-draw it bit-for-bit.
struct AtomConfiguration {
  double nu = 0;
  double horizon = 0;
  std::uint64_t master_seed = 0;
  std::uint64_t stream_index = 0;
  std::vector<double> atoms;

  // explicit (non-sampled) configuration, e.g. a hand-placed barrier
  static AtomConfiguration explicit_atoms(std::vector<double> atoms);
};

// Draws gaps l_i ~ Exp(nu) by inverse CDF and accumulates them; sampling
// stops at the first atom beyond the horizon (that atom is excluded).
AtomConfiguration sample_configuration(double nu, double horizon, std::uint64_t master_seed,
                                       std::uint64_t stream_index = 0);

}  // namespace molspec
