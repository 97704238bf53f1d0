// SPDX-License-Identifier: Apache-2.0
#include "molspec/randomness.hpp"

#include <cmath>
#include <stdexcept>

namespace molspec {

namespace {
constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;
}

std::uint64_t splitmix64_finalize(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

std::uint64_t derive_stream(std::uint64_t master_seed, std::uint64_t stream_index) {
  return splitmix64_finalize(master_seed + kGolden * (stream_index + 1));
}

std::uint64_t SplitMix64::next_u64() {
  state_ += kGolden;
  return splitmix64_finalize(state_);
}

double SplitMix64::next_open01() {
  return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1p-53;
}

AtomConfiguration AtomConfiguration::explicit_atoms(std::vector<double> atoms) {
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    if (!(atoms[i] > 0)) throw std::invalid_argument("explicit_atoms: atoms must be positive");
    if (i > 0 && !(atoms[i] > atoms[i - 1]))
      throw std::invalid_argument("explicit_atoms: atoms must be strictly ascending");
  }
  AtomConfiguration cfg;
  cfg.atoms = std::move(atoms);
  cfg.horizon = cfg.atoms.empty() ? 0.0 : cfg.atoms.back();
  return cfg;
}

AtomConfiguration sample_configuration(double nu, double horizon, std::uint64_t master_seed,
                                       std::uint64_t stream_index) {
  if (!(nu > 0)) throw std::invalid_argument("sample_configuration: nu must be positive");
  if (!(horizon > 0)) throw std::invalid_argument("sample_configuration: horizon must be positive");

  AtomConfiguration cfg;
  cfg.nu = nu;
  cfg.horizon = horizon;
  cfg.master_seed = master_seed;
  cfg.stream_index = stream_index;

  SplitMix64 rng(derive_stream(master_seed, stream_index));
  double position = 0;
  for (;;) {
    position += -std::log(rng.next_open01()) / nu;
    if (position > horizon) break;
    cfg.atoms.push_back(position);
  }
  return cfg;
}

}  // namespace molspec
