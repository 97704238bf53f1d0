// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>
#include <vector>

#include "molspec/randomness.hpp"
#include "oracles.hpp"

using namespace molspec;
using namespace molspec::testing;

TEST_CASE("derive_stream is deterministic and collision-free across indices") {
  SplitMix64 masters(123);
  for (int trial = 0; trial < 10000; ++trial) {
    const std::uint64_t s = masters.next_u64();
    CHECK(derive_stream(s, 0) != derive_stream(s, 1));
    CHECK(derive_stream(s, 0) == derive_stream(s, 0));
  }
  std::set<std::uint64_t> seen;
  for (std::uint64_t i = 0; i < 20000; ++i) seen.insert(derive_stream(42, i));
  CHECK(seen.size() == 20000);
}

TEST_CASE("derive_stream halves are uniform (chi-square)") {
  const int bins = 256;
  std::vector<int> lo(bins, 0), hi(bins, 0);
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const std::uint64_t z = derive_stream(0x1234abcd, static_cast<std::uint64_t>(i));
    ++lo[static_cast<std::uint32_t>(z) >> 24];
    ++hi[static_cast<std::uint32_t>(z >> 32) >> 24];
  }
  const double expected = double(n) / bins;
  auto chi2 = [&](const std::vector<int>& c) {
    double sum = 0;
    for (int k : c) sum += (k - expected) * (k - expected) / expected;
    return sum;
  };
  const double crit = chi_square_critical(bins - 1, kZ999);  // p > 0.001
  CHECK(chi2(lo) < crit);
  CHECK(chi2(hi) < crit);
}

TEST_CASE("uniform draws stay inside the open interval") {
  SplitMix64 rng(7);
  for (int i = 0; i < 100000; ++i) {
    const double u = rng.next_open01();
    CHECK(u > 0.0);
    CHECK(u < 1.0);
  }
}

TEST_CASE("configuration sampling reproduces itself and respects the horizon") {
  const AtomConfiguration a = sample_configuration(1.0, 10.0, 42, 3);
  const AtomConfiguration b = sample_configuration(1.0, 10.0, 42, 3);
  CHECK(a.atoms == b.atoms);
  REQUIRE(!a.atoms.empty());
  for (std::size_t i = 0; i < a.atoms.size(); ++i) {
    CHECK(a.atoms[i] > 0);
    CHECK(a.atoms[i] <= 10.0);
    if (i > 0) CHECK(a.atoms[i] > a.atoms[i - 1]);
  }
  CHECK(sample_configuration(1.0, 10.0, 43, 3).atoms != a.atoms);
}

namespace {

// re-derive the raw inverse-CDF draws behind one configuration; the final
// draw overshoots the horizon and is excluded from the atom list, but it is
// still an unbiased Exponential(nu) sample
std::vector<double> raw_gaps(double nu, double horizon, std::uint64_t master, std::uint64_t index) {
  SplitMix64 rng(derive_stream(master, index));
  std::vector<double> gaps;
  double position = 0;
  do {
    gaps.push_back(-std::log(rng.next_open01()) / nu);
    position += gaps.back();
  } while (position <= horizon);
  return gaps;
}

}  // namespace

TEST_CASE("atom counts match Poisson moments, raw gaps match exponential moments") {
  const double nu = 1.0, horizon = 10.0;
  const int n = 10000;
  double count_sum = 0, count_sq = 0, gap_sum = 0;
  std::size_t gap_n = 0;
  for (int i = 0; i < n; ++i) {
    const auto cfg = sample_configuration(nu, horizon, 2024, static_cast<std::uint64_t>(i));
    const auto gaps = raw_gaps(nu, horizon, 2024, static_cast<std::uint64_t>(i));
    // the atoms are exactly the in-horizon partial sums of the draws
    REQUIRE(gaps.size() == cfg.atoms.size() + 1);
    double sum = 0;
    for (std::size_t k = 0; k < cfg.atoms.size(); ++k) {
      sum += gaps[k];
      REQUIRE(cfg.atoms[k] == sum);
    }
    const double c = static_cast<double>(cfg.atoms.size());
    count_sum += c;
    count_sq += c * c;
    for (double g : gaps) gap_sum += g;
    gap_n += gaps.size();
  }
  const double mean_count = count_sum / n;
  const double var_count = count_sq / n - mean_count * mean_count;
  CHECK(std::abs(mean_count - nu * horizon) < 0.3);
  // Var of the sample variance of Poisson(10) over 1e4 draws: 3 SE ~ 0.44
  CHECK(std::abs(var_count - nu * horizon) < 0.45);
  CHECK(std::abs(gap_sum / static_cast<double>(gap_n) - 1.0) < 0.05);
}

TEST_CASE("gap law passes a KS test against Exponential(nu)") {
  const double nu = 2.0;
  std::vector<double> gaps;
  for (int i = 0; i < 2000; ++i)
    for (double g : raw_gaps(nu, 5.0, 99, static_cast<std::uint64_t>(i))) gaps.push_back(g);
  REQUIRE(gaps.size() > 5000);
  const double d = ks_statistic_exponential(gaps, nu);
  CHECK(d < ks_critical(0.001, gaps.size()));
}

TEST_CASE("vanishing intensity yields empty configurations") {
  for (int i = 0; i < 1000; ++i)
    CHECK(sample_configuration(1e-9, 1.0, 5, static_cast<std::uint64_t>(i)).atoms.empty());
}

TEST_CASE("explicit configurations validate their atoms") {
  CHECK_THROWS_AS(AtomConfiguration::explicit_atoms({0.5, 0.5}), std::invalid_argument);
  CHECK_THROWS_AS(AtomConfiguration::explicit_atoms({0.0}), std::invalid_argument);
  CHECK(AtomConfiguration::explicit_atoms({0.5, 1.5}).atoms.size() == 2);
}

TEST_CASE("sampling rejects invalid parameters") {
  CHECK_THROWS_AS(sample_configuration(0.0, 1.0, 1), std::invalid_argument);
  CHECK_THROWS_AS(sample_configuration(1.0, 0.0, 1), std::invalid_argument);
}
