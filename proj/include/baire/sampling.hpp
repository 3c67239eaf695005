// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <vector>

#include "baire/interval.hpp"

namespace baire {

/* splitmix64; the only randomness source in the project.  Streams are derived
 * per logical index so campaign results are independent of worker count. */
class SplitMix64 {
  public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}
    std::uint64_t next();
    double next_unit();                     // [0,1)
    std::uint64_t bounded(std::uint64_t n); // [0,n), n > 0
  private:
    std::uint64_t state_;
};

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index);

// The 2^k+1 evenly spaced rationals of [lo,hi]; grids nest as k grows.
std::vector<Rational> dyadic_grid(const Rational& lo, const Rational& hi, int k);

// One uniformly chosen grid point of [lo,hi] at resolution 2^-k.
Rational dyadic_pick(SplitMix64& rng, const Rational& lo, const Rational& hi, int k);

} // namespace baire
