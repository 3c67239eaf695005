// SPDX-License-Identifier: Apache-2.0
#include "baire/sampling.hpp"

#include "baire/errors.hpp"

namespace baire {

std::uint64_t SplitMix64::next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

double SplitMix64::next_unit() {
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
}

std::uint64_t SplitMix64::bounded(std::uint64_t n) {
    if (n == 0)
        throw InputError("bounded(0)");
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(next()) * n) >> 64);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
    SplitMix64 s(seed ^ (0x9e3779b97f4a7c15ULL * (index + 1)));
    return s.next();
}

std::vector<Rational> dyadic_grid(const Rational& lo, const Rational& hi, int k) {
    if (k < 0 || k > 24)
        throw InputError("dyadic grid resolution out of range");
    if (hi < lo)
        throw InputError("dyadic grid on an empty window");
    const std::int64_t steps = std::int64_t(1) << k;
    const Rational h = (hi - lo) / Rational(steps);
    std::vector<Rational> out;
    out.reserve(static_cast<std::size_t>(steps) + 1);
    for (std::int64_t j = 0; j <= steps; ++j)
        out.push_back(lo + Rational(j) * h);
    return out;
}

Rational dyadic_pick(SplitMix64& rng, const Rational& lo, const Rational& hi, int k) {
    const std::int64_t steps = std::int64_t(1) << k;
    const std::int64_t j =
        static_cast<std::int64_t>(rng.bounded(static_cast<std::uint64_t>(steps) + 1));
    return lo + Rational(j) * ((hi - lo) / Rational(steps));
}

} // namespace baire
