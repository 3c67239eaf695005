// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <compare>
#include <functional>
#include <numeric>
#include <optional>
#include <string>
#include <string_view>

#include "baire/errors.hpp"

namespace baire {

/* Exact rational numbers on int64 numerator/denominator, always reduced,
 * denominator > 0.  Intermediates run through __int128; a result whose
 * reduced form leaves int64 throws OverflowError rather than rounding.
 * Campaign sample points are dyadics with small denominators, so overflow
 * marks a genuine modeling problem, not a routine event. */
class Rational {
  public:
    constexpr Rational() = default;
    constexpr Rational(std::int64_t n) : num_(n), den_(1) {}
    Rational(std::int64_t n, std::int64_t d);

    std::int64_t num() const { return num_; }
    std::int64_t den() const { return den_; }

    static Rational from_i128(__int128 n, __int128 d);

    friend Rational operator+(const Rational& a, const Rational& b);
    friend Rational operator-(const Rational& a, const Rational& b);
    friend Rational operator*(const Rational& a, const Rational& b);
    friend Rational operator/(const Rational& a, const Rational& b);
    Rational operator-() const;

    Rational& operator+=(const Rational& o) { return *this = *this + o; }
    Rational& operator-=(const Rational& o) { return *this = *this - o; }
    Rational& operator*=(const Rational& o) { return *this = *this * o; }
    Rational& operator/=(const Rational& o) { return *this = *this / o; }

    friend bool operator==(const Rational& a, const Rational& b) {
        return a.num_ == b.num_ && a.den_ == b.den_;
    }
    friend std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
        __int128 l = (__int128)a.num_ * b.den_;
        __int128 r = (__int128)b.num_ * a.den_;
        return l < r ? std::strong_ordering::less
             : l > r ? std::strong_ordering::greater
                     : std::strong_ordering::equal;
    }

    Rational abs() const { return num_ < 0 ? -*this : *this; }
    int sign() const { return num_ < 0 ? -1 : num_ > 0 ? 1 : 0; }
    bool is_integer() const { return den_ == 1; }
    bool is_zero() const { return num_ == 0; }

    std::int64_t floor() const;
    std::int64_t ceil() const;

    // Integer power; n may be negative (base must be nonzero then).
    Rational pow(std::int64_t e) const;

    double to_double() const { return (double)num_ / (double)den_; }

    // Nearest rational with denominator 2^kSnapPow (ties toward zero).
    static Rational snap(double x);

    // Accepts "p/q", "p", and decimal literals like "0.125".
    static std::optional<Rational> parse(std::string_view s);

    std::string str() const;

  private:
    std::int64_t num_ = 0;
    std::int64_t den_ = 1;
};

inline Rational min(const Rational& a, const Rational& b) { return a < b ? a : b; }
inline Rational max(const Rational& a, const Rational& b) { return a < b ? b : a; }
inline Rational abs(const Rational& a) { return a.abs(); }

// Float inputs snap onto this dyadic grid before entering exact set algebra.
inline constexpr int kSnapPow = 40;
inline const Rational kSnapTau{1, std::int64_t(1) << kSnapPow};

// Distance to the empty set; also the cap for reported gauge values.
inline const Rational kDeltaMax{1000000000};

} // namespace baire

template <> struct std::hash<baire::Rational> {
    std::size_t operator()(const baire::Rational& r) const noexcept {
        std::size_t h = std::hash<std::int64_t>{}(r.num());
        return h ^ (std::hash<std::int64_t>{}(r.den()) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2));
    }
};
