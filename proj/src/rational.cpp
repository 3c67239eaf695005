// SPDX-License-Identifier: Apache-2.0
#include "baire/rational.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <limits>

namespace baire {

namespace {

using i128 = __int128;

i128 gcd128(i128 a, i128 b) {
    if (a < 0) a = -a;
    if (b < 0) b = -b;
    while (b != 0) {
        i128 t = a % b;
        a = b;
        b = t;
    }
    return a;
}

constexpr i128 kMin64 = std::numeric_limits<std::int64_t>::min();
constexpr i128 kMax64 = std::numeric_limits<std::int64_t>::max();

} // namespace

Rational Rational::from_i128(i128 n, i128 d) {
    if (d == 0) throw DomainError("rational with zero denominator");
    if (d < 0) {
        n = -n;
        d = -d;
    }
    i128 g = gcd128(n, d);
    if (g > 1) {
        n /= g;
        d /= g;
    }
    if (n < kMin64 || n > kMax64 || d > kMax64)
        throw OverflowError("rational out of int64 range after reduction");
    Rational r;
    r.num_ = (std::int64_t)n;
    r.den_ = (std::int64_t)d;
    return r;
}

Rational::Rational(std::int64_t n, std::int64_t d) { *this = from_i128(n, d); }

Rational operator+(const Rational& a, const Rational& b) {
    return Rational::from_i128((i128)a.num_ * b.den_ + (i128)b.num_ * a.den_,
                               (i128)a.den_ * b.den_);
}

Rational operator-(const Rational& a, const Rational& b) {
    return Rational::from_i128((i128)a.num_ * b.den_ - (i128)b.num_ * a.den_,
                               (i128)a.den_ * b.den_);
}

Rational operator*(const Rational& a, const Rational& b) {
    return Rational::from_i128((i128)a.num_ * b.num_, (i128)a.den_ * b.den_);
}

Rational operator/(const Rational& a, const Rational& b) {
    if (b.num_ == 0) throw DomainError("division by zero");
    return Rational::from_i128((i128)a.num_ * b.den_, (i128)a.den_ * b.num_);
}

Rational Rational::operator-() const { return from_i128(-(i128)num_, den_); }

std::int64_t Rational::floor() const {
    if (num_ >= 0) return num_ / den_;
    return -((-(i128)num_ + den_ - 1) / den_);
}

std::int64_t Rational::ceil() const { return -(-*this).floor(); }

Rational Rational::pow(std::int64_t e) const {
    if (e < 0) {
        if (num_ == 0) throw DomainError("zero to a negative power");
        return Rational(1) / pow(-e);
    }
    Rational base = *this, acc = 1;
    while (e > 0) {
        if (e & 1) acc *= base;
        base = (e >>= 1) ? base * base : base;
    }
    return acc;
}

Rational Rational::snap(double x) {
    if (!std::isfinite(x)) throw DomainError("cannot snap non-finite float");
    double scaled = x * std::exp2(kSnapPow);
    if (std::fabs(scaled) > 9.2e18) throw OverflowError("float too large to snap");
    return from_i128((i128)std::llround(scaled), (i128)1 << kSnapPow);
}

std::optional<Rational> Rational::parse(std::string_view s) {
    auto read_int = [](std::string_view& v, std::int64_t& out) -> bool {
        const char* b = v.data();
        const char* e = v.data() + v.size();
        auto [p, ec] = std::from_chars(b, e, out);
        if (ec != std::errc() || p == b) return false;
        v.remove_prefix(p - b);
        return true;
    };
    std::string_view v = s;
    std::int64_t ip = 0;
    if (!read_int(v, ip)) return std::nullopt;
    if (v.empty()) return Rational(ip);
    if (v[0] == '/') {
        v.remove_prefix(1);
        std::int64_t q = 0;
        if (!read_int(v, q) || !v.empty() || q == 0) return std::nullopt;
        return Rational(ip, q);
    }
    if (v[0] == '.') {
        v.remove_prefix(1);
        if (v.empty() || v.size() > 18) return std::nullopt;
        i128 num = ip < 0 ? -(i128)ip : (i128)ip;
        i128 den = 1;
        for (char c : v) {
            if (!std::isdigit((unsigned char)c)) return std::nullopt;
            num = num * 10 + (c - '0');
            den *= 10;
        }
        bool neg = ip < 0 || (ip == 0 && s.size() && s[0] == '-');
        return from_i128(neg ? -num : num, den);
    }
    return std::nullopt;
}

std::string Rational::str() const {
    std::string out = std::to_string(num_);
    if (den_ != 1) {
        out += '/';
        out += std::to_string(den_);
    }
    return out;
}

} // namespace baire
