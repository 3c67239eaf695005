// SPDX-License-Identifier: Apache-2.0
#include "baire/enumeration.hpp"

#include <algorithm>
#include <bit>

namespace baire {

Enumeration& Enumeration::instance() {
    static Enumeration e;
    return e;
}

void Enumeration::ensure(std::size_t n) {
    std::lock_guard<std::mutex> lock(mu_);
    while (values_.size() < n) {
        // Calkin-Wilf step: x -> 1 / (2*floor(x) - x + 1); starts at 1.
        Rational next = Rational(1) / (Rational(2 * cw_state_.floor()) - cw_state_ + Rational(1));
        cw_state_ = next;
        if (next > Rational(0) && next < Rational(1)) {
            values_.push_back(next);
            index_.emplace(next, values_.size());
        }
    }
}

Rational Enumeration::value(std::size_t index) const {
    if (index == 0 || index > values_.size())
        throw Error("enumeration index outside cached prefix");
    return values_[index - 1];
}

std::optional<std::size_t> Enumeration::index_of(const Rational& q) const {
    auto it = index_.find(q);
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

std::pair<std::size_t, std::size_t>
Enumeration::SortedIndex::value_range(const Rational& lo, const Rational& hi) const {
    auto cmp = [](const std::pair<Rational, std::size_t>& p, const Rational& v) {
        return p.first < v;
    };
    std::size_t a = std::lower_bound(by_value.begin(), by_value.end(), lo, cmp) - by_value.begin();
    std::size_t b = std::lower_bound(by_value.begin(), by_value.end(), hi, cmp) - by_value.begin();
    while (b < by_value.size() && by_value[b].first == hi) ++b;
    return {a, b};
}

std::size_t Enumeration::SortedIndex::argmin_pos(std::size_t a, std::size_t b) const {
    std::size_t k = std::bit_width(b - a) - 1;
    std::size_t p = argmin[k][a], q = argmin[k][b - (std::size_t(1) << k)];
    return by_value[p].second <= by_value[q].second ? p : q;
}

std::size_t Enumeration::SortedIndex::argmax_pos(std::size_t a, std::size_t b) const {
    std::size_t k = std::bit_width(b - a) - 1;
    std::size_t p = argmax[k][a], q = argmax[k][b - (std::size_t(1) << k)];
    return by_value[p].second >= by_value[q].second ? p : q;
}

const Enumeration::SortedIndex& Enumeration::sorted(std::size_t trunc) const {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = sorted_cache_.find(trunc);
    if (it != sorted_cache_.end()) return it->second;
    if (trunc > values_.size())
        throw Error("enumeration truncation beyond cached prefix; call ensure() first");
    SortedIndex s;
    s.by_value.reserve(trunc);
    for (std::size_t i = 0; i < trunc; ++i) s.by_value.emplace_back(values_[i], i + 1);
    std::sort(s.by_value.begin(), s.by_value.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    std::size_t n = s.by_value.size();
    std::size_t levels = n ? std::bit_width(n) : 1;
    s.argmin.assign(levels, std::vector<std::size_t>(n));
    s.argmax.assign(levels, std::vector<std::size_t>(n));
    for (std::size_t i = 0; i < n; ++i) s.argmin[0][i] = s.argmax[0][i] = i;
    for (std::size_t k = 1; k < levels; ++k) {
        for (std::size_t i = 0; i + (std::size_t(1) << k) <= n; ++i) {
            std::size_t p = s.argmin[k - 1][i], q = s.argmin[k - 1][i + (std::size_t(1) << (k - 1))];
            s.argmin[k][i] = s.by_value[p].second <= s.by_value[q].second ? p : q;
            p = s.argmax[k - 1][i], q = s.argmax[k - 1][i + (std::size_t(1) << (k - 1))];
            s.argmax[k][i] = s.by_value[p].second >= s.by_value[q].second ? p : q;
        }
    }
    return sorted_cache_.emplace(trunc, std::move(s)).first->second;
}

Enumeration::RangeHit Enumeration::range_query(std::size_t trunc, const Rational& lo,
                                               const Rational& hi) const {
    const SortedIndex& s = sorted(trunc);
    auto [a, b] = s.value_range(lo, hi);
    RangeHit hit;
    if (a >= b) return hit;
    hit.count = b - a;
    hit.min_index = s.by_value[s.argmin_pos(a, b)].second;
    hit.max_index = s.by_value[s.argmax_pos(a, b)].second;
    return hit;
}

std::vector<std::size_t> Enumeration::smallest_indices_in(std::size_t trunc, const Rational& lo,
                                                          const Rational& hi,
                                                          std::size_t cap) const {
    const SortedIndex& s = sorted(trunc);
    auto [a, b] = s.value_range(lo, hi);
    std::vector<std::size_t> out;
    if (a >= b || cap == 0) return out;
    // Extract the cap smallest indices by repeatedly splitting at the argmin.
    std::vector<std::pair<std::size_t, std::size_t>> ranges{{a, b}};
    while (out.size() < cap) {
        std::size_t best_pos = 0, best_range = ranges.size();
        for (std::size_t i = 0; i < ranges.size(); ++i) {
            if (ranges[i].first >= ranges[i].second) continue;
            std::size_t p = s.argmin_pos(ranges[i].first, ranges[i].second);
            if (best_range == ranges.size() ||
                s.by_value[p].second < s.by_value[best_pos].second) {
                best_pos = p;
                best_range = i;
            }
        }
        if (best_range == ranges.size()) break;
        out.push_back(s.by_value[best_pos].second);
        auto [ra, rb] = ranges[best_range];
        ranges[best_range] = {ra, best_pos};
        ranges.emplace_back(best_pos + 1, rb);
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<std::size_t> Enumeration::indices_in(std::size_t trunc, const Rational& lo,
                                                 const Rational& hi, std::size_t cap) const {
    const SortedIndex& s = sorted(trunc);
    auto [a, b] = s.value_range(lo, hi);
    std::vector<std::size_t> out;
    for (std::size_t i = a; i < b && out.size() < cap; ++i) out.push_back(s.by_value[i].second);
    return out;
}

const std::vector<std::pair<Rational, std::size_t>>&
Enumeration::sorted_prefix(std::size_t trunc) const {
    return sorted(trunc).by_value;
}

} // namespace baire
