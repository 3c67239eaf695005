// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <mutex>
#include <optional>
#include <unordered_map>
#include <vector>

#include "baire/rational.hpp"

namespace baire {

/* The one fixed enumeration r : {1,2,...} -> Q ∩ (0,1), shared by every
 * enumeration-backed object in the library: walk the Calkin-Wilf sequence of
 * all positive rationals and keep the entries lying in (0,1).
 * r_1 = 1/2, r_2 = 1/3, r_3 = 2/3, r_4 = 1/4, r_5 = 3/5, ...
 *
 * Per truncation N a value-sorted index supports the adversarial queries the
 * oscillation and falsification code issues: which enumerated points lie in a
 * window, and which of them carry the largest values (smallest indices). */
class Enumeration {
  public:
    static Enumeration& instance();

    // Grow caches so indices 1..n are available.  Call before sharing across
    // threads; later lookups within the cached prefix are read-only.
    void ensure(std::size_t n);

    Rational value(std::size_t index) const; // 1-based
    std::optional<std::size_t> index_of(const Rational& q) const;

    struct RangeHit {
        std::size_t count = 0;
        std::optional<std::size_t> min_index; // largest riemann value in range
        std::optional<std::size_t> max_index; // smallest riemann value in range
    };

    // Enumerated points with index <= trunc and value in [lo, hi].
    RangeHit range_query(std::size_t trunc, const Rational& lo, const Rational& hi) const;

    // Up to cap indices with the smallest index (biggest value weight) whose
    // value lies in [lo, hi]; ascending by index.
    std::vector<std::size_t> smallest_indices_in(std::size_t trunc, const Rational& lo,
                                                 const Rational& hi, std::size_t cap) const;

    // All indices <= trunc with value in [lo, hi], capped; ascending by value.
    std::vector<std::size_t> indices_in(std::size_t trunc, const Rational& lo,
                                        const Rational& hi, std::size_t cap) const;

    // Value-sorted view of the prefix 1..trunc as (value, index) pairs.
    const std::vector<std::pair<Rational, std::size_t>>& sorted_prefix(std::size_t trunc) const;

  private:
    Enumeration() = default;

    struct SortedIndex {
        std::vector<std::pair<Rational, std::size_t>> by_value;
        // Sparse tables of argmin/argmax positions over the index field.
        std::vector<std::vector<std::size_t>> argmin;
        std::vector<std::vector<std::size_t>> argmax;
        std::pair<std::size_t, std::size_t> value_range(const Rational& lo,
                                                        const Rational& hi) const;
        std::size_t argmin_pos(std::size_t a, std::size_t b) const;
        std::size_t argmax_pos(std::size_t a, std::size_t b) const;
    };

    const SortedIndex& sorted(std::size_t trunc) const;

    mutable std::mutex mu_;
    std::vector<Rational> values_;
    std::unordered_map<Rational, std::size_t> index_;
    Rational cw_state_{1};
    mutable std::unordered_map<std::size_t, SortedIndex> sorted_cache_;
};

} // namespace baire
