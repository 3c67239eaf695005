// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "baire/interval.hpp"

namespace baire {

/* Subsets of the line closed under the operations the engine needs:
 *   - finite unions of rational-endpoint intervals (points are degenerate
 *     intervals), and
 *   - the same with the canonical rational enumeration of (0,1) adjoined
 *     ("add": S = parts ∪ Q) or carved out ("subtract": S = parts \ Q),
 *     where Q = Q ∩ (0,1) carries the tail tag "rationals".
 * A truncated enumeration without a tail tag is just a finite point set and is
 * folded into the interval parts on construction.  trunc records how much of
 * the enumeration is materialized for sampling; it does not affect the set.
 * Operations whose exact result leaves this algebra throw
 * UnrepresentableResult. */
enum class Polarity { add, subtract };

struct EnumPart {
    Polarity polarity = Polarity::add;
    std::size_t trunc = 1000;
};

struct ClassTags {
    bool open = false;
    bool closed = false;
    bool f_sigma = false;
    bool g_delta = false;
    bool ambiguous1() const { return f_sigma && g_delta; }
    std::vector<std::string> labels() const;
};

class RSet {
  public:
    RSet() = default; // empty set
    explicit RSet(const Interval& iv) : parts_{iv} {}

    static RSet empty() { return RSet(); }
    static RSet whole() { return RSet(Interval::whole()); }
    static RSet point(const Rational& p) { return RSet(Interval::point(p)); }
    static RSet from_parts(std::vector<Interval> parts);
    static RSet from_points(const std::vector<Rational>& pts);
    // First n enumeration values; with tail=true the conceptual set is all of
    // Q ∩ (0,1) and n only sets the materialization depth.
    static RSet enum_prefix(std::size_t n, bool tail);
    static RSet with_enum(std::vector<Interval> parts, Polarity pol, std::size_t trunc);

    const std::vector<Interval>& parts() const { return parts_; }
    const std::optional<EnumPart>& enum_part() const { return enum_; }
    const std::string& provenance() const { return provenance_; }
    void set_provenance(std::string p) { provenance_ = std::move(p); }

    bool is_empty() const { return parts_.empty() && !enum_; }
    bool member(const Rational& x) const;

    struct FloatMember {
        bool value = false;
        bool ambiguous = false;
        Rational snapped;
    };
    FloatMember member(double x) const;

    // Distance from x to the closure of the set; kDeltaMax for the empty set.
    Rational distance(const Rational& x) const;

    // Enumerated points the set materializes (prefix, minus interval parts).
    std::vector<Rational> enum_points() const;

    RSet closure() const;
    ClassTags classify() const;

    // True when the set contains points of positive-length linear measure
    // minus countably many (hence contains irrationals).
    bool has_irrational_points() const;

    bool operator==(const RSet& o) const;

    std::string str() const;

  private:
    std::vector<Interval> parts_;   // sorted, disjoint, not mergeable
    std::optional<EnumPart> enum_;
    std::string provenance_;

    friend RSet set_union(const RSet&, const RSet&);
    friend RSet set_intersect(const RSet&, const RSet&);
    friend RSet set_difference(const RSet&, const RSet&);
};

RSet set_union(const RSet& a, const RSet& b);
RSet set_intersect(const RSet& a, const RSet& b);
RSet set_difference(const RSet& a, const RSet& b);
RSet set_complement(const RSet& a);
// B ⊆ A, exact.
bool subset(const RSet& inner, const RSet& outer);

// Closed intervals covering exactly the closure of s.
std::vector<Interval> closure_parts(const RSet& s);

// Exact infimum distance between the closures; kDeltaMax if either is empty.
Rational set_distance(const RSet& a, const RSet& b);

// r-neighborhood of the closure (open or closed ends); requires r > 0.
RSet swell(const RSet& s, const Rational& r, bool open_ends);

/* A finite family with a certified positive pairwise gap.  gap is the exact
 * minimum over pairs of set_distance (kDeltaMax for 0/1 members);
 * envelopes are open gap/3-swellings, pairwise disjoint by construction. */
struct DiscreteFamily {
    std::vector<RSet> members;
    Rational gap = kDeltaMax;
    std::optional<std::vector<RSet>> envelopes;
};

// Certifies discreteness of the family; throws NotDiscrete (naming the
// offending pair) when the exact minimum gap is zero.
DiscreteFamily min_gap(std::vector<RSet> members, bool with_envelopes);

void to_json(nlohmann::json& j, const RSet& s);
void from_json(const nlohmann::json& j, RSet& s);
void to_json(nlohmann::json& j, const DiscreteFamily& f);
void from_json(const nlohmann::json& j, DiscreteFamily& f);

} // namespace baire
