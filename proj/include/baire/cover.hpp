// SPDX-License-Identifier: MIT
#pragma once
// Cover <-> gauge machinery: sigma-discrete leveled covers built from closed
// pieces, the neighborhood map and distance gauge of a leveled cover, meshed
// covers extracted from a gauge together with an image-diameter certificate,
// and the reduction partition used by the variable-epsilon construction.

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "baire/func.hpp"
#include "baire/interval.hpp"
#include "baire/rational.hpp"
#include "baire/rset.hpp"

namespace baire {

inline constexpr std::size_t kDefaultLevels = 32;

/* A truncated leveled cover.  Level i holds a certified DiscreteFamily of
 * closed sets; when links are present, links[i][j] names the member of level
 * i+1 containing member j of level i (the refinement chain).  Mesh covers
 * have no chain (levels get finer, not coarser) and leave links empty.
 * uncovered records, exactly, the part of the window no member reaches at
 * this truncation. */
struct SigmaDiscreteCover {
    std::vector<DiscreteFamily> levels;
    std::vector<std::vector<std::size_t>> links;     // may be empty
    std::vector<std::vector<std::size_t>> piece_ids; // provenance per member
    // Length of the chained prefix of levels (0 = no distinction).  Levels
    // past the prefix hold the closed remainder of the window at truncation;
    // their gauge values are capped by the distance to every prefix level.
    std::size_t chained = 0;
    Interval window = Interval::whole();
    RSet uncovered;
    std::string provenance;

    // Exact invariant check: positive gaps, link containment, uncovered
    // bookkeeping.  With require_full_cover, a nonempty sliver is an error.
    void validate(bool require_full_cover = false) const;
};

struct NeighborhoodMap {
    std::function<RSet(const Rational&)> at; // open U(x), x in U(x)
    std::string provenance;
};

struct CoverGaugeIndex; // flattened per-level interval index (internal)

/* A positive gauge x -> delta(x), capped at kDeltaMax.  Three closed forms
 * (cover distance, formula, jump-point distance) plus the composite produced
 * by the variable-epsilon construction. */
class Gauge {
  public:
    enum class Form { from_cover, from_formula, jumpsum_special, composite };
    enum class Claim { continuous, baire_one, unknown };

    static Gauge from_formula(Func delta, Claim claim);
    // Formula with finitely many point overrides delta(p) = v (v > 0); the
    // exact superlevel adjusts the base preimage point by point.
    static Gauge from_formula_patched(Func delta,
                                      std::vector<std::pair<Rational, Rational>> at_points,
                                      Claim claim);
    // delta(x) = 1/2 min |x - r| over the jump points of jumpsum(n_jumps)
    // whose jump is >= eps/2 (at such an r: half the distance to the others).
    static Gauge jumpsum_special(std::size_t n_jumps, const Rational& eps);
    static Gauge composite(std::vector<Gauge> parts, std::function<std::size_t(const Rational&)> pick,
                           std::string provenance);

    Rational operator()(const Rational& x) const; // exact, > 0, <= kDeltaMax
    double at(double x) const;

    // {x : delta(x) > t}, exact.  Throws ThresholdUnresolvable when the form
    // does not admit a certified threshold set (composite, or a formula whose
    // preimage leaves uncertainty).
    RSet superlevel(const Rational& t) const;

    Form form() const { return form_; }
    Claim claimed_class() const { return claim_; }
    const std::string& provenance() const { return provenance_; }

  private:
    friend std::pair<NeighborhoodMap, Gauge> gauge_from_cover(const SigmaDiscreteCover&);
    Gauge() = default;

    Form form_ = Form::from_formula;
    Claim claim_ = Claim::unknown;
    std::string provenance_;
    std::shared_ptr<const CoverGaugeIndex> cover_;     // from_cover
    std::shared_ptr<const Func> formula_;              // from_formula
    std::vector<std::pair<Rational, Rational>> overrides_; // formula point patches
    std::vector<Rational> jump_points_;                // jumpsum_special
    std::vector<Gauge> parts_;                         // composite
    std::function<std::size_t(const Rational&)> pick_; // composite selector
};

/* Leveled cover refining the given closed pieces: level n holds, for each of
 * the first n pieces P_k, the shrink {x in P_k : d(x, earlier pieces) >= 1/n}.
 * Families are discrete with gap >= 1/n and the chain links are exact.  What
 * the truncation leaves unreached inside the window is closed up and appended
 * as one or two trailing levels (split so each stays discrete), so the levels
 * cover the window exactly.  Throws RefinementFailure when a piece is not
 * closed, naming the contact point that no level can separate. */
SigmaDiscreteCover refine_cover(const std::vector<RSet>& pieces, const Interval& window,
                                std::size_t n_levels = kDefaultLevels);

/* Lemma-style neighborhood map and gauge of a leveled cover: n(x) the least
 * level containing x, A(x) its unique member there, U(x) the complement of
 * the other members at that level, delta(x) = d(x, complement of U(x)).
 * Points of the recorded uncovered sliver fall back to the distance to the
 * nearest member across all levels (a sound shrink); points outside every
 * level and the sliver raise NotCovered. */
std::pair<NeighborhoodMap, Gauge> gauge_from_cover(const SigmaDiscreteCover& c);

struct CoverCertificate {
    std::size_t pairs_tested = 0;
    double max_observed_diameter = 0.0;
    std::uint64_t seed = 0;
    Rational bound; // 3 eps / 4 + 2^-30
    bool passed = false;
    std::string truncation;
};

struct GaugeCover {
    SigmaDiscreteCover cover;
    CoverCertificate certificate;
};

/* Mesh cover extracted from a gauge: for each n, D_n = {delta > 1/n} (exact
 * superlevel), tiled by closed cells of length < 1/(3n); the members are the
 * nonempty cell intersections with cl(D_n), split into even/odd sublevels so
 * each family is discrete.  The certificate samples in-member pairs of f and
 * records the maximal image diameter against the 3 eps/4 bound. */
GaugeCover cover_from_gauge(const Func& f, const Gauge& delta, const Rational& eps,
                            std::size_t n_levels = kDefaultLevels, std::uint64_t seed = 1);

/* Gauge for the constant-epsilon condition |x-y| < min{delta(x), delta(y)}
 * => |f(x)-f(y)| < eps.  Dispatch: jumpsum -> jumpsum_special; step -> the
 * canonical closed cover {(-inf,0]} + {[1/j, inf)}; one expression with a
 * Lipschitz certificate -> constant formula; piecewise -> pieces split until
 * each certified image diameter < 3 eps/4, then refine_cover.  The result is
 * validated on a seeded pair campaign before being returned. */
Gauge gauge_for_epsilon(const Func& f, const Rational& eps);

struct EpsilonSpec {
    static EpsilonSpec constant(const Rational& c);
    static EpsilonSpec function(Func f);
    std::optional<Rational> constant_value;
    std::optional<Func> fn; // positive piecewise/expr function of y
};

/* Variable-epsilon gauge: A_n = f^{-1}(eps^{-1}((2^-n, inf))), reduced to a
 * partition (B_n), a leveled cover refining the closed decompositions of the
 * B_n, and U(x) = V(x) intersect ball(x, delta_n(x)) for x in B_n, where
 * delta_n = gauge_for_epsilon(f, 2^-n).  The gauge is the composite
 * min(delta_V(x), delta_{n(x)}(x)). */
std::pair<NeighborhoodMap, Gauge> variable_gauge(const Func& f, const EpsilonSpec& eps);

struct ReductionPartition {
    std::vector<RSet> input;
    std::vector<RSet> output;
    void validate() const; // exact: disjoint, contained, union-preserving, ambiguous
};

/* Classical reduction: B_n = A_n minus the earlier A_j, exactly.  Inputs must
 * classify F_sigma; outputs must classify ambiguous (both F_sigma and
 * G_delta), else UnrepresentableResult. */
ReductionPartition reduction_partition(const std::vector<RSet>& a);

// JSON mirrors of the value types above (gauges are callable, not data, and
// stay out).  Keys follow the field names; rationals render as exact strings.
void to_json(nlohmann::json& j, const SigmaDiscreteCover& c);
void to_json(nlohmann::json& j, const CoverCertificate& c);
void to_json(nlohmann::json& j, const GaugeCover& g);
void to_json(nlohmann::json& j, const ReductionPartition& p);

} // namespace baire
