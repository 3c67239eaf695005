// SPDX-License-Identifier: Apache-2.0
#pragma once

// Extension of a function from a functionally open set to the whole line and
// the stable-sequence <-> piecewise-cover conversions.

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "baire/func.hpp"

namespace baire {

// Default truncation depth for stabilization scans and set intersections.
inline constexpr std::size_t kStableHorizon = 64;

/* Extension data: G open, phi a continuity-safe expression with
 * G = phi^{-1}((0,1]) on the window, continuous approximants of g on G, and
 * the anchor value y0 used off G.  The homotopy is fixed to the straight
 * line gamma(y, t) = (1-t)*y + t*y0, so it never appears as data. */
struct ExtensionProblem {
    RSet g_set;    // open, interval-only
    AstPtr phi;    // 0 <= phi <= 1 on the window, vanishing exactly off g_set
    FuncSeq g_seq; // approximants of the function to extend; generator in x, n
    Rational y0;
    Interval window; // compact working interval

    /* Sampled + exact-endpoint validation: phi stays in [0,1] on seeded
     * window points, phi > 0 on sampled g_set points, phi = 0 exactly on
     * sampled complement points and at every finite endpoint of g_set.
     * Throws InputError with the offending detail. */
    void validate(std::uint64_t seed = 1) const;
};

/* extend_from_open's result: the extension sequence as a closed form in x
 * and n, plus the two cutoff expressions it is assembled from.  psi1 is 1
 * exactly where phi = 0 and positive exactly on {phi < 1/(n+3)}; psi2 is 1
 * exactly on {phi >= 1/(n+1)} and positive exactly on {phi > 1/(n+2)}. */
struct Extension {
    FuncSeq seq; // mode = pointwise; limit_hint = g on g_set, y0 off it
    AstPtr psi1; // in x and n
    AstPtr psi2; // in x and n
    Interval window;

    Func term(std::size_t n) const; // n-th instantiated term, n >= 1
};

/* Builds the sequence f_n = psi2*g_n + (1 - psi2)*y0: each term is
 * continuous, equals y0 exactly wherever psi2 vanishes (in particular off
 * g_set at every index), and converges pointwise to g on g_set.  Validates
 * the problem first; CarrierGap reports a sample point missed by both
 * cutoff carriers and the default branch (impossible for valid phi). */
Extension extend_from_open(const ExtensionProblem& p);

/* A sequence of full functions, for terms that have no single closed form
 * in n (piecewise terms with index-dependent domains).  Terms are built on
 * demand by a pure generator, so values are safe to evaluate concurrently. */
class TermSeq {
  public:
    TermSeq(SeqMode mode, Interval window, std::function<Func(std::size_t)> make);

    // Wraps a closed-form sequence: term(n) = generator with n substituted.
    static TermSeq from_formula(const FuncSeq& seq, const Interval& window);

    SeqMode mode() const { return mode_; }
    const Interval& window() const { return window_; }
    Func term(std::size_t n) const; // 1-based

  private:
    SeqMode mode_;
    Interval window_;
    std::function<Func(std::size_t)> make_;
};

/* Continuous stable approximants of an ordered list of closed pieces: the
 * n-th term agrees with the pieces' values on the union of the first n
 * domains and interpolates linearly across each complementary gap (constant
 * past half-infinite gaps).  The union need not cover the window - the list
 * is a truncated decomposition and the sequence freezes once it is spent.
 * Pieces must agree on overlaps (checked at seeded points). */
TermSeq stable_sequence(std::vector<PieceFn> pieces, const Interval& window,
                        std::uint64_t seed = 1);
// Piecewise functions use their own pieces; the step builtin uses its
// canonical nested closed pieces.  Other variants are rejected.
TermSeq stable_sequence(const Func& f);

// Canonical closed pieces for step: P_n = (-inf,0] u [1/n,inf), n = 1..count.
std::vector<PieceFn> step_stable_pieces(std::size_t count = kStableHorizon);

/* Per-point stabilization scan: for each seeded sample x, the least index k
 * with term_m(x) = f(x) for all m in [k, horizon] (exact when both values
 * are rational, within the snap tolerance otherwise). */
struct StabilizationSample {
    Rational x;
    bool stabilized = false;
    std::size_t index = 0; // least such k when stabilized
};
struct StabilityReport {
    std::size_t horizon = kStableHorizon;
    std::size_t stabilized_count = 0;
    std::size_t max_index = 0; // over stabilized samples
    std::vector<StabilizationSample> points;
};
StabilityReport stable_check(const TermSeq& seq, const Func& f, std::size_t samples = 1000,
                             std::size_t horizon = kStableHorizon, std::uint64_t seed = 1);

/* Exact piecewise-linear reading of an expression: breaks b_1 < ... < b_m
 * split the line into m+1 segments and segs[i] = (A, B) means A + B*x on
 * the i-th.  The fragment that linearizes (constants, x, sums, constant
 * multiples and divisors, neg, abs, min, max, clamp) only produces
 * continuous functions, so the form carries no continuity flags. */
struct PiecewiseLinear {
    std::vector<Rational> breaks;
    std::vector<std::pair<Rational, Rational>> segs; // size = breaks.size() + 1

    Rational at(const Rational& x) const;
};
// nullopt when e leaves the linear fragment (sin, exp, pow, products of two
// non-constants, division by a non-constant, dist, call, the variable n).
std::optional<PiecewiseLinear> linearize(const AstPtr& e);

/* Exact equality set {x in region : a(x) = b(x)}.  Identical expressions
 * resolve to the region; linearizable pairs resolve through the difference's
 * root set; otherwise a strict-sign range certificate for a - b over the
 * region resolves to the empty set, and anything else throws Unresolvable. */
RSet equality_set(const AstPtr& a, const AstPtr& b, const RSet& region);

/* Stabilization sets of a sequence: X_kn = {x : term_k(x) = term_n(x)} for
 * n <= k <= horizon and X_n = the intersection of X_kn over k in
 * [n, horizon] (a truncated stand-in for the full tail intersection). */
struct StabilizationSets {
    std::size_t horizon = kStableHorizon;
    std::vector<RSet> x_n;                                     // x_n[i] = X_{i+1}
    std::map<std::pair<std::size_t, std::size_t>, RSet> x_kn;  // keys k >= n
    std::string truncation;

    const RSet& x(std::size_t k, std::size_t n) const; // symmetric accessor
    bool monotone() const;                             // X_n subset of X_{n+1}
};
StabilizationSets pieces_from_stable(const TermSeq& seq, std::size_t horizon = kStableHorizon);

void to_json(nlohmann::json& j, const StabilityReport& r);
void to_json(nlohmann::json& j, const StabilizationSets& s);

/* Spot continuity check: |f(x+h) - f(x)| <= L*h (plus float slack) at seeded
 * window points, with L derived from interval analysis of the expression(s).
 * A missing Lipschitz certificate fails the check with a detail note. */
struct LipschitzReport {
    bool passed = false;
    double lip = 0.0;
    double worst_ratio = 0.0; // max |df| / (L*h)
    std::size_t tested = 0;
    std::optional<std::string> detail;
};
LipschitzReport lipschitz_spot_check(const Func& f, std::size_t samples = 1000,
                                     std::uint64_t seed = 1);

} // namespace baire
