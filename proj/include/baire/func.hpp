// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "baire/ast.hpp"
#include "baire/interval.hpp"
#include "baire/parser.hpp"
#include "baire/rset.hpp"

namespace baire {

// Index at which limit-variant functions are sampled.
inline constexpr std::size_t kNEval = 1024;
// Default oscillation schedule: window radii 2^-k for k = 1..kOscDepth.
inline constexpr int kOscDepth = 12;
inline constexpr std::size_t kOscSamples = 32;

struct PieceFn {
    RSet domain; // closed
    AstPtr expr; // continuity-safe
};

// Optional exact evaluator for a sequence's limit (empty = unknown).
using LimitEval = std::function<Value(const Value&)>;

struct FuncSeq {
    AstPtr generator; // expression in x and n
    SeqMode mode = SeqMode::pointwise;
    LimitEval limit_hint; // when set, limit-variant evaluation uses it directly
};

/* Evaluation result.  warning carries approximation labels (pointwise limits,
 * uniform tail estimates); it never signals an error. */
struct EvalResult {
    Value value;
    std::optional<std::string> warning;
    double to_double() const { return value_to_double(value); }
    Rational rational() const { return std::get<Rational>(value); }
    bool exact() const { return value_is_rational(value); }
};

/* A function R -> R in one of four forms: piecewise with closed domains,
 * pointwise/stable/uniform limit of a closed-form sequence, named builtin, or
 * a bare total expression.  Values are immutable; evaluation is pure.
 *
 * Two evaluation channels realize the countable-enumeration builtins:
 *   - the exact channel (Rational argument) consults tail tags, so dirichlet
 *     is 1 at every rational of (0,1);
 *   - the float channel (double argument) snaps its input and decides
 *     enumeration membership by the truncated prefix, so a non-hit stands in
 *     for an irrational point. */
class Func {
  public:
    enum class Kind { piecewise, limit, builtin, expr };

    static Func piecewise(std::vector<PieceFn> pieces, Interval window);
    static Func limit(FuncSeq seq, Interval window);
    // name in {riemann, dirichlet, jumpsum, step}; param = jumpsum's N
    // (1..62); trunc = enumeration depth for riemann/dirichlet realizations.
    static Func builtin(const std::string& name, std::size_t param, Interval window,
                        std::size_t trunc = 1000);
    static Func expr(AstPtr e, Interval window);

    // Look a definition up by name in a parsed program (func, limit or
    // builtin form) and lift it.
    static Func from_program(const Program& prog, const std::string& name, Interval window,
                             std::size_t trunc = 1000);

    Kind kind() const { return kind_; }
    const Interval& window() const { return window_; }
    std::size_t trunc() const { return trunc_; }

    const std::vector<PieceFn>& pieces() const; // piecewise
    const FuncSeq& seq() const;                 // limit
    const std::string& builtin_name() const;    // builtin
    std::size_t builtin_param() const;          // builtin
    const AstPtr& expr_ast() const;             // expr

    EvalResult evaluate(const Rational& x) const; // exact channel
    EvalResult evaluate(double x) const;          // float channel

    /* Structural checks: every piece domain closed, the window covered by the
     * union of domains, and overlapping pieces agreeing at 10^3 seeded overlap
     * points (exactly where rational-closed, within snap tolerance otherwise).
     * Throws InputError with the offending detail. */
    void validate(std::uint64_t seed) const;

    // Points adversarial samplers should always include: piece boundaries,
    // jump points, leading enumeration values (capped).
    std::vector<Rational> special_points() const;

    std::string describe() const;

  private:
    Func() = default;

    Kind kind_ = Kind::expr;
    Interval window_ = Interval::closed(Rational(-1), Rational(1));
    std::size_t trunc_ = 1000;

    std::vector<PieceFn> pieces_;
    std::optional<FuncSeq> seq_;
    std::string bname_;
    std::size_t bparam_ = 0;
    AstPtr expr_;

    // jumpsum tables: jump points ascending with exact partial sums.
    std::vector<Rational> jump_vals_;
    std::vector<Rational> jump_sums_; // jump_sums_[i] = value on [jump_vals_[i], next)

    EvalResult eval_builtin(const Rational& x, bool exact_channel) const;
};

/* Exact-where-possible preimage f^{-1}(V) for open V.  Constant and affine
 * pieces and all builtins solve in closed form; other pieces fall back to
 * Lipschitz-certified grid scanning with sign-change bisection, and every
 * residual root bracket is reported in `uncertain` (each of width <= 2^-40).
 * Throws InputError for a limit variant or non-open V, Unresolvable when a
 * piece admits no certificate. */
struct Preimage {
    RSet set;
    ClassTags tags;
    std::vector<Interval> uncertain;
    std::optional<std::string> note;
};
Preimage preimage(const Func& f, const RSet& v);

/* Like preimage, but V need not be open: builtins and constant/affine pieces
 * solve any interval target exactly; the scan path keeps its uncertainty
 * semantics (a boundary value attained inside a band stays uncertain).  This
 * is the entry point for composing threshold preimages through f. */
Preimage preimage_general(const Func& f, const RSet& v);

/* Sampled oscillation around x: windows (x - 2^-k, x + 2^-k), k = 1..depth.
 * Sample sets nest (deeper windows contribute their points to shallower
 * ones), so est is non-increasing in k by construction, and every entry is an
 * attained lower bound for the true oscillation over that window. */
struct OscillationEstimate {
    Rational x;
    std::vector<double> radii;
    std::vector<double> est;
    bool monotone = true;
};
OscillationEstimate oscillation(const Func& f, const Rational& x, int depth = kOscDepth,
                                std::size_t samples = kOscSamples, std::uint64_t seed = 1);

/* Search F (intersected with the window) for a point whose restriction
 * oscillation estimate is below eps.  The estimate only samples points of F.
 * Budget exhaustion yields found = false; that verdict never claims
 * nonexistence.  Tail-bearing F is a truncated stand-in for a countable
 * subspace and the verdict is labeled accordingly. */
struct ScanVerdict {
    bool found = false;
    Rational witness{0};
    double est = 0.0;
    std::size_t tested = 0;
    std::string label; // "exact-subsets" | "truncated-subspace"
};
ScanVerdict barely_continuity_scan(const Func& f, const RSet& F, const Rational& eps,
                                   std::size_t budget = 10000, std::uint64_t seed = 1);

} // namespace baire
