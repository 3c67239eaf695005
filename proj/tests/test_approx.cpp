// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "baire/approx.hpp"
#include "baire/errors.hpp"
#include "baire/parser.hpp"
#include "baire/sampling.hpp"

using namespace baire;

namespace {

const Interval kWin = Interval::closed(Rational(-2), Rational(2));

ExtensionProblem tent_problem() {
    ExtensionProblem p;
    p.g_set = RSet(Interval::open(Rational(0), Rational(1)));
    p.phi = parse_expr("clamp(2 * min(x, 1 - x), 0, 1)");
    p.g_seq = FuncSeq{parse_expr("x"), SeqMode::pointwise, {}};
    p.y0 = Rational(5);
    p.window = kWin;
    return p;
}

Rational rat(const Value& v) {
    REQUIRE(value_is_rational(v));
    return std::get<Rational>(v);
}

RSet half_left_closed(std::int64_t num, std::int64_t den = 1) {
    return RSet(Interval::make(std::nullopt, false, Rational(num, den), true));
}

RSet half_right_closed(std::int64_t num, std::int64_t den = 1) {
    return RSet(Interval::make(Rational(num, den), true, std::nullopt, false));
}

} // namespace

TEST_CASE("extension problems validate their data") {
    CHECK_NOTHROW(tent_problem().validate());

    ExtensionProblem p = tent_problem();
    p.phi = parse_expr("x");
    CHECK_THROWS_WITH_AS(p.validate(), doctest::Contains("leaves [0,1]"), InputError);

    p = tent_problem();
    p.g_set = RSet(Interval::open(Rational(0), Rational(2))); // phi dies inside
    CHECK_THROWS_WITH_AS(p.validate(), doctest::Contains("vanishes on the open set"), InputError);

    p = tent_problem();
    p.g_set = RSet(Interval::open(Rational(-1), Rational(1))); // phi > 0 only on (0,1)
    CHECK_THROWS_WITH_AS(p.validate(), doctest::Contains("vanishes on the open set"), InputError);

    p = tent_problem();
    p.phi = parse_expr("clamp(2 * min(x, 1 - x), 0, 1) + 1/4"); // positive off the set
    CHECK_THROWS_WITH_AS(p.validate(), doctest::Contains("not exactly zero"), InputError);

    p = tent_problem();
    p.g_set = RSet(Interval::closed(Rational(0), Rational(1)));
    CHECK_THROWS_WITH_AS(p.validate(), doctest::Contains("not open"), InputError);

    p = tent_problem();
    p.g_set = RSet::empty();
    CHECK_THROWS_WITH_AS(p.validate(), doctest::Contains("empty"), InputError);

    p = tent_problem();
    p.phi = make_call("mystery", make_var("x"));
    CHECK_THROWS_WITH_AS(p.validate(), doctest::Contains("continuity-safe"), InputError);

    p = tent_problem();
    p.phi = make_node(NodeKind::clamp, {make_node(NodeKind::mul, {make_var("n"), make_var("x")}),
                                        make_const(Rational(0)), make_const(Rational(1))});
    CHECK_THROWS_WITH_AS(p.validate(), doctest::Contains("x only"), InputError);

    p = tent_problem();
    p.window = Interval::make(std::nullopt, false, Rational(2), true);
    CHECK_THROWS_WITH_AS(p.validate(), doctest::Contains("compact"), InputError);
}

TEST_CASE("extension cutoffs hit their exact thresholds") {
    Extension ext = extend_from_open(tent_problem());
    // phi(x) = 2x left of the tent peak, so phi crosses 1/(n+1), 1/(n+2),
    // 1/(n+3) at x = 1/(2n+2), 1/(2n+4), 1/(2n+6).
    for (std::int64_t n : {1, 3, 7}) {
        EvalEnv env;
        env.n = Value{Rational(n)};
        env.x = Value{Rational(1, 2 * n + 2)};
        CHECK(rat(eval_ast(ext.psi2, env)) == Rational(1)); // phi = 1/(n+1): psi2 saturates
        env.x = Value{Rational(1, 2 * n + 4)};
        CHECK(rat(eval_ast(ext.psi2, env)) == Rational(0)); // phi = 1/(n+2): psi2 vanishes
        env.x = Value{Rational(1, 2 * n + 6)};
        CHECK(rat(eval_ast(ext.psi1, env)) == Rational(0)); // phi = 1/(n+3): psi1 vanishes
        env.x = Value{Rational(0)};
        CHECK(rat(eval_ast(ext.psi1, env)) == Rational(1)); // phi = 0: psi1 saturates
    }

    // Sampled preimage equivalences: psi1 > 0 iff phi < 1/(n+3), psi1 = 1 iff
    // phi = 0, psi2 > 0 iff phi > 1/(n+2), psi2 = 1 iff phi >= 1/(n+1).
    const AstPtr phi = tent_problem().phi;
    for (std::int64_t n : {1, 4}) {
        EvalEnv env;
        env.n = Value{Rational(n)};
        for (const auto& x : dyadic_grid(Rational(-2), Rational(2), 8)) {
            env.x = Value{x};
            const Rational ph = rat(eval_ast(phi, env));
            const Rational p1 = rat(eval_ast(ext.psi1, env));
            const Rational p2 = rat(eval_ast(ext.psi2, env));
            CHECK((p1.sign() > 0) == (ph < Rational(1, n + 3)));
            CHECK((p1 == Rational(1)) == (ph.sign() == 0));
            CHECK((p2.sign() > 0) == (ph > Rational(1, n + 2)));
            CHECK((p2 == Rational(1)) == (ph >= Rational(1, n + 1)));
        }
    }
}

TEST_CASE("extension terms are exactly the anchor off the set at every index") {
    Extension ext = extend_from_open(tent_problem());
    const RSet g = tent_problem().g_set;
    for (std::size_t n : {1u, 2u, 7u, 20u}) {
        Func t = ext.term(n);
        // Boundary points of the open set included: phi vanishes there.
        for (const Rational& x :
             {Rational(-1), Rational(0), Rational(1), Rational(3, 2), Rational(2)})
            CHECK(rat(t.evaluate(x).value) == Rational(5));
    }
    SplitMix64 rng(7);
    Func t5 = ext.term(5);
    std::size_t off = 0;
    for (std::size_t i = 0; i < 2000; ++i) {
        Rational x = dyadic_pick(rng, Rational(-2), Rational(2), 16);
        if (g.member(x))
            continue;
        ++off;
        CHECK(rat(t5.evaluate(x).value) == Rational(5));
    }
    CHECK(off > 600);
}

TEST_CASE("extension terms converge to the approximated function on the set") {
    Extension ext = extend_from_open(tent_problem());
    // Midpoint value is already exact at every index.
    for (std::size_t n = 1; n <= 40; ++n)
        CHECK(rat(ext.term(n).evaluate(Rational(1, 2)).value) == Rational(1, 2));

    // On the set: values stay on the segment between g(x) and y0, the error
    // never increases with n, and it is exactly zero once phi >= 1/(n+1).
    const AstPtr phi = tent_problem().phi;
    SplitMix64 rng(11);
    std::size_t exact_checked = 0;
    for (std::size_t i = 0; i < 400; ++i) {
        Rational x = dyadic_pick(rng, Rational(0), Rational(1), 12);
        if (!(Rational(0) < x && x < Rational(1)))
            continue;
        const Rational g = x;
        Rational prev_err(-1);
        for (std::size_t n = 1; n <= 30; ++n) {
            const Rational v = rat(ext.term(n).evaluate(x).value);
            CHECK(v >= min(g, Rational(5)));
            CHECK(v <= max(g, Rational(5)));
            const Rational err = (v - g).abs();
            if (prev_err.sign() >= 0)
                CHECK(err <= prev_err);
            prev_err = err;
        }
        const Rational ph = rat(eval_at(phi, x));
        // Least n with phi >= 1/(n+1), i.e. n >= 1/phi - 1.
        std::int64_t nstar = 1;
        while (ph < Rational(1, nstar + 1))
            ++nstar;
        if (nstar <= 4096) {
            CHECK(rat(ext.term(std::size_t(nstar)).evaluate(x).value) == g);
            if (nstar > 1)
                CHECK(rat(ext.term(std::size_t(nstar) - 1).evaluate(x).value) != g);
            ++exact_checked;
        }
    }
    CHECK(exact_checked > 300);
}

TEST_CASE("extension sequence carries an exact limit evaluator") {
    Extension ext = extend_from_open(tent_problem());
    REQUIRE(bool(ext.seq.limit_hint));
    CHECK(ext.seq.mode == SeqMode::pointwise);
    CHECK(rat(ext.seq.limit_hint(Value{Rational(1, 2)})) == Rational(1, 2));
    CHECK(rat(ext.seq.limit_hint(Value{Rational(-1)})) == Rational(5));
    CHECK(rat(ext.seq.limit_hint(Value{Rational(3, 2)})) == Rational(5));
    CHECK(rat(ext.seq.limit_hint(Value{Rational(0)})) == Rational(5)); // boundary: off the set

    // The limit variant consumes the hint: exact value, no convergence caveat.
    Func lim = Func::limit(ext.seq, kWin);
    EvalResult r = lim.evaluate(Rational(1, 4));
    CHECK(rat(r.value) == Rational(1, 4));
    CHECK(!r.warning.has_value());
    EvalResult off = lim.evaluate(Rational(-1));
    CHECK(rat(off.value) == Rational(5));
    CHECK(!off.warning.has_value());
}

TEST_CASE("extension terms pass the continuity spot check") {
    Extension ext = extend_from_open(tent_problem());
    for (std::size_t n : {1u, 4u, 16u}) {
        LipschitzReport rep = lipschitz_spot_check(ext.term(n), 800, 3);
        CHECK(rep.passed);
        CHECK(rep.lip > 0.0);
        CHECK(rep.tested == 800);
    }
}

TEST_CASE("step's stable terms are the clamped ramps") {
    TermSeq seq = stable_sequence(Func::builtin("step", 0, kWin));
    CHECK(seq.mode() == SeqMode::stable);

    Func t10 = seq.term(10);
    CHECK_NOTHROW(t10.validate(1));
    CHECK(t10.pieces().size() == 11); // ten source pieces plus one gap fill
    CHECK(rat(t10.evaluate(Rational(-1)).value) == Rational(0));
    CHECK(rat(t10.evaluate(Rational(0)).value) == Rational(0));
    CHECK(rat(t10.evaluate(Rational(1, 20)).value) == Rational(1, 2)); // ramp midpoint
    CHECK(rat(t10.evaluate(Rational(1, 15)).value) == Rational(2, 3)); // 10 * (1/15)
    CHECK(rat(t10.evaluate(Rational(1, 10)).value) == Rational(1));
    CHECK(rat(t10.evaluate(Rational(2)).value) == Rational(1));

    for (std::size_t n : {1u, 5u, 64u})
        CHECK_NOTHROW(seq.term(n).validate(1));
    CHECK(rat(seq.term(1).evaluate(Rational(1, 2)).value) == Rational(1, 2));

    // f_n(1/(2n)) = 1/2 along the whole sequence.
    for (std::int64_t n : {3, 10, 32})
        CHECK(rat(seq.term(std::size_t(n)).evaluate(Rational(1, 2 * n)).value) == Rational(1, 2));

    for (std::size_t n : {2u, 9u, 33u}) {
        LipschitzReport rep = lipschitz_spot_check(seq.term(n), 600, 5);
        CHECK(rep.passed);
        CHECK(rep.lip == doctest::Approx(double(n)));
    }
}

TEST_CASE("stabilization index at 1/10 is exactly ten") {
    TermSeq seq = stable_sequence(step_stable_pieces(), kWin);
    const Rational x(1, 10);
    for (std::size_t m = 1; m <= 20; ++m) {
        const Rational v = rat(seq.term(m).evaluate(x).value);
        if (m >= 10)
            CHECK(v == Rational(1));
        else
            CHECK(v == Rational(std::int64_t(m), 10));
    }
    // x = -1 never moves.
    for (std::size_t m : {1u, 2u, 50u})
        CHECK(rat(seq.term(m).evaluate(Rational(-1)).value) == Rational(0));
}

TEST_CASE("stable_check sees full stabilization for step") {
    TermSeq seq = stable_sequence(Func::builtin("step", 0, kWin));
    Func f = Func::builtin("step", 0, kWin);
    StabilityReport rep = stable_check(seq, f, 200, 64, 1);
    CHECK(rep.points.size() == 33); // the 1/8 lattice over [-2,2]
    CHECK(rep.stabilized_count == rep.points.size());
    CHECK(rep.max_index == 8); // ceil(1 / min positive sample) = ceil(8)
    for (const auto& s : rep.points) {
        if (s.x == Rational(-1))
            CHECK(s.index == 1);
        if (s.x == Rational(0))
            CHECK(s.index == 1);
        if (s.x == Rational(1, 8))
            CHECK(s.index == 8);
        if (s.x == Rational(3, 8))
            CHECK(s.index == 3); // ceil(8/3)
    }
}

TEST_CASE("pointwise-only sequences stabilize nowhere but the fixed point") {
    TermSeq seq =
        TermSeq::from_formula(FuncSeq{parse_expr("x / n"), SeqMode::pointwise, {}}, kWin);
    Func zero = Func::expr(parse_expr("0"), kWin);
    StabilityReport rep = stable_check(seq, zero, 200, 32, 1);
    CHECK(rep.stabilized_count == 1); // only x = 0
    for (const auto& s : rep.points) {
        CHECK(s.stabilized == (s.x == Rational(0)));
        if (s.stabilized)
            CHECK(s.index == 1);
    }
}

TEST_CASE("constant sequences stabilize instantly and everywhere") {
    TermSeq seq = TermSeq::from_formula(FuncSeq{parse_expr("3"), SeqMode::stable, {}}, kWin);
    Func three = Func::expr(parse_expr("3"), kWin);
    StabilityReport rep = stable_check(seq, three, 50, 16, 1);
    CHECK(rep.stabilized_count == rep.points.size());
    CHECK(rep.max_index == 1);

    StabilizationSets sets = pieces_from_stable(seq, 6);
    CHECK(sets.x(5, 2) == RSet::whole());
    CHECK(sets.x_n[0] == RSet::whole());
    CHECK(sets.monotone());
}

TEST_CASE("one-piece sources make every term the function itself") {
    std::vector<PieceFn> pieces{{RSet::whole(), parse_expr("x * x")}};
    TermSeq seq = stable_sequence(pieces, kWin);
    for (std::size_t n : {1u, 7u}) {
        Func t = seq.term(n);
        CHECK(t.pieces().size() == 1);
        CHECK(rat(t.evaluate(Rational(3, 2)).value) == Rational(9, 4));
    }
}

TEST_CASE("stabilization sets of the step sequence recover the source pieces") {
    TermSeq seq = stable_sequence(Func::builtin("step", 0, kWin));
    StabilizationSets sets = pieces_from_stable(seq, 16);

    for (std::int64_t n : {1, 2, 5, 15}) {
        RSet expect = set_union(half_left_closed(0), half_right_closed(1, n));
        CHECK(sets.x_n[std::size_t(n) - 1] == expect);
        CHECK(sets.x_n[std::size_t(n) - 1].classify().closed);
    }
    // The last index has an empty tail intersection: a truncation artifact.
    CHECK(sets.x_n[15] == RSet::whole());
    CHECK(sets.truncation.find("16") != std::string::npos);

    CHECK(sets.x(7, 3) == set_union(half_left_closed(0), half_right_closed(1, 3)));
    CHECK(sets.x(3, 7) == sets.x(7, 3)); // symmetric accessor
    CHECK(sets.x(3, 3) == RSet::whole());
    CHECK(sets.monotone());
    CHECK_THROWS_AS(sets.x(17, 3), InputError);

    // Round-trip: each source piece lands inside X_n from its index on.
    std::vector<PieceFn> pieces = step_stable_pieces();
    for (std::size_t n : {1u, 4u, 15u})
        for (std::size_t i = 0; i < n; ++i)
            CHECK(subset(pieces[i].domain, sets.x_n[n - 1]));
}

TEST_CASE("stabilization sets of x/n are the origin") {
    TermSeq seq =
        TermSeq::from_formula(FuncSeq{parse_expr("x / n"), SeqMode::pointwise, {}}, kWin);
    StabilizationSets sets = pieces_from_stable(seq, 8);
    for (std::size_t n : {1u, 3u, 7u}) {
        CHECK(sets.x_n[n - 1] == RSet::point(Rational(0)));
        CHECK(sets.x_n[n - 1].classify().closed);
    }
    CHECK(sets.x(5, 3) == RSet::point(Rational(0)));
    CHECK(sets.x(4, 4) == RSet::whole());
    CHECK(sets.monotone());
}

TEST_CASE("gap fills bridge between pieces and extend constantly past the ends") {
    std::vector<PieceFn> pieces{{RSet(Interval::closed(Rational(-3), Rational(-1))),
                                 parse_expr("x")},
                                {RSet(Interval::closed(Rational(1), Rational(3))),
                                 parse_expr("x * x")}};
    TermSeq seq = stable_sequence(pieces, kWin);

    Func t1 = seq.term(1);
    CHECK(rat(t1.evaluate(Rational(0)).value) == Rational(-1));  // constant past -1
    CHECK(rat(t1.evaluate(Rational(-2)).value) == Rational(-2)); // on the piece

    Func t2 = seq.term(2);
    CHECK(rat(t2.evaluate(Rational(0)).value) == Rational(0)); // bridge (-1,-1) -> (1,1) is x
    CHECK(rat(t2.evaluate(Rational(1, 2)).value) == Rational(1, 2));
    CHECK(rat(t2.evaluate(Rational(2)).value) == Rational(4));

    // Equality set of the two terms: everything left of the first gap end,
    // resolved by a mix of linear roots and sign certificates (x^2 piece).
    StabilizationSets sets = pieces_from_stable(seq, 2);
    CHECK(sets.x(2, 1) == half_left_closed(-1));
}

TEST_CASE("stable_sequence rejects malformed piece lists") {
    CHECK_THROWS_WITH_AS(stable_sequence({}, kWin, 1), doctest::Contains("at least one"),
                         InputError);

    std::vector<PieceFn> open_piece{{RSet(Interval::open(Rational(0), Rational(1))),
                                     parse_expr("x")}};
    CHECK_THROWS_WITH_AS(stable_sequence(open_piece, kWin, 1), doctest::Contains("not closed"),
                         InputError);

    std::vector<PieceFn> with_n{{RSet::whole(), parse_expr("n * x")}};
    CHECK_THROWS_WITH_AS(stable_sequence(with_n, kWin, 1), doctest::Contains("x-expression"),
                         InputError);

    std::vector<PieceFn> enum_dom{
        {RSet::with_enum({Interval::closed(Rational(5), Rational(6))}, Polarity::add, 8),
         parse_expr("x")}};
    CHECK_THROWS_WITH_AS(stable_sequence(enum_dom, kWin, 1), doctest::Contains("interval-only"),
                         InputError);

    std::vector<PieceFn> disagree{{RSet(Interval::closed(Rational(0), Rational(2))),
                                   parse_expr("x")},
                                  {RSet(Interval::closed(Rational(1), Rational(3))),
                                   parse_expr("2 * x")}};
    CHECK_THROWS_WITH_AS(stable_sequence(disagree, kWin, 1), doctest::Contains("disagrees"),
                         InputError);

    CHECK_THROWS_WITH_AS(stable_sequence(Func::builtin("jumpsum", 6, kWin)),
                         doctest::Contains("no canonical piece list"), InputError);
    CHECK_THROWS_WITH_AS(stable_sequence(Func::expr(parse_expr("x"), kWin)),
                         doctest::Contains("piecewise source"), InputError);
}

TEST_CASE("term sequences are 1-based and validate their formulas") {
    TermSeq seq = TermSeq::from_formula(FuncSeq{parse_expr("x / n"), SeqMode::pointwise, {}}, kWin);
    CHECK_THROWS_AS(seq.term(0), InputError);
    CHECK(rat(seq.term(4).evaluate(Rational(1)).value) == Rational(1, 4));

    CHECK_THROWS_WITH_AS(TermSeq::from_formula(FuncSeq{nullptr, SeqMode::pointwise, {}}, kWin),
                         doctest::Contains("no generator"), InputError);
    CHECK_THROWS_WITH_AS(
        TermSeq::from_formula(FuncSeq{make_call("f", make_var("x")), SeqMode::pointwise, {}},
                              kWin),
        doctest::Contains("continuity-safe"), InputError);
}

TEST_CASE("linearize reads the exact piecewise-linear form") {
    auto pl = linearize(parse_expr("clamp(5 * x, 0, 1)"));
    REQUIRE(pl.has_value());
    REQUIRE(pl->breaks.size() == 2);
    CHECK(pl->breaks[0] == Rational(0));
    CHECK(pl->breaks[1] == Rational(1, 5));
    REQUIRE(pl->segs.size() == 3);
    CHECK(pl->segs[0] == std::pair{Rational(0), Rational(0)});
    CHECK(pl->segs[1] == std::pair{Rational(0), Rational(5)});
    CHECK(pl->segs[2] == std::pair{Rational(1), Rational(0)});
    CHECK(pl->at(Rational(1, 10)) == Rational(1, 2));
    CHECK(pl->at(Rational(-3)) == Rational(0));
    CHECK(pl->at(Rational(7)) == Rational(1));

    auto ab = linearize(parse_expr("abs(x)"));
    REQUIRE(ab.has_value());
    REQUIRE(ab->breaks.size() == 1);
    CHECK(ab->breaks[0] == Rational(0));
    CHECK(ab->segs[0] == std::pair{Rational(0), Rational(-1)});
    CHECK(ab->segs[1] == std::pair{Rational(0), Rational(1)});

    auto mn = linearize(parse_expr("min(x, 2 - x)"));
    REQUIRE(mn.has_value());
    REQUIRE(mn->breaks.size() == 1);
    CHECK(mn->breaks[0] == Rational(1));
    CHECK(mn->segs[0] == std::pair{Rational(0), Rational(1)});
    CHECK(mn->segs[1] == std::pair{Rational(2), Rational(-1)});

    CHECK(!linearize(parse_expr("x * x")).has_value());
    CHECK(!linearize(parse_expr("1 / x")).has_value());
    CHECK(!linearize(parse_expr("sin(x)")).has_value());
    CHECK(!linearize(parse_expr("x / n")).has_value()); // n unresolved
    // Exact coefficients that overflow the representation refuse honestly.
    CHECK(!linearize(parse_expr("(1000000000000 * x) * 1000000000000")).has_value());
}

TEST_CASE("equality sets resolve linearly, by identity, or by sign certificate") {
    const RSet whole = RSet::whole();
    CHECK(equality_set(parse_expr("x"), parse_expr("2 * x"), whole) == RSet::point(Rational(0)));
    CHECK(equality_set(parse_expr("sin(x)"), parse_expr("sin(x)"), whole) == whole);

    const RSet tail = half_right_closed(1);
    CHECK(equality_set(parse_expr("sin(x)"), parse_expr("sin(x) + 2"), tail) == RSet::empty());
    CHECK_THROWS_AS(equality_set(parse_expr("0"), parse_expr("sin(x)"), tail), Unresolvable);

    // Clamped ramps agree exactly left of zero and from the later knee on.
    RSet agree = equality_set(parse_expr("clamp(7 * x, 0, 1)"), parse_expr("clamp(3 * x, 0, 1)"),
                              whole);
    CHECK(agree == set_union(half_left_closed(0), half_right_closed(1, 3)));
}

TEST_CASE("stabilization reports serialize deterministically") {
    TermSeq seq = stable_sequence(Func::builtin("step", 0, kWin));
    StabilityReport rep = stable_check(seq, Func::builtin("step", 0, kWin), 50, 16, 9);
    nlohmann::json jr = rep;
    CHECK(jr["horizon"] == 16);
    CHECK(jr["samples"] == rep.points.size());
    CHECK(jr["points"].is_array());

    StabilizationSets sets = pieces_from_stable(seq, 8);
    nlohmann::json js = sets;
    CHECK(js["horizon"] == 8);
    CHECK(js["x_n"].size() == 8);
    CHECK(js["x_kn"].size() == 36); // pairs with 8 >= k >= n >= 1
    nlohmann::json again = pieces_from_stable(seq, 8);
    CHECK(js.dump() == again.dump());
}

TEST_CASE("pieces_from_stable rejects terms outside the expression algebra") {
    TermSeq opaque(SeqMode::stable, kWin,
                   [](std::size_t) { return Func::builtin("step", 0, kWin); });
    CHECK_THROWS_AS(pieces_from_stable(opaque, 3), Unresolvable);
}

TEST_CASE("continuity spot check is honest about what it can certify") {
    LipschitzReport rep = lipschitz_spot_check(Func::builtin("step", 0, kWin), 100, 1);
    CHECK(!rep.passed);
    REQUIRE(rep.detail.has_value());
    CHECK(rep.detail->find("no expression") != std::string::npos);

    LipschitzReport flat = lipschitz_spot_check(Func::expr(parse_expr("3/4"), kWin), 200, 1);
    CHECK(flat.passed);
    CHECK(flat.lip == 0.0);
}
