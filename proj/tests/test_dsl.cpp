// SPDX-License-Identifier: MIT
// Lexer / parser / AST tests: frozen token streams, precedence, evaluation
// exactness against a big-rational oracle, and print/parse round trips.

#include <doctest.h>

#include <boost/multiprecision/cpp_int.hpp>
#include <cmath>
#include <cstring>
#include <optional>
#include <string>
#include <vector>

#include "baire/ast.hpp"
#include "baire/errors.hpp"
#include "baire/lexer.hpp"
#include "baire/parser.hpp"
#include "baire/rset.hpp"
#include "baire/sampling.hpp"

using baire::Ast;
using baire::AstPtr;
using baire::DomainError;
using baire::EvalEnv;
using baire::LexError;
using baire::NodeKind;
using baire::ParseError;
using baire::Rational;
using baire::RSet;
using baire::TokKind;
using baire::Token;
using baire::Value;

using BigQ = boost::multiprecision::cpp_rational;
using BigZ = boost::multiprecision::cpp_int;

namespace {

Rational evalQ(const AstPtr& e, const Rational& x) {
  Value v = baire::eval_at(e, x);
  REQUIRE(baire::value_is_rational(v));
  return std::get<Rational>(v);
}

double evalD(const AstPtr& e, double x) {
  EvalEnv env;
  env.x = Value{x};
  return baire::value_to_double(baire::eval_ast(e, env));
}

}  // namespace

TEST_CASE("tokenize frozen example: x^2 + 1/3") {
  auto toks = baire::tokenize("x^2 + 1/3");
  // Trailing eof sentinel follows the five real tokens.
  REQUIRE(toks.size() == 6);
  CHECK(toks[0].kind == TokKind::ident);
  CHECK(toks[0].lexeme == "x");
  CHECK(toks[1].kind == TokKind::op);
  CHECK(toks[1].lexeme == "^");
  CHECK(toks[2].kind == TokKind::number);
  CHECK(toks[2].lexeme == "2");
  CHECK(toks[3].kind == TokKind::op);
  CHECK(toks[3].lexeme == "+");
  CHECK(toks[4].kind == TokKind::number);
  CHECK(toks[4].lexeme == "1/3");
  CHECK(toks[5].kind == TokKind::eof);
}

TEST_CASE("tokenize empty input yields only eof") {
  auto toks = baire::tokenize("");
  REQUIRE(toks.size() == 1);
  CHECK(toks[0].kind == TokKind::eof);
  auto ws = baire::tokenize("   # comment only\n");
  REQUIRE(ws.size() == 1);
  CHECK(ws[0].kind == TokKind::eof);
}

TEST_CASE("tokenize piece header") {
  // Hand tokenization: piece | on | [ | 0 | , | 1 | ] | : | sin | ( | x | )
  // gives twelve tokens before the eof sentinel.
  auto toks = baire::tokenize("piece on [0,1]: sin(x)");
  REQUIRE(toks.size() == 13);
  CHECK(toks[0].kind == TokKind::keyword);
  CHECK(toks[0].lexeme == "piece");
  CHECK(toks[1].kind == TokKind::keyword);
  CHECK(toks[1].lexeme == "on");
  CHECK(toks[2].kind == TokKind::paren);
  CHECK(toks[3].lexeme == "0");
  CHECK(toks[4].kind == TokKind::comma);
  CHECK(toks[5].lexeme == "1");
  CHECK(toks[6].kind == TokKind::paren);
  CHECK(toks[7].kind == TokKind::op);
  CHECK(toks[7].lexeme == ":");
  CHECK(toks[8].kind == TokKind::ident);
  CHECK(toks[8].lexeme == "sin");
  CHECK(toks[12].kind == TokKind::eof);
}

TEST_CASE("lexer rejects stray characters with byte offset") {
  try {
    baire::tokenize("x $ y");
    FAIL("expected LexError");
  } catch (const LexError& e) {
    CHECK(std::strstr(e.what(), "at byte 2") != nullptr);
  }
  CHECK_THROWS_AS(baire::tokenize("a @ b"), LexError);
}

TEST_CASE("number lexing: integers, decimals, quotients") {
  auto toks = baire::tokenize("7 10.25 3/4");
  REQUIRE(toks.size() == 4);
  CHECK(toks[0].lexeme == "7");
  CHECK(toks[1].lexeme == "10.25");
  CHECK(toks[2].lexeme == "3/4");
  for (int i = 0; i < 3; ++i) CHECK(toks[i].kind == TokKind::number);
}

TEST_CASE("parse precedence: 2+3*x") {
  auto e = baire::parse_expr("2+3*x");
  auto want = baire::make_node(
      NodeKind::add,
      {baire::make_const(Rational(2)),
       baire::make_node(NodeKind::mul, {baire::make_const(Rational(3)),
                                        baire::make_var("x")})});
  CHECK(baire::ast_equal(e, want));
  CHECK(evalQ(e, Rational(4)) == Rational(14));
}

TEST_CASE("power is right-associative and binds above unary minus") {
  auto e = baire::parse_expr("2^3^2");
  CHECK(evalQ(e, Rational(0)) == Rational(512));
  // -2^2 parses as -(2^2).
  CHECK(evalQ(baire::parse_expr("-2^2"), Rational(0)) == Rational(-4));
  // 2^-3 is exact: 1/8.
  CHECK(evalQ(baire::parse_expr("2^-3"), Rational(0)) == Rational(1, 8));
  CHECK(evalQ(baire::parse_expr("(-2)^2"), Rational(0)) == Rational(4));
}

TEST_CASE("parse errors: unbalanced and malformed input") {
  CHECK_THROWS_AS(baire::parse_expr("min(x, 1-x"), ParseError);
  CHECK_THROWS_AS(baire::parse_expr("x +"), ParseError);
  CHECK_THROWS_AS(baire::parse_expr("(x"), ParseError);
  CHECK_THROWS_AS(baire::parse_expr("x y"), ParseError);
  CHECK_THROWS_AS(baire::parse_expr("clamp(x, 0)"), ParseError);
  CHECK_THROWS_AS(baire::parse_expr("abs(x, 1)"), ParseError);
  // Unknown bare identifier: only x and n are bound.
  CHECK_THROWS_AS(baire::parse_expr("y + 1"), ParseError);
}

TEST_CASE("evaluation frozen examples") {
  CHECK(evalQ(baire::parse_expr("2 + 3*x"), Rational(4)) == Rational(14));
  auto d = baire::parse_expr("dist([0,1])");
  CHECK(evalQ(d, Rational(2)) == Rational(1));
  CHECK(evalQ(d, Rational(1, 2)) == Rational(0));
  CHECK(evalQ(d, Rational(-3)) == Rational(3));
  CHECK_THROWS_AS(baire::eval_at(baire::parse_expr("1/x"), Rational(0)),
                  DomainError);
  CHECK_THROWS_AS(baire::eval_at(baire::parse_expr("0^-1"), Rational(0)),
                  DomainError);
}

TEST_CASE("rational arithmetic stays exact through the evaluator") {
  auto e = baire::parse_expr("(1/3 + 1/6) * 2");
  CHECK(evalQ(e, Rational(0)) == Rational(1));
  auto f = baire::parse_expr("x^2 - 1/9");
  CHECK(evalQ(f, Rational(1, 3)) == Rational(0));
  // min/max/abs/clamp are exact on rationals.
  CHECK(evalQ(baire::parse_expr("min(x, 1-x)"), Rational(1, 3)) ==
        Rational(1, 3));
  CHECK(evalQ(baire::parse_expr("max(x, 1-x)"), Rational(1, 3)) ==
        Rational(2, 3));
  CHECK(evalQ(baire::parse_expr("abs(1/2 - x)"), Rational(3, 4)) ==
        Rational(1, 4));
  CHECK(evalQ(baire::parse_expr("clamp(x, 0, 1)"), Rational(7, 2)) ==
        Rational(1));
  CHECK(evalQ(baire::parse_expr("clamp(x, 0, 1)"), Rational(-1, 2)) ==
        Rational(0));
}

TEST_CASE("transcendental nodes evaluate in double") {
  auto e = baire::parse_expr("sin(x)");
  CHECK(evalD(e, 0.0) == doctest::Approx(0.0));
  CHECK(evalD(e, 1.5707963267948966) == doctest::Approx(1.0));
  CHECK(evalD(baire::parse_expr("cos(x)"), 0.0) == doctest::Approx(1.0));
  CHECK(evalD(baire::parse_expr("exp(x)"), 1.0) ==
        doctest::Approx(2.718281828459045));
  // A rational argument to sin still produces a double value.
  Value v = baire::eval_at(baire::parse_expr("sin(x)"), Rational(1));
  CHECK(!baire::value_is_rational(v));
}

// ---------------------------------------------------------------------------
// Exactness oracle: evaluate rational-closed expressions with big rationals
// and require bit-identical agreement whenever the int64 path stays exact.
// ---------------------------------------------------------------------------

namespace {

std::optional<BigQ> eval_big(const AstPtr& e, const BigQ& x) {
  auto rec = [&](const AstPtr& k) { return eval_big(k, x); };
  switch (e->kind) {
    case NodeKind::constant:
      return BigQ(e->value.num(), e->value.den());
    case NodeKind::variable:
      return x;
    case NodeKind::add: {
      auto a = rec(e->kids[0]), b = rec(e->kids[1]);
      if (!a || !b) return std::nullopt;
      return *a + *b;
    }
    case NodeKind::sub: {
      auto a = rec(e->kids[0]), b = rec(e->kids[1]);
      if (!a || !b) return std::nullopt;
      return *a - *b;
    }
    case NodeKind::mul: {
      auto a = rec(e->kids[0]), b = rec(e->kids[1]);
      if (!a || !b) return std::nullopt;
      return *a * *b;
    }
    case NodeKind::div: {
      auto a = rec(e->kids[0]), b = rec(e->kids[1]);
      if (!a || !b || *b == 0) return std::nullopt;
      return *a / *b;
    }
    case NodeKind::pow: {
      auto a = rec(e->kids[0]), b = rec(e->kids[1]);
      if (!a || !b) return std::nullopt;
      if (boost::multiprecision::denominator(*b) != 1) return std::nullopt;
      BigZ n = boost::multiprecision::numerator(*b);
      bool inv = n < 0;
      if (inv) {
        if (*a == 0) return std::nullopt;
        n = -n;
      }
      BigQ acc = 1;
      for (; n > 0; --n) acc *= *a;
      return inv ? BigQ(1) / acc : acc;
    }
    case NodeKind::neg: {
      auto a = rec(e->kids[0]);
      if (!a) return std::nullopt;
      return -*a;
    }
    case NodeKind::min: {
      auto a = rec(e->kids[0]), b = rec(e->kids[1]);
      if (!a || !b) return std::nullopt;
      return *a < *b ? *a : *b;
    }
    case NodeKind::max: {
      auto a = rec(e->kids[0]), b = rec(e->kids[1]);
      if (!a || !b) return std::nullopt;
      return *a < *b ? *b : *a;
    }
    case NodeKind::abs: {
      auto a = rec(e->kids[0]);
      if (!a) return std::nullopt;
      return *a < 0 ? -*a : *a;
    }
    case NodeKind::clamp: {
      auto v = rec(e->kids[0]), lo = rec(e->kids[1]), hi = rec(e->kids[2]);
      if (!v || !lo || !hi) return std::nullopt;
      BigQ m = *v < *hi ? *v : *hi;
      return *lo < m ? m : *lo;
    }
    default:
      return std::nullopt;  // sin/cos/exp/dist/call: not rational-closed
  }
}

// Random rational-closed expression generator with bounded magnitude so the
// int64 path cannot overflow for most draws.
AstPtr gen_expr(baire::SplitMix64& rng, int depth) {
  auto small_const = [&] {
    int64_t num = static_cast<int64_t>(rng.bounded(19)) - 9;
    int64_t den = static_cast<int64_t>(rng.bounded(9)) + 1;
    return baire::make_const(Rational(num, den));
  };
  if (depth <= 0) {
    return rng.bounded(3) == 0 ? baire::make_var("x") : small_const();
  }
  switch (rng.bounded(10)) {
    case 0:
      return small_const();
    case 1:
      return baire::make_var("x");
    case 2:
      return baire::make_node(NodeKind::add, {gen_expr(rng, depth - 1),
                                              gen_expr(rng, depth - 1)});
    case 3:
      return baire::make_node(NodeKind::sub, {gen_expr(rng, depth - 1),
                                              gen_expr(rng, depth - 1)});
    case 4:
      return baire::make_node(NodeKind::mul, {gen_expr(rng, depth - 1),
                                              gen_expr(rng, depth - 1)});
    case 5:
      return baire::make_node(NodeKind::div, {gen_expr(rng, depth - 1),
                                              gen_expr(rng, depth - 1)});
    case 6: {
      int64_t k = static_cast<int64_t>(rng.bounded(6)) - 2;  // -2..3
      return baire::make_node(
          NodeKind::pow, {gen_expr(rng, 0), baire::make_const(Rational(k))});
    }
    case 7:
      return baire::make_node(NodeKind::neg, {gen_expr(rng, depth - 1)});
    case 8:
      return baire::make_node(
          rng.bounded(2) ? NodeKind::min : NodeKind::max,
          {gen_expr(rng, depth - 1), gen_expr(rng, depth - 1)});
    default:
      return baire::make_node(NodeKind::abs, {gen_expr(rng, depth - 1)});
  }
}

}  // namespace

TEST_CASE("evaluator matches big-rational oracle on random expressions") {
  baire::SplitMix64 rng(0xD51E5EEDULL);
  int exact = 0;
  for (int trial = 0; trial < 400; ++trial) {
    AstPtr e = gen_expr(rng, 4);
    int64_t xn = static_cast<int64_t>(rng.bounded(13)) - 6;
    int64_t xd = static_cast<int64_t>(rng.bounded(6)) + 1;
    Rational x(xn, xd);
    auto want = eval_big(e, BigQ(xn, xd));
    if (!want) continue;  // division by zero along some branch
    Value got;
    try {
      got = baire::eval_at(e, x);
    } catch (const DomainError&) {
      FAIL_CHECK("evaluator raised DomainError where oracle succeeded");
      continue;
    }
    if (!baire::value_is_rational(got)) continue;  // int64 overflow fallback
    const auto& q = std::get<Rational>(got);
    CHECK(BigQ(q.num(), q.den()) == *want);
    ++exact;
  }
  // The generator is tuned so the exact path dominates.
  CHECK(exact >= 100);
}

TEST_CASE("print/parse round trip on random expressions") {
  baire::SplitMix64 rng(0x90071E55ULL);
  int checked = 0;
  for (int trial = 0; trial < 150; ++trial) {
    AstPtr e = gen_expr(rng, 4);
    std::string s = baire::print_ast(e);
    AstPtr back = baire::parse_expr(s);
    // Printing a parsed tree must be a fixed point.
    CHECK(baire::print_ast(back) == s);
    ++checked;
  }
  CHECK(checked == 150);
}

TEST_CASE("print/parse round trip on hand-written sources") {
  const char* sources[] = {
      "x^2 + 1/3",
      "min(x, 1 - x)",
      "clamp(3*x - 1, 0, 1)",
      "dist([0,1], x)",
      "dist((-inf,0] u [1/4,1), x)",
      "sin(x)*cos(x) + exp(-x)",
      "abs(x - 1/2)^3",
      "1/(1 + x^2)",
      "max(0, min(1, 2*x))",
  };
  for (const char* s : sources) {
    AstPtr a = baire::parse_expr(s);
    AstPtr b = baire::parse_expr(baire::print_ast(a));
    CHECK(baire::ast_equal(a, b));
  }
}

TEST_CASE("printer emits minimal parentheses") {
  CHECK(baire::print_ast(baire::parse_expr("2+3*x")) == "2 + 3*x");
  CHECK(baire::print_ast(baire::parse_expr("(2+3)*x")) == "(2 + 3)*x");
  CHECK(baire::print_ast(baire::parse_expr("2^3^2")) == "2^3^2");
  CHECK(baire::print_ast(baire::parse_expr("(2^3)^2")) == "(2^3)^2");
  CHECK(baire::print_ast(baire::parse_expr("x - (1 - x)")) == "x - (1 - x)");
  CHECK(baire::print_ast(baire::parse_expr("-x^2")) == "-x^2");
}

TEST_CASE("dist nodes carry their set and round trip") {
  auto e = baire::parse_expr("dist([0,1] u [2,3])");
  REQUIRE(e->kind == NodeKind::dist);
  CHECK(!e->set.is_empty());
  CHECK(evalQ(e, Rational(3, 2)) == Rational(1, 2));
  AstPtr back = baire::parse_expr(baire::print_ast(e));
  CHECK(baire::ast_equal(e, back));
  // An enumeration tail contributes its closure to exact distances.
  auto q = baire::parse_expr("dist(Q(0,1))");
  CHECK(evalQ(q, Rational(1, 2)) == Rational(0));
  CHECK(evalQ(q, Rational(2)) == Rational(1));
}

// ---------------------------------------------------------------------------
// Set literal grammar.
// ---------------------------------------------------------------------------

TEST_CASE("parse_rset atoms and unions") {
  CHECK(baire::parse_rset("{}").is_empty());
  CHECK(baire::parse_rset("(-inf,inf)") == RSet::whole());
  CHECK(baire::parse_rset("[1/2,1/2]") == RSet::point(Rational(1, 2)));
  CHECK(baire::parse_rset("{1/2}") == RSet::point(Rational(1, 2)));
  CHECK(baire::parse_rset("{0, 1, 2}") ==
        RSet::from_points({Rational(0), Rational(1), Rational(2)}));
  auto u = baire::parse_rset("[0,1) u (2,3]");
  REQUIRE(u.parts().size() == 2);
  CHECK(u.member(Rational(0)));
  CHECK(!u.member(Rational(1)));
  CHECK(!u.member(Rational(2)));
  CHECK(u.member(Rational(3)));
  // Adjacent pieces merge under normalization.
  CHECK(baire::parse_rset("[0,1) u [1,2]") == baire::parse_rset("[0,2]"));
}

TEST_CASE("parse_rset enumeration forms") {
  auto q = baire::parse_rset("Q(0,1)");
  REQUIRE(q.enum_part().has_value());
  CHECK(q.enum_part()->polarity == baire::Polarity::add);
  CHECK(q.enum_part()->trunc == 1000);  // default sampling truncation
  CHECK(q.member(Rational(1, 2)));
  CHECK(!q.member(Rational(2)));

  auto mix = baire::parse_rset("[2,3] u Q(0,1)");
  CHECK(mix.member(Rational(5, 2)));
  CHECK(mix.member(Rational(1, 3)));
  CHECK(mix.member(Rational(999983, 1000003)));  // any rational in (0,1)
  CHECK(!mix.member(Rational(7, 2)));

  auto sub = baire::parse_rset("[0,1] \\ Q(0,1)");
  REQUIRE(sub.enum_part().has_value());
  CHECK(sub.enum_part()->polarity == baire::Polarity::subtract);
  CHECK(sub.member(Rational(0)));
  CHECK(sub.member(Rational(1)));
  CHECK(!sub.member(Rational(1, 2)));

  auto fin = baire::parse_rset("rationals(8)");
  CHECK(!fin.enum_part().has_value());  // finite prefix folds to points
  CHECK(fin.member(Rational(1, 2)));
  CHECK(fin.member(Rational(1, 5)));
  CHECK(!fin.member(Rational(1, 6)));

  auto tailed = baire::parse_rset("rationals(8, tail)");
  REQUIRE(tailed.enum_part().has_value());
  CHECK(tailed.enum_part()->trunc == 8);
}

TEST_CASE("parse_rset round trips through RSet::str") {
  const char* sources[] = {
      "{}",
      "[0,1]",
      "(-inf,0] u [1/3,inf)",
      "[0,1) u (1,2)",
      "Q(0,1)",
      "[2,3] u Q(0,1)",
      "[0,1] \\ Q(0,1)",
  };
  for (const char* s : sources) {
    RSet a = baire::parse_rset(s);
    RSet b = baire::parse_rset(a.str());
    CHECK(a == b);
  }
}

TEST_CASE("parse_rset rejects malformed literals") {
  CHECK_THROWS_AS(baire::parse_rset("[1,0]"), ParseError);  // empty interval
  CHECK_THROWS_AS(baire::parse_rset("[0,inf]"), ParseError);  // closed at inf
  CHECK_THROWS_AS(baire::parse_rset("[0,1"), ParseError);
  CHECK_THROWS_AS(baire::parse_rset("[0,1] u"), ParseError);
  CHECK_THROWS_AS(baire::parse_rset("Q(0,2)"), ParseError);  // only Q(0,1)
  // Cannot both add and subtract the enumeration.
  CHECK_THROWS_AS(baire::parse_rset("Q(0,1) \\ Q(0,1)"), ParseError);
}

// ---------------------------------------------------------------------------
// Program forms.
// ---------------------------------------------------------------------------

TEST_CASE("parse_program: function, limit, gauge, eps, builtin") {
  const char* src = R"(# sample program
func f {
  piece on (-inf,0]: 0;
  piece on [0,inf): x^2;
}

limit g {
  seq(n): clamp(n*x, 0, 1);
  mode: stable;
}

gauge d0: dist([0,1], x) / 2 + 1/8;
eps e0: 1/4;
builtin R = riemann;
builtin J = jumpsum(20);
)";
  auto prog = baire::parse_program(src);
  REQUIRE(prog.funcs.size() == 1);
  REQUIRE(prog.limits.size() == 1);
  REQUIRE(prog.gauges.size() == 1);
  REQUIRE(prog.epses.size() == 1);
  REQUIRE(prog.builtins.size() == 2);

  const auto* f = prog.find_func("f");
  REQUIRE(f != nullptr);
  REQUIRE(f->pieces.size() == 2);
  CHECK(f->pieces[0].domain.member(Rational(-5)));
  CHECK(evalQ(f->pieces[1].expr, Rational(3)) == Rational(9));

  const auto* g = prog.find_limit("g");
  REQUIRE(g != nullptr);
  CHECK(g->mode == baire::SeqMode::stable);
  AstPtr at4 = baire::substitute_n(g->seq_expr, Rational(4));
  CHECK(evalQ(at4, Rational(1, 8)) == Rational(1, 2));

  const auto* d0 = prog.find_gauge("d0");
  REQUIRE(d0 != nullptr);
  CHECK(evalQ(d0->expr, Rational(3)) == Rational(9, 8));

  const auto* e0 = prog.find_eps("e0");
  REQUIRE(e0 != nullptr);
  CHECK(evalQ(e0->expr, Rational(0)) == Rational(1, 4));

  const auto* j = prog.find_builtin("J");
  REQUIRE(j != nullptr);
  CHECK(j->builtin == "jumpsum");
  REQUIRE(j->param.has_value());
  CHECK(*j->param == 20);
  const auto* r = prog.find_builtin("R");
  REQUIRE(r != nullptr);
  CHECK(!r->param.has_value());
}

TEST_CASE("parse_program rejects bad forms") {
  // Unknown builtin name.
  CHECK_THROWS_AS(baire::parse_program("builtin B = weier;"), ParseError);
  // jumpsum needs a positive parameter when parenthesized.
  CHECK_THROWS_AS(baire::parse_program("builtin J = jumpsum(0);"), ParseError);
  // Function bodies must be continuity-safe: no unresolved calls.
  CHECK_THROWS_AS(baire::parse_program("func f { piece on [0,1]: step(x); }"),
                  ParseError);
  // Empty function.
  CHECK_THROWS_AS(baire::parse_program("func f { }"), ParseError);
  // Duplicate names share one namespace across all forms.
  CHECK_THROWS_AS(baire::parse_program("eps a: 1; eps a: 2;"), ParseError);
  CHECK_THROWS_AS(baire::parse_program("eps a: 1; gauge a: x;"), ParseError);
  // limit without mode.
  CHECK_THROWS_AS(baire::parse_program("limit g { seq(n): x; }"), ParseError);
  // n is bound only inside seq terms.
  CHECK_THROWS_AS(baire::parse_program("func f { piece on [0,1]: n*x; }"),
                  ParseError);
  CHECK_THROWS_AS(baire::parse_program("gauge d: n*x;"), ParseError);
}

TEST_CASE("seq expressions bind n and substitute exactly") {
  auto prog = baire::parse_program(
      "limit h { seq(n): x/n + 1/(n+1); mode: pointwise; }");
  const auto* h = prog.find_limit("h");
  REQUIRE(h != nullptr);
  CHECK(baire::uses_var(h->seq_expr, "n"));
  AstPtr at3 = baire::substitute_n(h->seq_expr, Rational(3));
  CHECK(!baire::uses_var(at3, "n"));
  CHECK(evalQ(at3, Rational(6)) == Rational(2) + Rational(1, 4));
}

// ---------------------------------------------------------------------------
// Static analysis: ranges and Lipschitz bounds on a window.
// ---------------------------------------------------------------------------

TEST_CASE("analyze produces sound range and Lipschitz data") {
  auto a = baire::analyze(baire::parse_expr("x^2"), 0.0, 2.0);
  REQUIRE(a.range.has_value());
  CHECK(a.range->first <= 0.0);
  CHECK(a.range->second >= 4.0);
  REQUIRE(a.lip.has_value());
  CHECK(*a.lip >= 4.0);

  auto d = baire::analyze(baire::parse_expr("dist([0,1], x)"), -10.0, 10.0);
  REQUIRE(d.lip.has_value());
  CHECK(*d.lip >= 1.0);

  auto c = baire::analyze(baire::parse_expr("clamp(3*x - 1, 0, 1)"), 0.0, 1.0);
  REQUIRE(c.lip.has_value());
  CHECK(*c.lip >= 3.0);

  // Division with a denominator range containing zero yields no bound.
  auto bad = baire::analyze(baire::parse_expr("1/x"), -1.0, 1.0);
  CHECK(!bad.lip.has_value());
}

TEST_CASE("Lipschitz bound dominates sampled difference quotients") {
  const char* sources[] = {
      "x^2 - x/3",
      "min(x, 1 - x)",
      "clamp(3*x - 1, 0, 1)",
      "abs(x - 1/2) + dist([0,1/4], x)",
      "sin(x)*1/2 + cos(x)*1/3",
  };
  for (const char* s : sources) {
    AstPtr e = baire::parse_expr(s);
    auto a = baire::analyze(e, -2.0, 2.0);
    REQUIRE(a.lip.has_value());
    double L = *a.lip;
    baire::SplitMix64 rng(0x11F5C417ULL);
    for (int i = 0; i < 200; ++i) {
      double x = -2.0 + 4.0 * rng.next_unit();
      double h = (rng.next_unit() + 1e-6) * 0.01;
      double y = std::min(2.0, x + h);
      double fx = evalD(e, x);
      double fy = evalD(e, y);
      CHECK(std::abs(fy - fx) <= L * (y - x) + 1e-9);
    }
  }
}

TEST_CASE("continuity_safe flags call nodes only") {
  CHECK(baire::continuity_safe(baire::parse_expr("sin(x)/(1 + x^2)")));
  CHECK(baire::continuity_safe(baire::parse_expr("dist(Q(0,1), x)")));
  auto call = baire::make_call("step", baire::make_var("x"));
  CHECK(!baire::continuity_safe(call));
  auto wrapped = baire::make_node(NodeKind::add,
                                  {call, baire::make_const(Rational(1))});
  CHECK(!baire::continuity_safe(wrapped));
}
