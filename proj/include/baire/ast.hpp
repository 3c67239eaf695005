// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "baire/rset.hpp"

namespace baire {

/* Expression values: exact while every operand is rational and every node is
 * rational-closed; sin/cos/exp (or int64 overflow) promote to binary64. */
using Value = std::variant<Rational, double>;

double value_to_double(const Value& v);
bool value_is_rational(const Value& v);
// Exact equality when both rational; |a-b| <= tol otherwise.
bool value_close(const Value& a, const Value& b, const Rational& tol);

enum class NodeKind {
    constant,
    variable, // "x" or "n"
    add,
    sub,
    mul,
    div,
    pow,
    neg,
    min,
    max,
    abs,
    sin,
    cos,
    exp,
    clamp,
    dist, // distance to a fixed RSet; 1-Lipschitz, the gauge-building atom
    call  // named function, resolved by the evaluator's registry
};

struct Ast;
using AstPtr = std::shared_ptr<const Ast>;

struct Ast {
    NodeKind kind;
    Rational value;   // constant
    std::string name; // variable / call
    RSet set;         // dist
    std::vector<AstPtr> kids;
};

AstPtr make_const(const Rational& r);
AstPtr make_var(const std::string& name);
AstPtr make_node(NodeKind k, std::vector<AstPtr> kids);
AstPtr make_dist(RSet s, AstPtr arg);
AstPtr make_call(std::string name, AstPtr arg);

// Resolves call(name, v); absent resolver makes call nodes a DomainError.
using CallResolver = std::function<Value(const std::string&, const Value&)>;

struct EvalEnv {
    Value x;
    std::optional<Value> n;
    const CallResolver* calls = nullptr;
};

Value eval_ast(const AstPtr& e, const EvalEnv& env);
Value eval_at(const AstPtr& e, const Rational& x);

// Minimal-parenthesis printer; parse(print(parse(s))) == parse(s).
std::string print_ast(const AstPtr& e);

// Structural equality.
bool ast_equal(const AstPtr& a, const AstPtr& b);

// True when the expression stays inside the continuity-safe subset: no call
// nodes anywhere (div is allowed; its nonvanishing obligation is dynamic).
bool continuity_safe(const AstPtr& e);
bool uses_var(const AstPtr& e, const std::string& name);

// Replace the variable n by a constant (FuncSeq term instantiation).
AstPtr substitute_n(const AstPtr& e, const Rational& n);

/* Conservative interval/Lipschitz analysis over a compact window, used to
 * pick mesh sizes for continuous pieces and to budget jump tests.  nullopt
 * means the analysis cannot bound the node (denominator range touches zero,
 * call nodes, non-integer exponents). */
struct Analysis {
    std::optional<std::pair<double, double>> range;
    std::optional<double> lip;
};
Analysis analyze(const AstPtr& e, double window_lo, double window_hi);

} // namespace baire
