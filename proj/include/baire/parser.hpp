// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "baire/ast.hpp"
#include "baire/rset.hpp"

namespace baire {

enum class SeqMode { pointwise, stable, uniform };
std::string seq_mode_name(SeqMode m);

struct PieceDef {
    RSet domain;
    AstPtr expr; // continuity-safe by grammar
};

struct FuncDef {
    std::string name;
    std::vector<PieceDef> pieces;
};

struct LimitDef {
    std::string name;
    AstPtr seq_expr; // in x and n
    SeqMode mode = SeqMode::pointwise;
};

struct GaugeDef {
    std::string name;
    AstPtr expr;
};

struct EpsDef {
    std::string name;
    AstPtr expr;
};

struct BuiltinDef {
    std::string name;
    std::string builtin; // riemann | dirichlet | jumpsum | step
    std::optional<std::int64_t> param;
};

struct Program {
    std::vector<FuncDef> funcs;
    std::vector<LimitDef> limits;
    std::vector<GaugeDef> gauges;
    std::vector<EpsDef> epses;
    std::vector<BuiltinDef> builtins;

    const FuncDef* find_func(std::string_view name) const;
    const LimitDef* find_limit(std::string_view name) const;
    const GaugeDef* find_gauge(std::string_view name) const;
    const EpsDef* find_eps(std::string_view name) const;
    const BuiltinDef* find_builtin(std::string_view name) const;
};

/* Expression grammar: ^ (right-assoc) > unary - > * / > + - (left-assoc).
 * primary: number | x | n | min max abs sin cos exp clamp | dist(<rset>[,e])
 * | NAME(e) (a call resolved at evaluation).  Throws ParseError/LexError. */
AstPtr parse_expr(std::string_view src);

/* RSet literal: "{}" | atoms joined by 'u' with optional "\ Q(0,1)" suffix;
 * atom = interval like "[0,1)" / "(-inf,0]" | "Q(0,1)" | "rationals(N[, tail])". */
RSet parse_rset(std::string_view src);

// A .bdsl source: func / limit / gauge / eps / builtin forms, '#' comments.
Program parse_program(std::string_view src);

} // namespace baire
