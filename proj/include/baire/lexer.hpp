// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace baire {

enum class TokKind { number, ident, op, paren, comma, keyword, eof };

struct Token {
    TokKind kind;
    std::string lexeme;
    std::size_t offset = 0;
    std::size_t length = 0;
};

/* Deterministic maximal-munch tokenization.  Number tokens are exact
 * rationals: digits, digits.digits, or digits/digits (so "1/3" is one
 * number; write "1 / 3" for a division of literals).  '#' starts a comment
 * running to end of line.  Throws LexError with the byte offset. */
std::vector<Token> tokenize(std::string_view src);

bool is_keyword(std::string_view word);

} // namespace baire
