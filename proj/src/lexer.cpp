// SPDX-License-Identifier: Apache-2.0
#include "baire/lexer.hpp"

#include <array>
#include <cctype>

#include "baire/errors.hpp"

namespace baire {

bool is_keyword(std::string_view word) {
    static const std::array<std::string_view, 12> kw = {
        "func", "limit", "gauge", "eps",  "builtin",   "piece",
        "on",   "seq",   "mode",  "pointwise", "stable", "uniform"};
    for (auto k : kw)
        if (k == word)
            return true;
    return false;
}

std::vector<Token> tokenize(std::string_view src) {
    std::vector<Token> out;
    std::size_t i = 0;
    const std::size_t n = src.size();
    auto push = [&](TokKind k, std::size_t begin, std::size_t end) {
        out.push_back(Token{k, std::string(src.substr(begin, end - begin)), begin, end - begin});
    };
    while (i < n) {
        const char c = src[i];
        if (std::isspace((unsigned char)c)) {
            ++i;
            continue;
        }
        if (c == '#') { // comment to end of line
            while (i < n && src[i] != '\n')
                ++i;
            continue;
        }
        if (std::isdigit((unsigned char)c)) {
            std::size_t b = i;
            while (i < n && std::isdigit((unsigned char)src[i]))
                ++i;
            if (i < n && src[i] == '.' && i + 1 < n && std::isdigit((unsigned char)src[i + 1])) {
                ++i;
                while (i < n && std::isdigit((unsigned char)src[i]))
                    ++i;
            } else if (i < n && src[i] == '/' && i + 1 < n &&
                       std::isdigit((unsigned char)src[i + 1])) {
                ++i;
                while (i < n && std::isdigit((unsigned char)src[i]))
                    ++i;
            }
            push(TokKind::number, b, i);
            continue;
        }
        if (std::isalpha((unsigned char)c) || c == '_') {
            std::size_t b = i;
            while (i < n && (std::isalnum((unsigned char)src[i]) || src[i] == '_'))
                ++i;
            std::string_view word = src.substr(b, i - b);
            push(is_keyword(word) ? TokKind::keyword : TokKind::ident, b, i);
            continue;
        }
        switch (c) {
        case '(':
        case ')':
        case '[':
        case ']':
        case '{':
        case '}':
            push(TokKind::paren, i, i + 1);
            ++i;
            continue;
        case ',':
            push(TokKind::comma, i, i + 1);
            ++i;
            continue;
        case '+':
        case '-':
        case '*':
        case '/':
        case '^':
        case ':':
        case ';':
        case '=':
        case '\\':
            push(TokKind::op, i, i + 1);
            ++i;
            continue;
        default:
            throw LexError("unrecognized character '" + std::string(1, c) +
                           "' at byte " + std::to_string(i));
        }
    }
    out.push_back(Token{TokKind::eof, "", n, 0});
    return out;
}

} // namespace baire
