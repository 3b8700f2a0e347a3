#pragma once

#include <cctype>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "rippling/term.hpp"

namespace rippling::detail {

enum class Tok { lparen, rparen, lbrace, rbrace, lbracket, rbracket, atom, end };

struct Token {
    Tok kind;
    std::string text;
    std::size_t offset;
};

inline bool is_delim(char c) {
    return c == '(' || c == ')' || c == '{' || c == '}' || c == '[' || c == ']' || c == ';';
}

/// `;` starts a comment running to end of line.
inline std::vector<Token> tokenize(std::string_view src) {
    std::vector<Token> out;
    std::size_t i = 0;
    while (i < src.size()) {
        char c = src[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
            continue;
        }
        if (c == ';') {
            while (i < src.size() && src[i] != '\n') ++i;
            continue;
        }
        Tok k = Tok::atom;
        switch (c) {
            case '(': k = Tok::lparen; break;
            case ')': k = Tok::rparen; break;
            case '{': k = Tok::lbrace; break;
            case '}': k = Tok::rbrace; break;
            case '[': k = Tok::lbracket; break;
            case ']': k = Tok::rbracket; break;
            default: break;
        }
        if (k != Tok::atom) {
            out.push_back({k, std::string(1, c), i});
            ++i;
            continue;
        }
        std::size_t start = i;
        while (i < src.size() && !std::isspace(static_cast<unsigned char>(src[i])) && !is_delim(src[i])) ++i;
        out.push_back({Tok::atom, std::string(src.substr(start, i - start)), start});
    }
    out.push_back({Tok::end, "", src.size()});
    return out;
}

class TokenStream {
public:
    explicit TokenStream(std::string_view src) : toks_(tokenize(src)) {}

    const Token& peek() const { return toks_[pos_]; }
    const Token& next() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }
    bool at_end() const { return peek().kind == Tok::end; }

    void expect(Tok k, const char* what) {
        const Token& t = next();
        if (t.kind != k) throw TermError(std::string("expected ") + what + " but found '" + t.text + "'", t.offset);
    }

private:
    std::vector<Token> toks_;
    std::size_t pos_ = 0;
};

}  // namespace rippling::detail
