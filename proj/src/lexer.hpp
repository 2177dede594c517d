#pragma once

// Tokenizer shared by the fact and knowledge-base readers. Handles `%`
// comments and reports 1-based line/column positions.

#include "asper/error.hpp"

#include <cstddef>
#include <string>
#include <string_view>

namespace asper::detail {

enum class Tok {
    Ident,     // starts with a lowercase letter
    Variable,  // starts with an uppercase letter or '_'
    Integer,
    Number,    // unquoted decimal with '.' or exponent
    String,    // "..." (text holds the unquoted body)
    LParen,
    RParen,
    Comma,
    Dot,
    If,        // :-
    NotEqual,  // !=
    BlankLine, // only emitted when blank_lines is enabled
    Directive, // `% sentence: <id>` (text holds the id)
    End,
};

struct Token {
    Tok kind = Tok::End;
    std::string text;
    std::size_t line = 1;
    std::size_t column = 1;
};

const char* describe(Tok t) noexcept;

class Lexer {
public:
    Lexer(std::string_view src, bool blank_lines) : src_(src), blank_lines_(blank_lines) {}

    const Token& peek();
    Token next();
    Token expect(Tok kind, const char* what);

    [[noreturn]] void fail(const Token& at, const std::string& msg) const;

private:
    Token scan();
    void skip_space_and_comments(Token& pending);
    char cur() const noexcept { return pos_ < src_.size() ? src_[pos_] : '\0'; }
    void advance() noexcept;

    std::string_view src_;
    bool blank_lines_;
    std::size_t pos_ = 0;
    std::size_t line_ = 1;
    std::size_t col_ = 1;
    bool has_peek_ = false;
    Token peeked_;
};

} // namespace asper::detail
