#include "lexer.hpp"

#include <cctype>

namespace asper::detail {

const char* describe(Tok t) noexcept {
    switch (t) {
    case Tok::Ident: return "identifier";
    case Tok::Variable: return "variable";
    case Tok::Integer: return "integer";
    case Tok::Number: return "number";
    case Tok::String: return "string";
    case Tok::LParen: return "'('";
    case Tok::RParen: return "')'";
    case Tok::Comma: return "','";
    case Tok::Dot: return "'.'";
    case Tok::If: return "':-'";
    case Tok::NotEqual: return "'!='";
    case Tok::BlankLine: return "blank line";
    case Tok::Directive: return "directive";
    case Tok::End: return "end of input";
    }
    return "token";
}

void Lexer::advance() noexcept {
    if (pos_ >= src_.size())
        return;
    if (src_[pos_] == '\n') {
        ++line_;
        col_ = 1;
    } else {
        ++col_;
    }
    ++pos_;
}

const Token& Lexer::peek() {
    if (!has_peek_) {
        peeked_ = scan();
        has_peek_ = true;
    }
    return peeked_;
}

Token Lexer::next() {
    if (has_peek_) {
        has_peek_ = false;
        return std::move(peeked_);
    }
    return scan();
}

Token Lexer::expect(Tok kind, const char* what) {
    Token t = next();
    if (t.kind != kind)
        fail(t, std::string("expected ") + what + ", found " +
                    (t.text.empty() ? describe(t.kind) : "'" + t.text + "'"));
    return t;
}

void Lexer::fail(const Token& at, const std::string& msg) const {
    throw ParseError(msg, at.line, at.column);
}

// Whitespace and comments. A line holding only whitespace becomes a
// BlankLine token when enabled; `% sentence: id` becomes a Directive.
void Lexer::skip_space_and_comments(Token& pending) {
    bool line_has_content = col_ != 1;
    for (;;) {
        char c = cur();
        if (c == '\n') {
            if (!line_has_content && blank_lines_) {
                pending.kind = Tok::BlankLine;
                pending.line = line_;
                pending.column = col_;
                advance();
                return;
            }
            line_has_content = false;
            advance();
        } else if (c == ' ' || c == '\t' || c == '\r') {
            advance();
        } else if (c == '%') {
            std::size_t line = line_, column = col_;
            std::size_t start = pos_;
            while (cur() != '\n' && cur() != '\0')
                advance();
            std::string_view body = src_.substr(start + 1, pos_ - start - 1);
            constexpr std::string_view key = "sentence:";
            auto first = body.find_first_not_of(" \t");
            if (blank_lines_ && first != std::string_view::npos && body.substr(first, key.size()) == key) {
                std::string_view id = body.substr(first + key.size());
                auto a = id.find_first_not_of(" \t\r");
                auto b = id.find_last_not_of(" \t\r");
                pending.kind = Tok::Directive;
                pending.text = a == std::string_view::npos ? "" : std::string(id.substr(a, b - a + 1));
                pending.line = line;
                pending.column = column;
                return;
            }
            line_has_content = true;
        } else {
            return;
        }
    }
}

Token Lexer::scan() {
    Token t;
    t.kind = Tok::End;
    skip_space_and_comments(t);
    if (t.kind == Tok::BlankLine || t.kind == Tok::Directive)
        return t;

    t.line = line_;
    t.column = col_;
    char c = cur();
    if (c == '\0') {
        t.kind = Tok::End;
        return t;
    }
    auto take_while = [&](auto pred) {
        std::size_t start = pos_;
        while (cur() != '\0' && pred(cur()))
            advance();
        return std::string(src_.substr(start, pos_ - start));
    };
    auto is_word = [](char ch) { return std::isalnum(static_cast<unsigned char>(ch)) || ch == '_'; };

    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        t.text = take_while(is_word);
        t.kind = (std::isupper(static_cast<unsigned char>(c)) || c == '_') ? Tok::Variable : Tok::Ident;
        return t;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '-' || c == '+') {
        std::size_t start = pos_;
        advance();
        bool real = false;
        while (cur() != '\0') {
            char d = cur();
            if (std::isdigit(static_cast<unsigned char>(d))) {
                advance();
            } else if (d == '.' && pos_ + 1 < src_.size() &&
                       std::isdigit(static_cast<unsigned char>(src_[pos_ + 1]))) {
                real = true;
                advance();
            } else if (d == 'e' || d == 'E') {
                real = true;
                advance();
                if (cur() == '-' || cur() == '+')
                    advance();
            } else {
                break;
            }
        }
        t.text = std::string(src_.substr(start, pos_ - start));
        t.kind = real ? Tok::Number : Tok::Integer;
        return t;
    }
    if (c == '"') {
        advance();
        std::size_t start = pos_;
        while (cur() != '"') {
            if (cur() == '\0' || cur() == '\n')
                fail(t, "unterminated string");
            advance();
        }
        t.text = std::string(src_.substr(start, pos_ - start));
        advance();
        t.kind = Tok::String;
        return t;
    }
    advance();
    switch (c) {
    case '(': t.kind = Tok::LParen; return t;
    case ')': t.kind = Tok::RParen; return t;
    case ',': t.kind = Tok::Comma; return t;
    case '.': t.kind = Tok::Dot; return t;
    case ':':
        if (cur() == '-') {
            advance();
            t.kind = Tok::If;
            return t;
        }
        break;
    case '!':
        if (cur() == '=') {
            advance();
            t.kind = Tok::NotEqual;
            return t;
        }
        break;
    default:
        break;
    }
    fail(t, std::string("unexpected character '") + c + "'");
}

} // namespace asper::detail
