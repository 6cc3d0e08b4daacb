#pragma once

#include <cctype>
#include <deque>
#include <string>
#include <string_view>

#include "sqlbridge/lexer.hpp"

namespace sqlbridge::detail {

/// Lookahead buffer over the pull lexer. Lexical errors surface only when a
/// token is actually demanded.
class TokenCursor {
public:
    explicit TokenCursor(std::string_view source) : lexer_(source), source_(source) {}

    const Token* peek(std::size_t k = 0) {
        while (buffer_.size() <= k && !exhausted_) {
            if (auto tok = lexer_.next_token()) {
                buffer_.push_back(*tok);
            } else {
                exhausted_ = true;
            }
        }
        return k < buffer_.size() ? &buffer_[k] : nullptr;
    }

    Token take() {
        peek();
        Token tok = buffer_.front();
        buffer_.pop_front();
        last_end_ = tok.end;
        return tok;
    }

    bool at_end() { return peek() == nullptr; }
    /// Offset of the next token, or the end of input.
    std::size_t position() {
        const Token* tok = peek();
        return tok ? tok->start : source_.size();
    }
    std::size_t last_end() const noexcept { return last_end_; }
    std::string_view source() const noexcept { return source_; }

private:
    Lexer lexer_;
    std::string_view source_;
    std::deque<Token> buffer_;
    bool exhausted_ = false;
    std::size_t last_end_ = 0;
};

inline std::string describe(const Token* tok) {
    if (tok == nullptr) return "end of input";
    if (tok->kind == TokenKind::keyword) {
        std::string upper(tok->text);
        for (auto& c : upper) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
        return "keyword " + upper;
    }
    return "'" + std::string(tok->text) + "'";
}

}  // namespace sqlbridge::detail
