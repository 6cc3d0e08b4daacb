#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sqlbridge/error.hpp"

namespace sqlbridge {

enum class TokenKind {
    keyword,
    identifier,
    quoted_identifier,
    number,
    string_literal,
    op,
    punctuation,
};

enum class LexemeKind {
    token,
    whitespace,
    comment,
};

/// A token is a view into the source it was produced from; offsets are 0-based
/// byte positions, `end` exclusive.
struct Token {
    TokenKind kind = TokenKind::punctuation;
    std::string_view text;
    std::size_t start = 0;
    std::size_t end = 0;

    /// Case-insensitive match against an upper-case keyword. Matches any word
    /// token, so non-reserved keywords and plain identifiers both qualify.
    bool is_word(std::string_view upper) const;
    bool is_keyword(std::string_view upper) const { return kind == TokenKind::keyword && is_word(upper); }
    bool is_punct(char c) const;
    bool is_op(std::string_view op) const { return kind == TokenKind::op && text == op; }
    /// keyword or identifier
    bool is_bare_word() const { return kind == TokenKind::keyword || kind == TokenKind::identifier; }
};

struct Lexeme {
    LexemeKind kind = LexemeKind::token;
    Token token;  // valid when kind == token
    std::size_t start = 0;
    std::size_t end = 0;
};

struct StatementSpan {
    std::size_t start = 0;
    std::size_t end = 0;

    bool operator==(const StatementSpan&) const = default;
};

class LexError : public ParseFailure {
public:
    using ParseFailure::ParseFailure;
};

/// Pull-based scanner. Errors are raised only when the offending lexeme is
/// reached, which lets a parser stop before a bad tail of the input.
class Lexer {
public:
    explicit Lexer(std::string_view source) : source_(source) {}

    /// Next lexeme including whitespace and comments; nullopt at end of input.
    std::optional<Lexeme> next_lexeme();
    /// Next token, skipping whitespace and comments.
    std::optional<Token> next_token();

    std::size_t offset() const noexcept { return pos_; }
    std::string_view source() const noexcept { return source_; }

private:
    Lexeme scan_quoted(char quote, TokenKind kind, const char* what);
    Lexeme scan_number();

    std::string_view source_;
    std::size_t pos_ = 0;
};

/// Reserved and non-reserved keywords recognized by the scanner.
bool is_keyword(std::string_view word);

std::vector<Lexeme> scan_lossless(std::string_view source);
std::vector<Token> tokenize(std::string_view source);

/// Splits on top-level semicolons. Spans are contiguous: each starts where the
/// previous ended, so leading whitespace/comments belong to the next span. A
/// trailing fragment forms a final span only if it holds at least one token.
std::vector<StatementSpan> split_statements(std::string_view source);

/// Decodes a quoted string literal or quoted identifier (doubled quote escape).
std::string unquote(const Token& token);

}  // namespace sqlbridge
