#include "sqlbridge/lexer.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <string>

namespace sqlbridge {

namespace {

constexpr std::array kKeywords = {
    std::string_view{"AND"},    std::string_view{"AS"},      std::string_view{"BY"},
    std::string_view{"COLUMN"}, std::string_view{"CREATE"},  std::string_view{"EXPLAIN"},
    std::string_view{"FALSE"},  std::string_view{"FROM"},    std::string_view{"GROUP"},
    std::string_view{"INTO"},   std::string_view{"JOIN"},    std::string_view{"LABEL"},
    std::string_view{"LIMIT"},  std::string_view{"NOT"},     std::string_view{"NULL"},
    std::string_view{"ON"},     std::string_view{"OR"},      std::string_view{"ORDER"},
    std::string_view{"PREDICT"},std::string_view{"SELECT"},  std::string_view{"TABLE"},
    std::string_view{"TO"},     std::string_view{"TRAIN"},   std::string_view{"TRUE"},
    std::string_view{"USING"},  std::string_view{"WHERE"},   std::string_view{"WITH"},
};

bool is_word_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool is_word_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }
bool is_digit(char c) { return c >= '0' && c <= '9'; }
bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; }

bool iequals(std::string_view a, std::string_view b) {
    return a.size() == b.size() && std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
               return std::toupper(static_cast<unsigned char>(x)) == std::toupper(static_cast<unsigned char>(y));
           });
}

}  // namespace

bool is_keyword(std::string_view word) {
    return std::any_of(kKeywords.begin(), kKeywords.end(), [&](std::string_view kw) { return iequals(kw, word); });
}

bool Token::is_word(std::string_view upper) const {
    return (kind == TokenKind::keyword || kind == TokenKind::identifier) && iequals(text, upper);
}

bool Token::is_punct(char c) const {
    return kind == TokenKind::punctuation && text.size() == 1 && text[0] == c;
}

Lexeme Lexer::scan_quoted(char quote, TokenKind kind, const char* what) {
    const std::size_t start = pos_;
    std::size_t i = pos_ + 1;
    while (true) {
        if (i >= source_.size()) {
            throw LexError(start, std::string("unterminated ") + what);
        }
        if (source_[i] == quote) {
            if (i + 1 < source_.size() && source_[i + 1] == quote) {
                i += 2;
                continue;
            }
            ++i;
            break;
        }
        ++i;
    }
    pos_ = i;
    Token tok{kind, source_.substr(start, i - start), start, i};
    return {LexemeKind::token, tok, start, i};
}

Lexeme Lexer::scan_number() {
    const std::size_t start = pos_;
    std::size_t i = pos_;
    while (i < source_.size() && is_digit(source_[i])) ++i;
    if (i + 1 < source_.size() && source_[i] == '.' && is_digit(source_[i + 1])) {
        ++i;
        while (i < source_.size() && is_digit(source_[i])) ++i;
    }
    if (i < source_.size() && (source_[i] == 'e' || source_[i] == 'E')) {
        std::size_t j = i + 1;
        if (j < source_.size() && (source_[j] == '+' || source_[j] == '-')) ++j;
        if (j < source_.size() && is_digit(source_[j])) {
            while (j < source_.size() && is_digit(source_[j])) ++j;
            i = j;
        }
    }
    pos_ = i;
    Token tok{TokenKind::number, source_.substr(start, i - start), start, i};
    return {LexemeKind::token, tok, start, i};
}

std::optional<Lexeme> Lexer::next_lexeme() {
    if (pos_ >= source_.size()) return std::nullopt;
    const std::size_t start = pos_;
    const char c = source_[pos_];
    const auto peek = [&](std::size_t k) { return pos_ + k < source_.size() ? source_[pos_ + k] : '\0'; };

    if (is_space(c)) {
        while (pos_ < source_.size() && is_space(source_[pos_])) ++pos_;
        return Lexeme{LexemeKind::whitespace, {}, start, pos_};
    }
    if (c == '-' && peek(1) == '-') {
        const auto nl = source_.find('\n', pos_);
        pos_ = nl == std::string_view::npos ? source_.size() : nl + 1;
        return Lexeme{LexemeKind::comment, {}, start, pos_};
    }
    if (c == '/' && peek(1) == '*') {
        const auto close = source_.find("*/", pos_ + 2);
        if (close == std::string_view::npos) throw LexError(start, "unterminated block comment");
        pos_ = close + 2;
        return Lexeme{LexemeKind::comment, {}, start, pos_};
    }
    if (c == '\'') return scan_quoted('\'', TokenKind::string_literal, "string literal");
    if (c == '"') return scan_quoted('"', TokenKind::quoted_identifier, "quoted identifier");
    if (c == '`') return scan_quoted('`', TokenKind::quoted_identifier, "quoted identifier");
    if (is_digit(c)) return scan_number();
    if (is_word_start(c)) {
        while (pos_ < source_.size() && is_word_char(source_[pos_])) ++pos_;
        const auto text = source_.substr(start, pos_ - start);
        const auto kind = is_keyword(text) ? TokenKind::keyword : TokenKind::identifier;
        return Lexeme{LexemeKind::token, Token{kind, text, start, pos_}, start, pos_};
    }

    std::size_t len = 0;
    TokenKind kind = TokenKind::op;
    switch (c) {
        case '<':
            len = (peek(1) == '=' || peek(1) == '>') ? 2 : 1;
            break;
        case '>':
            len = peek(1) == '=' ? 2 : 1;
            break;
        case '!':
            if (peek(1) != '=') throw LexError(start, "unexpected character '!'");
            len = 2;
            break;
        case '=': case '+': case '-': case '*': case '/': case '%':
            len = 1;
            break;
        case ';': case ',': case '(': case ')': case '[': case ']': case '.': case ':':
            len = 1;
            kind = TokenKind::punctuation;
            break;
        default: {
            const auto byte = static_cast<unsigned char>(c);
            std::string shown = byte >= 0x20 && byte < 0x7f ? std::string(1, c) : "byte " + std::to_string(byte);
            throw LexError(start, "unexpected character '" + shown + "'");
        }
    }
    pos_ += len;
    return Lexeme{LexemeKind::token, Token{kind, source_.substr(start, len), start, pos_}, start, pos_};
}

std::optional<Token> Lexer::next_token() {
    while (auto lx = next_lexeme()) {
        if (lx->kind == LexemeKind::token) return lx->token;
    }
    return std::nullopt;
}

std::vector<Lexeme> scan_lossless(std::string_view source) {
    std::vector<Lexeme> out;
    Lexer lexer(source);
    while (auto lx = lexer.next_lexeme()) out.push_back(*lx);
    return out;
}

std::vector<Token> tokenize(std::string_view source) {
    std::vector<Token> out;
    Lexer lexer(source);
    while (auto tok = lexer.next_token()) out.push_back(*tok);
    return out;
}

std::vector<StatementSpan> split_statements(std::string_view source) {
    std::vector<StatementSpan> spans;
    std::size_t start = 0;
    bool has_token = false;
    for (const auto& tok : tokenize(source)) {
        has_token = true;
        if (tok.is_punct(';')) {
            spans.push_back({start, tok.end});
            start = tok.end;
            has_token = false;
        }
    }
    if (has_token) spans.push_back({start, source.size()});
    return spans;
}

std::string unquote(const Token& token) {
    if (token.kind != TokenKind::string_literal && token.kind != TokenKind::quoted_identifier) {
        return std::string(token.text);
    }
    const char quote = token.text.front();
    std::string out;
    out.reserve(token.text.size());
    for (std::size_t i = 1; i + 1 < token.text.size(); ++i) {
        out.push_back(token.text[i]);
        if (token.text[i] == quote) ++i;
    }
    return out;
}

}  // namespace sqlbridge
