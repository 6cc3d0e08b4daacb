#include "sqlbridge/dialect.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cctype>

#include "token_cursor.hpp"

namespace sqlbridge {

namespace {

using detail::describe;
using detail::TokenCursor;

constexpr std::array kReserved = {
    std::string_view{"AND"},   std::string_view{"AS"},     std::string_view{"BY"},
    std::string_view{"CREATE"},std::string_view{"FALSE"},  std::string_view{"FROM"},
    std::string_view{"GROUP"}, std::string_view{"INTO"},   std::string_view{"JOIN"},
    std::string_view{"LIMIT"}, std::string_view{"NOT"},    std::string_view{"NULL"},
    std::string_view{"ON"},    std::string_view{"OR"},     std::string_view{"ORDER"},
    std::string_view{"SELECT"},std::string_view{"TABLE"},  std::string_view{"TO"},
    std::string_view{"TRUE"},  std::string_view{"USING"},  std::string_view{"WHERE"},
    std::string_view{"WITH"},
};

std::string upper(std::string_view s) {
    std::string out(s);
    for (auto& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    return out;
}

struct DialectTraits {
    DialectId id;
    char identifier_quote;        // '"' or '`'
    bool double_quote_is_string;  // mysql: "..." in value position is a string
};

class SelectParser {
public:
    SelectParser(const DialectTraits& traits, std::string_view source) : traits_(traits), cursor_(source) {}

    ParseOutcome run() {
        try {
            std::vector<Statement> statements;
            while (!cursor_.at_end()) {
                const std::size_t start = cursor_.position();
                Statement stmt{parse_statement(), {}, start, false, std::nullopt, {}};
                std::size_t end = 0;
                const Token* next = cursor_.peek();
                if (next == nullptr) {
                    end = cursor_.source().size();
                } else if (next->is_punct(';')) {
                    end = cursor_.take().end;
                    stmt.terminated = true;
                } else {
                    fail(next, "unexpected " + describe(next));
                }
                stmt.raw_text = std::string(cursor_.source().substr(start, end - start));
                statements.push_back(std::move(stmt));
            }
            return {std::move(statements), cursor_.source().size(), std::nullopt};
        } catch (const ParseFailure& e) {
            return {{}, 0, e.syntax_error()};
        }
    }

private:
    [[noreturn]] void fail(const Token* at, std::string message) {
        throw ParseFailure(at ? at->start : cursor_.source().size(), std::move(message));
    }

    void expect_word(std::string_view word) {
        const Token* tok = cursor_.peek();
        if (tok == nullptr || !tok->is_word(word)) fail(tok, "expected " + std::string(word) + ", found " + describe(tok));
        cursor_.take();
    }

    bool accept_word(std::string_view word) {
        const Token* tok = cursor_.peek();
        if (tok && tok->is_word(word)) {
            cursor_.take();
            return true;
        }
        return false;
    }

    bool accept_punct(char c) {
        const Token* tok = cursor_.peek();
        if (tok && tok->is_punct(c)) {
            cursor_.take();
            return true;
        }
        return false;
    }

    bool is_dialect_quoted(const Token& tok) const {
        return tok.kind == TokenKind::quoted_identifier && tok.text.front() == traits_.identifier_quote;
    }

    bool starts_name(const Token* tok) const {
        if (tok == nullptr) return false;
        if (tok->is_bare_word()) return !is_reserved_word(tok->text);
        return is_dialect_quoted(*tok);
    }

    std::string parse_name(std::string_view what) {
        const Token* tok = cursor_.peek();
        if (tok == nullptr) fail(tok, "expected " + std::string(what) + ", found end of input");
        if (tok->is_bare_word()) {
            if (is_reserved_word(tok->text)) fail(tok, "expected " + std::string(what) + ", found " + describe(tok));
            return std::string(cursor_.take().text);
        }
        if (tok->kind == TokenKind::quoted_identifier) {
            if (!is_dialect_quoted(*tok)) {
                fail(tok, std::string(tok->text.front() == '`' ? "backtick" : "double-quoted") +
                              " identifiers are not supported by the " + std::string(to_string(traits_.id)) +
                              " dialect");
            }
            std::string name = unquote(*tok);
            if (name.empty()) fail(tok, "empty quoted identifier");
            if (upper(name) == "TO") fail(tok, "TO is reserved and cannot be used as a name");
            cursor_.take();
            return name;
        }
        fail(tok, "expected " + std::string(what) + ", found " + describe(tok));
    }

    std::optional<std::string> parse_optional_alias() {
        if (accept_word("AS")) return parse_name("alias");
        if (starts_name(cursor_.peek())) return parse_name("alias");
        return std::nullopt;
    }

    std::variant<SelectAst, CreateTableAs> parse_statement() {
        const Token* tok = cursor_.peek();
        if (tok->is_word("SELECT")) return parse_select();
        if (tok->is_word("CREATE")) {
            cursor_.take();
            expect_word("TABLE");
            CreateTableAs ctas;
            ctas.table = parse_qualified_name("table name");
            expect_word("AS");
            const Token* sel = cursor_.peek();
            if (sel == nullptr || !sel->is_word("SELECT")) fail(sel, "expected SELECT, found " + describe(sel));
            ctas.select = parse_select();
            return ctas;
        }
        fail(tok, "expected SELECT or CREATE TABLE, found " + describe(tok));
    }

    std::string parse_qualified_name(std::string_view what) {
        std::string name = parse_name(what);
        while (accept_punct('.')) name += "." + parse_name(what);
        return name;
    }

    std::optional<Literal> try_literal() {
        const Token* tok = cursor_.peek();
        if (tok == nullptr) return std::nullopt;
        bool negative = false;
        if (tok->is_op("-")) {
            const Token* num = cursor_.peek(1);
            if (num == nullptr || num->kind != TokenKind::number) fail(num, "expected number after '-'");
            negative = true;
            cursor_.take();
            tok = cursor_.peek();
        }
        if (tok->kind == TokenKind::number) {
            const Token num = cursor_.take();
            return number_literal(num, negative);
        }
        if (tok->kind == TokenKind::string_literal ||
            (traits_.double_quote_is_string && tok->kind == TokenKind::quoted_identifier && tok->text.front() == '"')) {
            return Literal{unquote(cursor_.take())};
        }
        return std::nullopt;
    }

    Literal number_literal(const Token& tok, bool negative) {
        std::string text = (negative ? "-" : "") + std::string(tok.text);
        const bool is_float = text.find_first_of(".eE") != std::string::npos;
        if (is_float) {
            double v = 0;
            auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
            if (ec != std::errc{} || p != text.data() + text.size()) fail(&tok, "invalid number " + text);
            return Literal{v};
        }
        std::int64_t v = 0;
        auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
        if (ec != std::errc{} || p != text.data() + text.size()) fail(&tok, "integer literal out of range: " + text);
        return Literal{v};
    }

    ColumnRef parse_column_ref() {
        ColumnRef ref;
        ref.name = parse_name("column name");
        if (accept_punct('.')) {
            ref.qualifier = std::move(ref.name);
            ref.name = parse_name("column name");
        }
        return ref;
    }

    SelectAst parse_select() {
        expect_word("SELECT");
        SelectAst ast;
        if (const Token* tok = cursor_.peek(); tok && tok->is_op("*")) {
            cursor_.take();
            ast.star = true;
        } else {
            do {
                Projection proj;
                if (auto lit = try_literal()) {
                    proj.expr = std::move(*lit);
                } else {
                    proj.expr = parse_column_ref();
                }
                proj.alias = parse_optional_alias();
                ast.projections.push_back(std::move(proj));
            } while (accept_punct(','));
        }

        if (accept_word("FROM")) {
            do {
                FromItem item;
                item.table = parse_qualified_name("table name");
                item.alias = parse_optional_alias();
                ast.from.push_back(std::move(item));
            } while (accept_punct(','));
        } else if (ast.star) {
            fail(cursor_.peek(), "expected FROM, found " + describe(cursor_.peek()));
        }

        if (accept_word("WHERE")) {
            do {
                ast.where.push_back(parse_comparison());
            } while (accept_word("AND"));
        }

        if (accept_word("LIMIT")) {
            const Token* tok = cursor_.peek();
            if (tok == nullptr || tok->kind != TokenKind::number) fail(tok, "expected row count after LIMIT");
            Literal lit = number_literal(*tok, false);
            if (!std::holds_alternative<std::int64_t>(lit.value)) fail(tok, "LIMIT requires an integer");
            cursor_.take();
            ast.limit = std::get<std::int64_t>(lit.value);
        }
        return ast;
    }

    Comparison parse_comparison() {
        Comparison cmp;
        cmp.column = parse_column_ref();
        const Token* tok = cursor_.peek();
        if (tok == nullptr || tok->kind != TokenKind::op) fail(tok, "expected comparison operator, found " + describe(tok));
        if (tok->text == "=") cmp.op = CompareOp::eq;
        else if (tok->text == "<>" || tok->text == "!=") cmp.op = CompareOp::ne;
        else if (tok->text == "<") cmp.op = CompareOp::lt;
        else if (tok->text == "<=") cmp.op = CompareOp::le;
        else if (tok->text == ">") cmp.op = CompareOp::gt;
        else if (tok->text == ">=") cmp.op = CompareOp::ge;
        else fail(tok, "expected comparison operator, found " + describe(tok));
        cursor_.take();
        auto lit = try_literal();
        if (!lit) fail(cursor_.peek(), "expected literal, found " + describe(cursor_.peek()));
        cmp.value = std::move(*lit);
        return cmp;
    }

    const DialectTraits& traits_;
    TokenCursor cursor_;
};

class TraitsDialect final : public DialectParser {
public:
    explicit TraitsDialect(DialectTraits traits) : traits_(traits) {}

    DialectId id() const noexcept override { return traits_.id; }
    ParseOutcome parse_prefix(std::string_view source) const override {
        return SelectParser(traits_, source).run();
    }

private:
    DialectTraits traits_;
};

}  // namespace

const SelectAst& Statement::select() const {
    if (const auto* sel = std::get_if<SelectAst>(&body)) return *sel;
    return std::get<CreateTableAs>(body).select;
}

bool is_reserved_word(std::string_view word) {
    const std::string up = upper(word);
    return std::find(kReserved.begin(), kReserved.end(), up) != kReserved.end();
}

const DialectParser& dialect_parser(DialectId id) {
    static const TraitsDialect generic({DialectId::generic, '"', false});
    static const TraitsDialect mysql({DialectId::mysql, '`', true});
    switch (id) {
        case DialectId::generic: return generic;
        case DialectId::mysql: return mysql;
    }
    throw ValidationError("unknown dialect");
}

std::string_view to_string(DialectId id) {
    switch (id) {
        case DialectId::generic: return "generic";
        case DialectId::mysql: return "mysql";
    }
    return "unknown";
}

DialectId parse_dialect_id(std::string_view name) {
    for (DialectId id : registered_dialects()) {
        if (to_string(id) == name) return id;
    }
    throw ValidationError("unknown dialect '" + std::string(name) + "' (expected generic or mysql)");
}

std::vector<DialectId> registered_dialects() { return {DialectId::generic, DialectId::mysql}; }

std::vector<DialectBehavior> dialect_differences() {
    return {
        {DialectId::generic, "backtick_identifiers", false},
        {DialectId::generic, "double_quoted_identifiers", true},
        {DialectId::generic, "bare_aliases", true},
        {DialectId::generic, "to_as_alias", false},
        {DialectId::mysql, "backtick_identifiers", true},
        {DialectId::mysql, "double_quoted_identifiers", false},
        {DialectId::mysql, "bare_aliases", true},
        {DialectId::mysql, "to_as_alias", false},
    };
}

}  // namespace sqlbridge
