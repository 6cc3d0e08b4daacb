#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "sqlbridge/extension.hpp"

namespace sqlbridge {

struct ColumnRef {
    std::optional<std::string> qualifier;
    std::string name;

    std::string to_string() const { return qualifier ? *qualifier + "." + name : name; }
    bool operator==(const ColumnRef&) const = default;
};

struct Literal {
    std::variant<std::int64_t, double, std::string> value;
    bool operator==(const Literal&) const = default;
};

struct Projection {
    std::variant<ColumnRef, Literal> expr;
    std::optional<std::string> alias;
    bool operator==(const Projection&) const = default;
};

struct FromItem {
    std::string table;
    std::optional<std::string> alias;

    const std::string& visible_name() const { return alias ? *alias : table; }
    bool operator==(const FromItem&) const = default;
};

enum class CompareOp { eq, ne, lt, le, gt, ge };

struct Comparison {
    ColumnRef column;
    CompareOp op = CompareOp::eq;
    Literal value;
    bool operator==(const Comparison&) const = default;
};

struct SelectAst {
    bool star = false;
    std::vector<Projection> projections;  // empty when star
    std::vector<FromItem> from;
    std::vector<Comparison> where;        // conjunction
    std::optional<std::int64_t> limit;
    bool operator==(const SelectAst&) const = default;
};

struct CreateTableAs {
    std::string table;
    SelectAst select;
    bool operator==(const CreateTableAs&) const = default;
};

enum class StatementKind { select, create_table_as };

struct Statement {
    std::variant<SelectAst, CreateTableAs> body;
    /// Exact consumed slice, from the first token through the terminating ';'
    /// (or through the end of the text the dialect parser was given).
    std::string raw_text;
    /// Byte offset of raw_text in the text that was parsed.
    std::size_t offset = 0;
    bool terminated = false;
    std::optional<ExtensionClause> extension;
    std::string extension_text;

    StatementKind kind() const {
        return std::holds_alternative<SelectAst>(body) ? StatementKind::select : StatementKind::create_table_as;
    }
    const SelectAst& select() const;
    /// raw_text followed by the extension clause text, as written.
    std::string full_text() const { return raw_text + extension_text; }
    bool operator==(const Statement&) const = default;
};

std::string_view to_string(CompareOp op);
std::string to_string(const Literal& literal);
std::string_view to_string(StatementKind kind);

}  // namespace sqlbridge
