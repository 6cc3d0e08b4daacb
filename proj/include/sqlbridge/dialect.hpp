#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sqlbridge/ast.hpp"
#include "sqlbridge/error.hpp"

namespace sqlbridge {

enum class DialectId { generic, mysql };

/// Result of one dialect-parser call.
///
/// On success every statement of the input was consumed and `stop_at` is the
/// input length. On failure `statements` is empty, `stop_at` is 0 and
/// `error->position` is the start of the first token that could not be
/// consumed (or of the bad lexeme).
struct ParseOutcome {
    std::vector<Statement> statements;
    std::size_t stop_at = 0;
    std::optional<SyntaxError> error;

    bool ok() const noexcept { return !error.has_value(); }
};

/// Contract every dialect parser implements. Errors are returned by value;
/// nothing is thrown for malformed input.
class DialectParser {
public:
    virtual ~DialectParser() = default;

    virtual DialectId id() const noexcept = 0;
    /// Greedily parses complete statements from the start of `source`.
    virtual ParseOutcome parse_prefix(std::string_view source) const = 0;
};

const DialectParser& dialect_parser(DialectId id);
std::string_view to_string(DialectId id);
/// Throws ValidationError for unknown names.
DialectId parse_dialect_id(std::string_view name);
std::vector<DialectId> registered_dialects();

inline ParseOutcome parse_prefix(DialectId id, std::string_view source) {
    return dialect_parser(id).parse_prefix(source);
}

/// True for words no dialect accepts as a table name or alias.
bool is_reserved_word(std::string_view word);

struct DialectBehavior {
    DialectId dialect;
    std::string feature;
    bool accepted;
};

/// Behavior matrix: backtick_identifiers, double_quoted_identifiers,
/// bare_aliases, to_as_alias.
std::vector<DialectBehavior> dialect_differences();

}  // namespace sqlbridge
