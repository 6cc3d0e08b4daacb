#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sqlbridge/dialect.hpp"
#include "sqlbridge/lexer.hpp"

namespace sqlbridge {

/// Record of one parse_dialect call, kept for inspecting the two-call protocol.
struct DialectPass {
    std::size_t base = 0;                     // offset of the slice in the program
    std::optional<SyntaxError> first_error;   // first call's error, rebased
    bool second_call = false;
    std::size_t stop_at = 0;                  // rebased
};

struct ParsedProgram {
    std::vector<Statement> statements;
    /// Contiguous per-statement ranges into the program: each starts where the
    /// previous ended and ends one past its ';' (extension included).
    std::vector<StatementSpan> spans;
    std::vector<DialectPass> passes;
};

/// Calls the dialect parser up to twice. If the first call fails at p, the
/// prefix [0, p) is parsed again; its success yields (statements, stop_at = p).
/// A second call that consumes nothing reports the first call's error.
ParseOutcome parse_dialect(const DialectParser& dialect, std::string_view program, DialectPass* trace = nullptr);

/// Alternates dialect and extension parsing over the whole program. Throws
/// ParseFailure with a position relative to `program`.
ParsedProgram parse_program(DialectId dialect, std::string_view program);

/// Attaches `ext` to the last statement. Throws ParseFailure at `position`.
void append_extension(std::vector<Statement>& statements, ExtensionClause ext, std::string text,
                      std::size_t position = 0);

/// Deterministic, human-readable dump of a parsed program.
std::string dump_program(const ParsedProgram& program);

}  // namespace sqlbridge
