#include "sqlbridge/collab.hpp"

#include "sqlbridge/extension.hpp"

namespace sqlbridge {

namespace {

bool starts_extension(std::string_view text) {
    Lexer lexer(text);
    try {
        auto to = lexer.next_token();
        if (!to || !to->is_word("TO")) return false;
        auto verb = lexer.next_token();
        return verb && (verb->is_word("TRAIN") || verb->is_word("PREDICT") || verb->is_word("EXPLAIN"));
    } catch (const LexError&) {
        return false;
    }
}

}  // namespace

ParseOutcome parse_dialect(const DialectParser& dialect, std::string_view program, DialectPass* trace) {
    ParseOutcome first = dialect.parse_prefix(program);
    if (trace) {
        trace->first_error = first.error;
        trace->second_call = false;
    }
    if (first.ok()) {
        if (trace) trace->stop_at = first.stop_at;
        return first;
    }

    const std::size_t p = first.error->position;
    ParseOutcome second = dialect.parse_prefix(program.substr(0, p));
    if (trace) trace->second_call = true;
    if (!second.ok()) return second;
    if (second.statements.empty()) return first;
    second.stop_at = p;
    if (trace) trace->stop_at = p;
    return second;
}

void append_extension(std::vector<Statement>& statements, ExtensionClause ext, std::string text,
                      std::size_t position) {
    if (statements.empty()) {
        throw ParseFailure(position, "extension clause requires a preceding SELECT");
    }
    Statement& last = statements.back();
    if (last.kind() != StatementKind::select || last.terminated) {
        throw ParseFailure(position, "extension clause requires a preceding SELECT");
    }
    if (last.extension) throw ParseFailure(position, "statement already carries an extension clause");
    last.extension = std::move(ext);
    last.extension_text = std::move(text);
}

ParsedProgram parse_program(DialectId dialect_id, std::string_view program) {
    const DialectParser& dialect = dialect_parser(dialect_id);
    ParsedProgram out;
    std::size_t base = 0;
    std::size_t span_start = 0;

    while (true) {
        const std::string_view rest = program.substr(base);
        DialectPass pass;
        pass.base = base;
        ParseOutcome outcome = parse_dialect(dialect, rest, &pass);
        if (pass.first_error) pass.first_error->position += base;
        pass.stop_at += base;
        out.passes.push_back(pass);

        if (!outcome.ok()) {
            const std::size_t pos = base + outcome.error->position;
            if (starts_extension(program.substr(pos))) {
                throw ParseFailure(pos, "extension clause requires a preceding SELECT");
            }
            throw ParseFailure(pos, outcome.error->message);
        }

        // Statements closed by ';' get their span now; an unterminated final
        // statement waits for its extension clause.
        for (auto& stmt : outcome.statements) {
            stmt.offset += base;
            if (stmt.terminated) {
                const std::size_t end = stmt.offset + stmt.raw_text.size();
                out.spans.push_back({span_start, end});
                span_start = end;
            }
            out.statements.push_back(std::move(stmt));
        }
        const std::size_t stop = base + outcome.stop_at;
        if (stop >= program.size()) {
            if (out.spans.size() < out.statements.size()) {
                out.spans.push_back({span_start, program.size()});
            }
            return out;
        }

        // The dialect parser stopped early; the rest must be an extension clause.
        const std::string_view ext_source = program.substr(stop);
        ExtensionOutcome ext = parse_extension(ext_source);
        if (!ext.clause) {
            if (!starts_extension(ext_source) && pass.first_error) {
                throw ParseFailure(pass.first_error->position, pass.first_error->message);
            }
            throw ParseFailure(stop + ext.error->position, ext.error->message);
        }
        append_extension(out.statements, std::move(*ext.clause), std::string(ext_source.substr(0, ext.stop_at)), stop);
        base = stop + ext.stop_at;
        out.spans.push_back({span_start, base});
        span_start = base;
        if (base >= program.size()) return out;
    }
}

}  // namespace sqlbridge
