#include "sqlbridge/table.hpp"

#include <charconv>
#include <set>

#include "sqlbridge/attributes.hpp"
#include "sqlbridge/error.hpp"

namespace sqlbridge {

namespace {

bool parses_int(std::string_view s, std::int64_t* out = nullptr) {
    std::int64_t v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size() || s.empty()) return false;
    if (out) *out = v;
    return true;
}

bool parses_float(std::string_view s, double* out = nullptr) {
    double v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size() || s.empty()) return false;
    if (out) *out = v;
    return true;
}

bool needs_quotes(std::string_view s) { return s.find_first_of(",\"\r\n") != std::string_view::npos; }

void append_cell(std::string& out, std::string_view s) {
    if (!needs_quotes(s)) {
        out += s;
        return;
    }
    out.push_back('"');
    for (char c : s) {
        out.push_back(c);
        if (c == '"') out.push_back('"');
    }
    out.push_back('"');
}

/// Splits CSV text into records of raw cells; `quoted` marks cells that were
/// written in quotes (a quoted empty cell is an empty string, not NULL).
struct Cell {
    std::string text;
    bool quoted = false;
};

std::vector<std::vector<Cell>> split_records(std::string_view text) {
    std::vector<std::vector<Cell>> records;
    std::vector<Cell> record;
    Cell cell;
    bool in_quotes = false;
    bool any = false;
    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (in_quotes) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    cell.text.push_back('"');
                    ++i;
                } else {
                    in_quotes = false;
                }
            } else {
                cell.text.push_back(c);
            }
            continue;
        }
        switch (c) {
            case '"':
                in_quotes = true;
                cell.quoted = true;
                any = true;
                break;
            case ',':
                record.push_back(std::move(cell));
                cell = {};
                any = true;
                break;
            case '\r':
                break;
            case '\n':
                if (any || !cell.text.empty()) {
                    record.push_back(std::move(cell));
                    records.push_back(std::move(record));
                }
                record = {};
                cell = {};
                any = false;
                break;
            default:
                cell.text.push_back(c);
                any = true;
        }
    }
    if (in_quotes) throw ExecutionError("CSV: unterminated quoted field");
    if (any || !cell.text.empty()) {
        record.push_back(std::move(cell));
        records.push_back(std::move(record));
    }
    return records;
}

}  // namespace

std::optional<std::size_t> ResultSet::column_index(std::string_view name) const {
    for (std::size_t i = 0; i < schema.size(); ++i) {
        if (schema[i].name == name) return i;
    }
    return std::nullopt;
}

std::string_view to_string(DType dtype) {
    switch (dtype) {
        case DType::Int: return "INT";
        case DType::Float: return "FLOAT";
        case DType::String: return "STRING";
    }
    return "?";
}

DType parse_dtype(std::string_view name) {
    if (name == "INT") return DType::Int;
    if (name == "FLOAT") return DType::Float;
    if (name == "STRING") return DType::String;
    throw ExecutionError("unknown dtype " + std::string(name));
}

std::string format_value(const Value& value) {
    if (const auto* i = std::get_if<std::int64_t>(&value)) return std::to_string(*i);
    if (const auto* d = std::get_if<double>(&value)) return format_double(*d);
    if (const auto* s = std::get_if<std::string>(&value)) return *s;
    return {};
}

bool is_null(const Value& value) { return std::holds_alternative<std::monostate>(value); }

std::optional<double> as_number(const Value& value) {
    if (const auto* i = std::get_if<std::int64_t>(&value)) return static_cast<double>(*i);
    if (const auto* d = std::get_if<double>(&value)) return *d;
    return std::nullopt;
}

std::string write_csv(const ResultSet& result) {
    std::string out;
    for (std::size_t i = 0; i < result.schema.size(); ++i) {
        if (i) out.push_back(',');
        append_cell(out, result.schema[i].name);
    }
    out.push_back('\n');
    for (const Row& row : result.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out.push_back(',');
            const std::string cell = format_value(row[i]);
            // Strings that would read back as NULL or as a number get quoted.
            if (std::holds_alternative<std::string>(row[i]) && (cell.empty() || parses_float(cell))) {
                out += "\"" + cell + "\"";
            } else {
                append_cell(out, cell);
            }
        }
        out.push_back('\n');
    }
    return out;
}

ResultSet read_csv(std::string_view text) {
    auto records = split_records(text);
    if (records.empty()) throw ExecutionError("CSV: missing header row");
    ResultSet result;
    std::set<std::string> names;
    for (auto& cell : records.front()) {
        if (cell.text.empty()) throw ExecutionError("CSV: empty column name");
        if (!names.insert(cell.text).second) throw ExecutionError("CSV: duplicate column " + cell.text);
        result.schema.push_back({cell.text, DType::Int});
    }
    const std::size_t width = result.schema.size();
    for (std::size_t r = 1; r < records.size(); ++r) {
        if (records[r].size() != width) {
            throw ExecutionError("CSV: row " + std::to_string(r) + " has " + std::to_string(records[r].size()) +
                                 " fields, expected " + std::to_string(width));
        }
    }

    for (std::size_t c = 0; c < width; ++c) {
        bool all_int = true;
        bool all_num = true;
        for (std::size_t r = 1; r < records.size(); ++r) {
            const Cell& cell = records[r][c];
            if (cell.text.empty() && !cell.quoted) continue;
            if (cell.quoted) {
                all_int = all_num = false;
                break;
            }
            if (!parses_int(cell.text)) all_int = false;
            if (!parses_float(cell.text)) all_num = false;
        }
        bool any_value = false;
        for (std::size_t r = 1; r < records.size(); ++r) {
            if (!records[r][c].text.empty() || records[r][c].quoted) any_value = true;
        }
        if (!any_value) all_int = all_num = false;
        result.schema[c].dtype = all_int ? DType::Int : all_num ? DType::Float : DType::String;
    }

    for (std::size_t r = 1; r < records.size(); ++r) {
        Row row;
        row.reserve(width);
        for (std::size_t c = 0; c < width; ++c) {
            const Cell& cell = records[r][c];
            if (cell.text.empty() && !cell.quoted) {
                row.emplace_back(std::monostate{});
                continue;
            }
            switch (result.schema[c].dtype) {
                case DType::Int: {
                    std::int64_t v = 0;
                    parses_int(cell.text, &v);
                    row.emplace_back(v);
                    break;
                }
                case DType::Float: {
                    double v = 0;
                    parses_float(cell.text, &v);
                    row.emplace_back(v);
                    break;
                }
                case DType::String:
                    row.emplace_back(cell.text);
                    break;
            }
        }
        result.rows.push_back(std::move(row));
    }
    return result;
}

}  // namespace sqlbridge
