#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace sqlbridge {

enum class DType { Int, Float, String };

/// monostate is SQL NULL (an empty CSV cell).
using Value = std::variant<std::monostate, std::int64_t, double, std::string>;
using Row = std::vector<Value>;

struct FieldDesc {
    std::string name;
    DType dtype = DType::String;
    bool operator==(const FieldDesc&) const = default;
};

struct ResultSet {
    std::vector<FieldDesc> schema;
    std::vector<Row> rows;

    std::optional<std::size_t> column_index(std::string_view name) const;
    bool operator==(const ResultSet&) const = default;
};

std::string_view to_string(DType dtype);
DType parse_dtype(std::string_view name);

/// CSV cell text: integers in decimal, floats in shortest round-trip form with
/// a '.' or exponent, NULL as the empty string.
std::string format_value(const Value& value);
bool is_null(const Value& value);
/// Numeric view of an INT or FLOAT value; nullopt otherwise.
std::optional<double> as_number(const Value& value);

/// Header row plus one line per row; minimal double-quote quoting.
std::string write_csv(const ResultSet& result);
/// Parses CSV text, inferring dtypes per column (all-int INT, all-numeric
/// FLOAT, else STRING; empty cells are NULL and ignored for inference).
/// Throws ExecutionError on ragged rows or duplicate headers.
ResultSet read_csv(std::string_view text);

}  // namespace sqlbridge
