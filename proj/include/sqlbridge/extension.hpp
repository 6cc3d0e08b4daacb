#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "sqlbridge/attributes.hpp"
#include "sqlbridge/error.hpp"

namespace sqlbridge {

/// Model definition named after TO TRAIN: `Name`, `pkg.Name` or
/// `org/image.pkg.Name`.
struct ModelRef {
    std::optional<std::string> image;
    std::optional<std::string> package;
    std::string name;

    /// `package.name` (or `name`), the key used for estimator lookup.
    std::string qualified_name() const;
    std::string to_string() const;
    bool operator==(const ModelRef&) const = default;
};

/// Where a trained model lives: a name in the local model store or a URL.
struct ModelTarget {
    enum class Kind { local_name, url };
    Kind kind = Kind::local_name;
    std::string value;

    std::string to_string() const;
    bool operator==(const ModelTarget&) const = default;
};

struct TrainClause {
    ModelRef model;
    AttrMap attributes;
    std::optional<std::vector<std::string>> columns;
    std::optional<std::string> label;
    ModelTarget into;
    bool operator==(const TrainClause&) const = default;
};

struct PredictClause {
    /// 1 to 3 components; the last names the output column, the rest the
    /// result table.
    std::vector<std::string> result_field;
    ModelTarget model;
    bool operator==(const PredictClause&) const = default;
};

struct ExplainClause {
    ModelTarget model;
    AttrMap attributes;
    bool operator==(const ExplainClause&) const = default;
};

using ExtensionClause = std::variant<TrainClause, PredictClause, ExplainClause>;

struct ExtensionOutcome {
    std::optional<ExtensionClause> clause;
    std::size_t stop_at = 0;
    std::optional<SyntaxError> error;
};

/// Parses `TO TRAIN|PREDICT|EXPLAIN ...` through its terminating semicolon (or
/// end of input). Positions are relative to `source`.
ExtensionOutcome parse_extension(std::string_view source);

/// Parses the `key=value, ...` list that follows WITH. Throws ParseFailure.
AttrMap parse_attributes(std::string_view source);

/// Throws ParseFailure (position relative to `text`).
ModelRef parse_model_ref(std::string_view text);

/// Canonical clause text ending in ';'.
std::string render_extension(const ExtensionClause& clause);

std::string_view extension_keyword(const ExtensionClause& clause);

}  // namespace sqlbridge
