#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace sqlbridge {

/// Bare word attribute value, e.g. `optimizer=Adam`.
struct Identifier {
    std::string name;
    bool operator==(const Identifier&) const = default;
};

using AttrScalar = std::variant<std::int64_t, double, bool, std::string, Identifier>;

/// One level of list nesting; all items share one scalar kind.
struct AttrList {
    std::vector<AttrScalar> items;
    bool operator==(const AttrList&) const = default;
};

using AttrValue = std::variant<std::int64_t, double, bool, std::string, Identifier, AttrList>;

/// Insertion-ordered map of WITH attributes with unique dotted keys.
class AttrMap {
public:
    using Entry = std::pair<std::string, AttrValue>;

    /// Returns false (and leaves the map unchanged) if the key exists.
    bool insert(std::string key, AttrValue value);
    const AttrValue* find(std::string_view key) const;
    std::optional<double> number(std::string_view key) const;

    bool empty() const noexcept { return entries_.empty(); }
    std::size_t size() const noexcept { return entries_.size(); }
    const std::vector<Entry>& entries() const noexcept { return entries_; }

    bool operator==(const AttrMap&) const = default;

private:
    std::vector<Entry> entries_;
};

std::string attr_kind_name(const AttrValue& value);
/// Canonical source form; re-parsing it yields an equal value.
std::string render_attr_value(const AttrValue& value);
std::string render_attr_scalar(const AttrScalar& value);
/// Shortest round-trip decimal form that always reads back as a float.
std::string format_double(double value);

}  // namespace sqlbridge
