#include "sqlbridge/attributes.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <type_traits>

namespace sqlbridge {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

std::string quote_single(const std::string& s) {
    std::string out = "'";
    for (char c : s) {
        out.push_back(c);
        if (c == '\'') out.push_back('\'');
    }
    out.push_back('\'');
    return out;
}

}  // namespace

bool AttrMap::insert(std::string key, AttrValue value) {
    if (find(key) != nullptr) return false;
    entries_.emplace_back(std::move(key), std::move(value));
    return true;
}

const AttrValue* AttrMap::find(std::string_view key) const {
    auto it = std::find_if(entries_.begin(), entries_.end(), [&](const Entry& e) { return e.first == key; });
    return it == entries_.end() ? nullptr : &it->second;
}

std::optional<double> AttrMap::number(std::string_view key) const {
    const AttrValue* v = find(key);
    if (v == nullptr) return std::nullopt;
    if (const auto* i = std::get_if<std::int64_t>(v)) return static_cast<double>(*i);
    if (const auto* d = std::get_if<double>(v)) return *d;
    return std::nullopt;
}

std::string format_double(double value) {
    char buf[64];
    auto [p, ec] = std::to_chars(buf, buf + sizeof buf, value);
    std::string out(buf, p);
    if (std::isfinite(value) && out.find_first_of(".en") == std::string::npos) out += ".0";
    return out;
}

std::string render_attr_scalar(const AttrScalar& value) {
    return std::visit(overloaded{
                          [](std::int64_t v) { return std::to_string(v); },
                          [](double v) { return format_double(v); },
                          [](bool v) { return std::string(v ? "true" : "false"); },
                          [](const std::string& v) { return quote_single(v); },
                          [](const Identifier& v) { return v.name; },
                      },
                      value);
}

std::string render_attr_value(const AttrValue& value) {
    if (const auto* list = std::get_if<AttrList>(&value)) {
        std::string out = "[";
        for (std::size_t i = 0; i < list->items.size(); ++i) {
            if (i) out += ", ";
            out += render_attr_scalar(list->items[i]);
        }
        return out + "]";
    }
    return std::visit(
        [](const auto& v) -> std::string {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, AttrList>) {
                return {};
            } else {
                return render_attr_scalar(AttrScalar{v});
            }
        },
        value);
}

std::string attr_kind_name(const AttrValue& value) {
    static constexpr const char* names[] = {"int", "float", "bool", "string", "identifier", "list"};
    return names[value.index()];
}

}  // namespace sqlbridge
