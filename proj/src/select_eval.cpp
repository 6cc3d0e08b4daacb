#include <cctype>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include "sqlbridge/engine.hpp"

namespace sqlbridge {

namespace {

bool valid_table_name(std::string_view name) {
    if (name.empty() || name.front() == '.' || name.back() == '.') return false;
    for (char c : name) {
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.')) return false;
    }
    return name.find("..") == std::string_view::npos;
}

struct ColumnSlot {
    std::size_t table;
    std::size_t column;
};

class SelectEvaluator {
public:
    SelectEvaluator(const SelectAst& select, const TableStore& store) : select_(select) {
        std::set<std::string> visible;
        for (const FromItem& item : select.from) {
            if (!visible.insert(item.visible_name()).second) {
                throw ExecutionError("table name " + item.visible_name() + " appears twice in FROM");
            }
            tables_.push_back(store.load(item.table));
        }
    }

    ResultSet run() {
        ResultSet out;
        std::vector<std::function<Value(const std::vector<std::size_t>&)>> getters;
        build_projection(out.schema, getters);
        std::set<std::string> names;
        for (const auto& field : out.schema) {
            if (!names.insert(field.name).second) {
                throw ExecutionError("duplicate output column " + field.name + "; use an alias");
            }
        }

        std::vector<std::pair<ColumnSlot, const Comparison*>> filters;
        for (const Comparison& cmp : select_.where) {
            const ColumnSlot slot = resolve(cmp.column);
            check_comparable(slot, cmp);
            filters.emplace_back(slot, &cmp);
        }

        const std::int64_t limit = select_.limit.value_or(-1);
        if (limit == 0) return out;
        std::vector<std::size_t> cursor(tables_.size(), 0);
        for (const auto& t : tables_) {
            if (t.rows.empty()) return out;
        }
        while (true) {
            bool keep = true;
            for (const auto& [slot, cmp] : filters) {
                if (!matches(tables_[slot.table].rows[cursor[slot.table]][slot.column], *cmp)) {
                    keep = false;
                    break;
                }
            }
            if (keep) {
                Row row;
                row.reserve(getters.size());
                for (const auto& get : getters) row.push_back(get(cursor));
                out.rows.push_back(std::move(row));
                if (limit > 0 && static_cast<std::int64_t>(out.rows.size()) >= limit) break;
            }
            // Odometer over the cross product; the last table varies fastest.
            std::size_t k = tables_.size();
            while (k > 0) {
                --k;
                if (++cursor[k] < tables_[k].rows.size()) break;
                cursor[k] = 0;
                if (k == 0) return out;
            }
            if (tables_.empty()) break;
        }
        return out;
    }

private:
    ColumnSlot resolve(const ColumnRef& ref) const {
        std::optional<ColumnSlot> found;
        for (std::size_t t = 0; t < tables_.size(); ++t) {
            if (ref.qualifier && *ref.qualifier != select_.from[t].visible_name()) continue;
            if (auto c = tables_[t].column_index(ref.name)) {
                if (found) throw ExecutionError("ambiguous column " + ref.to_string());
                found = ColumnSlot{t, *c};
            }
        }
        if (!found) throw ExecutionError("unknown column " + ref.to_string());
        return *found;
    }

    void build_projection(std::vector<FieldDesc>& schema,
                          std::vector<std::function<Value(const std::vector<std::size_t>&)>>& getters) const {
        if (select_.star) {
            for (std::size_t t = 0; t < tables_.size(); ++t) {
                for (std::size_t c = 0; c < tables_[t].schema.size(); ++c) {
                    for (const auto& field : schema) {
                        if (field.name == tables_[t].schema[c].name) {
                            throw ExecutionError("unsupported at execution: SELECT * over tables sharing column " +
                                                 field.name);
                        }
                    }
                    schema.push_back(tables_[t].schema[c]);
                    getters.push_back([this, t, c](const std::vector<std::size_t>& cur) {
                        return tables_[t].rows[cur[t]][c];
                    });
                }
            }
            return;
        }
        for (const Projection& proj : select_.projections) {
            if (const auto* ref = std::get_if<ColumnRef>(&proj.expr)) {
                const ColumnSlot slot = resolve(*ref);
                schema.push_back({proj.alias.value_or(ref->name), tables_[slot.table].schema[slot.column].dtype});
                getters.push_back([this, slot](const std::vector<std::size_t>& cur) {
                    return tables_[slot.table].rows[cur[slot.table]][slot.column];
                });
            } else {
                const Literal& lit = std::get<Literal>(proj.expr);
                Value value = std::visit([](const auto& v) -> Value { return v; }, lit.value);
                const DType dtype = std::holds_alternative<std::int64_t>(lit.value) ? DType::Int
                                    : std::holds_alternative<double>(lit.value)     ? DType::Float
                                                                                    : DType::String;
                schema.push_back({proj.alias.value_or(to_string(lit)), dtype});
                getters.push_back([value](const std::vector<std::size_t>&) { return value; });
            }
        }
    }

    void check_comparable(const ColumnSlot& slot, const Comparison& cmp) const {
        const DType dtype = tables_[slot.table].schema[slot.column].dtype;
        const bool literal_is_string = std::holds_alternative<std::string>(cmp.value.value);
        if ((dtype == DType::String) != literal_is_string) {
            throw ExecutionError("type mismatch: " + cmp.column.to_string() + " is " + std::string(to_string(dtype)) +
                                 " but compared with " + to_string(cmp.value));
        }
    }

    static bool apply(CompareOp op, int order) {
        switch (op) {
            case CompareOp::eq: return order == 0;
            case CompareOp::ne: return order != 0;
            case CompareOp::lt: return order < 0;
            case CompareOp::le: return order <= 0;
            case CompareOp::gt: return order > 0;
            case CompareOp::ge: return order >= 0;
        }
        return false;
    }

    static bool matches(const Value& value, const Comparison& cmp) {
        if (is_null(value)) return false;
        if (const auto* s = std::get_if<std::string>(&value)) {
            const int order = s->compare(std::get<std::string>(cmp.value.value));
            return apply(cmp.op, order < 0 ? -1 : order > 0 ? 1 : 0);
        }
        const auto* li = std::get_if<std::int64_t>(&cmp.value.value);
        const auto* vi = std::get_if<std::int64_t>(&value);
        if (li && vi) return apply(cmp.op, *vi < *li ? -1 : *vi > *li ? 1 : 0);
        const double a = *as_number(value);
        const double b = li ? static_cast<double>(*li) : std::get<double>(cmp.value.value);
        return apply(cmp.op, a < b ? -1 : a > b ? 1 : 0);
    }

    const SelectAst& select_;
    std::vector<ResultSet> tables_;
};

}  // namespace

std::filesystem::path TableStore::table_path(std::string_view name) const {
    if (!valid_table_name(name)) throw ExecutionError("invalid table name " + std::string(name));
    return root_ / (std::string(name) + ".csv");
}

bool TableStore::exists(std::string_view name) const { return std::filesystem::exists(table_path(name)); }

ResultSet TableStore::load(std::string_view name) const {
    const auto path = table_path(name);
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ExecutionError("unknown table " + std::string(name));
    std::ostringstream buf;
    buf << in.rdbuf();
    try {
        return read_csv(buf.str());
    } catch (const ExecutionError& e) {
        throw ExecutionError("table " + std::string(name) + ": " + e.what());
    }
}

void TableStore::save(std::string_view name, const ResultSet& table) const {
    const auto path = table_path(name);
    std::error_code ec;
    std::filesystem::create_directories(root_, ec);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write table file " + path.string());
    out << write_csv(table);
    if (!out) throw IoError("failed writing table file " + path.string());
}

ResultSet eval_select(const SelectAst& select, const TableStore& tables) {
    return SelectEvaluator(select, tables).run();
}

}  // namespace sqlbridge
