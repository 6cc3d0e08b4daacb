#include "sqlbridge/ast.hpp"

#include <sstream>

#include "sqlbridge/attributes.hpp"
#include "sqlbridge/collab.hpp"

namespace sqlbridge {

std::string_view to_string(CompareOp op) {
    switch (op) {
        case CompareOp::eq: return "=";
        case CompareOp::ne: return "<>";
        case CompareOp::lt: return "<";
        case CompareOp::le: return "<=";
        case CompareOp::gt: return ">";
        case CompareOp::ge: return ">=";
    }
    return "?";
}

std::string to_string(const Literal& literal) {
    if (const auto* i = std::get_if<std::int64_t>(&literal.value)) return std::to_string(*i);
    if (const auto* d = std::get_if<double>(&literal.value)) return format_double(*d);
    std::string out = "'";
    for (char c : std::get<std::string>(literal.value)) {
        out.push_back(c);
        if (c == '\'') out.push_back('\'');
    }
    return out + "'";
}

std::string_view to_string(StatementKind kind) {
    return kind == StatementKind::select ? "select" : "create_table_as";
}

namespace {

std::string escaped(std::string_view text) {
    std::string out = "\"";
    for (char c : text) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            case '\r': out += "\\r"; break;
            default: out.push_back(c);
        }
    }
    return out + "\"";
}

std::string optional_text(const std::optional<std::string>& value) { return value ? *value : "-"; }

void dump_select(std::ostream& os, const SelectAst& ast, const std::string& indent) {
    os << indent << "projections: ";
    if (ast.star) {
        os << "*";
    } else {
        for (std::size_t i = 0; i < ast.projections.size(); ++i) {
            const auto& proj = ast.projections[i];
            if (i) os << ", ";
            if (const auto* col = std::get_if<ColumnRef>(&proj.expr)) {
                os << col->to_string();
            } else {
                os << to_string(std::get<Literal>(proj.expr));
            }
            if (proj.alias) os << " AS " << *proj.alias;
        }
    }
    os << "\n" << indent << "from: ";
    if (ast.from.empty()) os << "-";
    for (std::size_t i = 0; i < ast.from.size(); ++i) {
        if (i) os << ", ";
        os << ast.from[i].table;
        if (ast.from[i].alias) os << " AS " << *ast.from[i].alias;
    }
    os << "\n" << indent << "where: ";
    if (ast.where.empty()) os << "-";
    for (std::size_t i = 0; i < ast.where.size(); ++i) {
        if (i) os << " AND ";
        os << ast.where[i].column.to_string() << " " << to_string(ast.where[i].op) << " "
           << to_string(ast.where[i].value);
    }
    os << "\n" << indent << "limit: " << (ast.limit ? std::to_string(*ast.limit) : "-") << "\n";
}

void dump_attrs(std::ostream& os, const AttrMap& attrs, const std::string& indent) {
    os << indent << "attributes:";
    if (attrs.empty()) os << " -";
    os << "\n";
    for (const auto& [key, value] : attrs.entries()) {
        os << indent << "  " << key << ": " << attr_kind_name(value) << " " << render_attr_value(value) << "\n";
    }
}

std::string target_text(const ModelTarget& target) {
    return std::string(target.kind == ModelTarget::Kind::url ? "url " : "local_name ") + target.value;
}

void dump_extension(std::ostream& os, const ExtensionClause& ext, const std::string& indent) {
    os << indent << "extension: " << extension_keyword(ext) << "\n";
    const std::string in = indent + "  ";
    if (const auto* train = std::get_if<TrainClause>(&ext)) {
        os << in << "model: image=" << optional_text(train->model.image)
           << " package=" << optional_text(train->model.package) << " name=" << train->model.name << "\n";
        dump_attrs(os, train->attributes, in);
        os << in << "columns: ";
        if (!train->columns) {
            os << "-";
        } else {
            for (std::size_t i = 0; i < train->columns->size(); ++i) os << (i ? ", " : "") << (*train->columns)[i];
        }
        os << "\n" << in << "label: " << optional_text(train->label) << "\n";
        os << in << "into: " << target_text(train->into) << "\n";
    } else if (const auto* predict = std::get_if<PredictClause>(&ext)) {
        os << in << "result_field: ";
        for (std::size_t i = 0; i < predict->result_field.size(); ++i) os << (i ? "." : "") << predict->result_field[i];
        os << "\n" << in << "using: " << target_text(predict->model) << "\n";
    } else {
        const auto& explain = std::get<ExplainClause>(ext);
        os << in << "model: " << target_text(explain.model) << "\n";
        dump_attrs(os, explain.attributes, in);
    }
}

}  // namespace

std::string dump_program(const ParsedProgram& program) {
    std::ostringstream os;
    os << "statements: " << program.statements.size() << "\n";
    for (std::size_t i = 0; i < program.statements.size(); ++i) {
        const Statement& stmt = program.statements[i];
        os << "- statement " << i << "\n";
        if (i < program.spans.size()) os << "  span: [" << program.spans[i].start << ", " << program.spans[i].end << ")\n";
        os << "  kind: " << to_string(stmt.kind()) << "\n";
        os << "  text: " << escaped(stmt.raw_text) << "\n";
        if (const auto* ctas = std::get_if<CreateTableAs>(&stmt.body)) os << "  table: " << ctas->table << "\n";
        dump_select(os, stmt.select(), "  ");
        if (stmt.extension) {
            dump_extension(os, *stmt.extension, "  ");
        } else {
            os << "  extension: -\n";
        }
    }
    return os.str();
}

}  // namespace sqlbridge
