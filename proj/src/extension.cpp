#include "sqlbridge/extension.hpp"

#include <array>
#include <cctype>
#include <charconv>

#include "sqlbridge/lexer.hpp"
#include "token_cursor.hpp"

namespace sqlbridge {

namespace {

using detail::describe;
using detail::TokenCursor;

bool is_ident(std::string_view s) {
    if (s.empty() || !(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
    for (char c : s) {
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_')) return false;
    }
    return true;
}

bool is_dotted_ident(std::string_view s) {
    std::size_t start = 0;
    while (true) {
        const auto dot = s.find('.', start);
        if (!is_ident(s.substr(start, dot == std::string_view::npos ? std::string_view::npos : dot - start))) {
            return false;
        }
        if (dot == std::string_view::npos) return true;
        start = dot + 1;
    }
}

bool valid_scheme(std::string_view s) {
    if (s.empty() || !std::isalpha(static_cast<unsigned char>(s[0]))) return false;
    for (char c : s) {
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '+' || c == '-' || c == '.')) return false;
    }
    return true;
}

std::string render_name(const std::string& name) {
    if (is_ident(name) && !is_keyword(name)) return name;
    std::string out = "\"";
    for (char c : name) {
        out.push_back(c);
        if (c == '"') out.push_back('"');
    }
    return out + "\"";
}

enum SubClause { kWith = 0, kColumn = 1, kLabel = 2, kInto = 3 };
constexpr std::array<std::string_view, 4> kSubClauseNames = {"WITH", "COLUMN", "LABEL", "INTO"};

class ExtensionParser {
public:
    explicit ExtensionParser(std::string_view source) : cursor_(source) {}

    ExtensionClause parse_clause() {
        const Token* to = cursor_.peek();
        if (to == nullptr || !to->is_word("TO")) fail(to, "expected TO, found " + describe(to));
        cursor_.take();
        const Token* verb = cursor_.peek();
        if (verb && verb->is_word("TRAIN")) {
            cursor_.take();
            return parse_train();
        }
        if (verb && verb->is_word("PREDICT")) {
            cursor_.take();
            return parse_predict();
        }
        if (verb && verb->is_word("EXPLAIN")) {
            cursor_.take();
            return parse_explain();
        }
        if (verb && verb->is_bare_word()) {
            fail(verb, "unknown keyword after TO: " + std::string(verb->text) + " (expected TRAIN, PREDICT or EXPLAIN)");
        }
        fail(verb, "expected TRAIN, PREDICT or EXPLAIN after TO, found " + describe(verb));
    }

    /// Consumes the terminating ';' (or accepts end of input).
    std::size_t finish() {
        const Token* tok = cursor_.peek();
        if (tok == nullptr) return cursor_.source().size();
        if (tok->is_punct(';')) return cursor_.take().end;
        fail(tok, "unexpected " + describe(tok) + " after extension clause");
    }

    AttrMap parse_attribute_list() {
        AttrMap attrs;
        const Token* first = cursor_.peek();
        if (first == nullptr || !first->is_bare_word()) fail(first, "expected attribute name, found " + describe(first));
        do {
            const Token* key_tok = cursor_.peek();
            const std::size_t key_pos = key_tok ? key_tok->start : cursor_.source().size();
            std::string key = parse_attr_key();
            const Token* eq = cursor_.peek();
            if (eq == nullptr || !eq->is_op("=")) fail(eq, "expected '=' after attribute " + key);
            cursor_.take();
            AttrValue value = parse_attr_value();
            if (!attrs.insert(key, std::move(value))) throw ParseFailure(key_pos, "duplicate attribute " + key);
        } while (accept_punct(','));
        return attrs;
    }

    bool at_end() { return cursor_.at_end(); }
    const Token* peek() { return cursor_.peek(); }

    [[noreturn]] void fail(const Token* at, std::string message) {
        throw ParseFailure(at ? at->start : cursor_.source().size(), std::move(message));
    }

private:
    bool accept_punct(char c) {
        const Token* tok = cursor_.peek();
        if (tok && tok->is_punct(c)) {
            cursor_.take();
            return true;
        }
        return false;
    }

    static bool gluable(const Token& tok) {
        return tok.is_bare_word() || tok.kind == TokenKind::number || tok.is_punct('.') || tok.is_punct(':') ||
               tok.is_op("/") || tok.is_op("-");
    }

    /// Takes a run of adjacent tokens with no whitespace between them, e.g.
    /// `acme/models.dnn.Regressor` or `s3://bucket/model`.
    std::pair<std::string, std::size_t> glued_run(std::string_view what) {
        const Token* tok = cursor_.peek();
        if (tok == nullptr || !(tok->is_bare_word() || tok->kind == TokenKind::number)) {
            fail(tok, "expected " + std::string(what) + ", found " + describe(tok));
        }
        const std::size_t start = tok->start;
        std::size_t end = cursor_.take().end;
        while (const Token* next = cursor_.peek()) {
            if (next->start != end || !gluable(*next)) break;
            end = cursor_.take().end;
        }
        return {std::string(cursor_.source().substr(start, end - start)), start};
    }

    std::string parse_column_name(std::string_view what) {
        const Token* tok = cursor_.peek();
        if (tok && tok->kind == TokenKind::identifier) return std::string(cursor_.take().text);
        if (tok && tok->kind == TokenKind::quoted_identifier) {
            std::string name = unquote(*tok);
            if (name.empty()) fail(tok, "empty quoted identifier");
            cursor_.take();
            return name;
        }
        fail(tok, "expected " + std::string(what) + ", found " + describe(tok));
    }

    ModelTarget parse_target() {
        const Token* tok = cursor_.peek();
        ModelTarget target;
        std::size_t pos = 0;
        if (tok && tok->kind == TokenKind::string_literal) {
            pos = tok->start;
            target.value = unquote(cursor_.take());
        } else {
            auto [text, start] = glued_run("model name");
            target.value = std::move(text);
            pos = start;
        }
        if (const auto sep = target.value.find("://"); sep != std::string::npos) {
            if (!valid_scheme(std::string_view(target.value).substr(0, sep)) || sep + 3 >= target.value.size()) {
                throw ParseFailure(pos, "invalid model URL '" + target.value + "'");
            }
            target.kind = ModelTarget::Kind::url;
        } else if (!is_dotted_ident(target.value)) {
            throw ParseFailure(pos, "invalid model name '" + target.value + "'");
        }
        return target;
    }

    TrainClause parse_train() {
        TrainClause train;
        auto [model_text, model_pos] = glued_run("model definition");
        try {
            train.model = parse_model_ref(model_text);
        } catch (const ParseFailure& e) {
            throw ParseFailure(model_pos + e.position(), e.what());
        }

        std::array<bool, 4> seen{};
        int last = -1;
        while (const Token* tok = cursor_.peek()) {
            int which = -1;
            for (int i = 0; i < 4; ++i) {
                if (tok->is_word(kSubClauseNames[i])) which = i;
            }
            if (which < 0) break;
            if (seen[which]) fail(tok, "duplicate " + std::string(kSubClauseNames[which]) + " clause");
            if (which < last) {
                fail(tok, std::string(kSubClauseNames[which]) + " clause must come before " +
                              std::string(kSubClauseNames[last]));
            }
            seen[which] = true;
            last = which;
            cursor_.take();
            switch (which) {
                case kWith:
                    train.attributes = parse_attribute_list();
                    break;
                case kColumn: {
                    std::vector<std::string> cols;
                    do {
                        cols.push_back(parse_column_name("column name"));
                    } while (accept_punct(','));
                    train.columns = std::move(cols);
                    break;
                }
                case kLabel:
                    train.label = parse_column_name("label column");
                    break;
                case kInto:
                    train.into = parse_target();
                    break;
            }
        }
        if (!seen[kInto]) fail(cursor_.peek(), "expected INTO, found " + describe(cursor_.peek()));
        return train;
    }

    PredictClause parse_predict() {
        PredictClause predict;
        do {
            const Token* tok = cursor_.peek();
            if (tok && tok->is_word("USING")) fail(tok, "expected result field, found keyword USING");
            if (tok && tok->kind == TokenKind::keyword) {
                predict.result_field.emplace_back(cursor_.take().text);
            } else {
                predict.result_field.push_back(parse_column_name("result field"));
            }
            if (predict.result_field.size() > 3) fail(tok, "result field has more than 3 components");
        } while (accept_punct('.'));
        const Token* using_tok = cursor_.peek();
        if (using_tok == nullptr || !using_tok->is_word("USING")) {
            fail(using_tok, "expected USING, found " + describe(using_tok));
        }
        cursor_.take();
        predict.model = parse_target();
        return predict;
    }

    ExplainClause parse_explain() {
        ExplainClause explain;
        explain.model = parse_target();
        if (const Token* tok = cursor_.peek(); tok && tok->is_word("WITH")) {
            cursor_.take();
            explain.attributes = parse_attribute_list();
        }
        return explain;
    }

    std::string parse_attr_key() {
        const Token* tok = cursor_.peek();
        if (tok == nullptr || !tok->is_bare_word()) fail(tok, "expected attribute name, found " + describe(tok));
        std::string key(cursor_.take().text);
        while (accept_punct('.')) {
            const Token* part = cursor_.peek();
            if (part == nullptr || !part->is_bare_word()) fail(part, "expected attribute name part after '.'");
            key += "." + std::string(cursor_.take().text);
        }
        return key;
    }

    AttrScalar parse_scalar() {
        const Token* tok = cursor_.peek();
        if (tok == nullptr) fail(tok, "expected attribute value, found end of input");
        if (tok->is_punct('[')) fail(tok, "nested lists are not supported");
        if (tok->is_op("-") || tok->kind == TokenKind::number) {
            const Token start_tok = *tok;
            std::string text;
            if (tok->is_op("-")) {
                cursor_.take();
                const Token* num = cursor_.peek();
                if (num == nullptr || num->kind != TokenKind::number) fail(num, "expected number after '-'");
                text = "-";
            }
            text += std::string(cursor_.take().text);
            if (text.find_first_of(".eE") != std::string::npos) {
                double v = 0;
                auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
                if (ec != std::errc{} || p != text.data() + text.size()) fail(&start_tok, "invalid number " + text);
                return v;
            }
            std::int64_t v = 0;
            auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
            if (ec != std::errc{} || p != text.data() + text.size()) {
                fail(&start_tok, "integer out of range: " + text);
            }
            return v;
        }
        if (tok->kind == TokenKind::string_literal ||
            (tok->kind == TokenKind::quoted_identifier && tok->text.front() == '"')) {
            return unquote(cursor_.take());
        }
        if (tok->is_word("TRUE")) {
            cursor_.take();
            return true;
        }
        if (tok->is_word("FALSE")) {
            cursor_.take();
            return false;
        }
        if (tok->is_bare_word()) return Identifier{glued_run("attribute value").first};
        fail(tok, "expected attribute value, found " + describe(tok));
    }

    AttrValue parse_attr_value() {
        const Token* tok = cursor_.peek();
        if (tok && tok->is_punct('[')) {
            cursor_.take();
            AttrList list;
            if (accept_punct(']')) return list;
            do {
                const Token* item_tok = cursor_.peek();
                AttrScalar item = parse_scalar();
                if (!list.items.empty() && list.items.front().index() != item.index()) {
                    fail(item_tok, "heterogeneous list: " + render_attr_scalar(item) + " differs in kind from " +
                                       render_attr_scalar(list.items.front()));
                }
                list.items.push_back(std::move(item));
            } while (accept_punct(','));
            const Token* close = cursor_.peek();
            if (close == nullptr || !close->is_punct(']')) fail(close, "expected ']', found " + describe(close));
            cursor_.take();
            return list;
        }
        return std::visit([](auto&& v) -> AttrValue { return std::move(v); }, parse_scalar());
    }

    TokenCursor cursor_;
};

}  // namespace

std::string ModelRef::qualified_name() const { return package ? *package + "." + name : name; }

std::string ModelRef::to_string() const { return image ? *image + "." + qualified_name() : qualified_name(); }

std::string ModelTarget::to_string() const {
    if (kind == Kind::local_name) return value;
    std::string out = "'";
    for (char c : value) {
        out.push_back(c);
        if (c == '\'') out.push_back('\'');
    }
    return out + "'";
}

ExtensionOutcome parse_extension(std::string_view source) {
    try {
        ExtensionParser parser(source);
        ExtensionClause clause = parser.parse_clause();
        const std::size_t stop = parser.finish();
        return {std::move(clause), stop, std::nullopt};
    } catch (const ParseFailure& e) {
        return {std::nullopt, 0, e.syntax_error()};
    }
}

AttrMap parse_attributes(std::string_view source) {
    ExtensionParser parser(source);
    AttrMap attrs = parser.parse_attribute_list();
    if (!parser.at_end()) parser.fail(parser.peek(), "unexpected " + describe(parser.peek()) + " after attributes");
    return attrs;
}

ModelRef parse_model_ref(std::string_view text) {
    if (text.empty()) throw ParseFailure(0, "empty model reference");
    ModelRef ref;
    std::size_t rest_start = 0;
    if (const auto slash = text.rfind('/'); slash != std::string_view::npos) {
        const auto dot = text.find('.', slash + 1);
        if (dot == std::string_view::npos) {
            throw ParseFailure(text.size(), "image-qualified model reference needs '.<name>' after the image");
        }
        const auto image = text.substr(0, dot);
        for (std::size_t i = 0; i < image.size(); ++i) {
            const char c = image[i];
            if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.' || c == '/' ||
                  c == ':')) {
                throw ParseFailure(i, "illegal character in image name");
            }
        }
        if (image.front() == '/' || image[slash] != '/' || slash + 1 == dot) {
            throw ParseFailure(slash, "empty component in image name");
        }
        ref.image = std::string(image);
        rest_start = dot + 1;
    }

    std::vector<std::string> parts;
    std::size_t start = rest_start;
    while (true) {
        const auto dot = text.find('.', start);
        const auto part = text.substr(start, dot == std::string_view::npos ? std::string_view::npos : dot - start);
        if (part.empty()) throw ParseFailure(start, "empty name component in model reference");
        if (!is_ident(part)) throw ParseFailure(start, "illegal characters in model name component '" + std::string(part) + "'");
        parts.emplace_back(part);
        if (dot == std::string_view::npos) break;
        start = dot + 1;
    }
    ref.name = parts.back();
    parts.pop_back();
    if (!parts.empty()) {
        std::string pkg = parts.front();
        for (std::size_t i = 1; i < parts.size(); ++i) pkg += "." + parts[i];
        ref.package = std::move(pkg);
    }
    return ref;
}

std::string_view extension_keyword(const ExtensionClause& clause) {
    static constexpr std::array<std::string_view, 3> names = {"TRAIN", "PREDICT", "EXPLAIN"};
    return names[clause.index()];
}

namespace {

std::string render_attrs(const AttrMap& attrs) {
    std::string out;
    for (const auto& [key, value] : attrs.entries()) {
        if (!out.empty()) out += ", ";
        out += key + "=" + render_attr_value(value);
    }
    return out;
}

}  // namespace

std::string render_extension(const ExtensionClause& clause) {
    std::string out = "TO " + std::string(extension_keyword(clause)) + " ";
    if (const auto* train = std::get_if<TrainClause>(&clause)) {
        out += train->model.to_string();
        if (!train->attributes.empty()) out += " WITH " + render_attrs(train->attributes);
        if (train->columns) {
            out += " COLUMN ";
            for (std::size_t i = 0; i < train->columns->size(); ++i) {
                if (i) out += ", ";
                out += render_name((*train->columns)[i]);
            }
        }
        if (train->label) out += " LABEL " + render_name(*train->label);
        out += " INTO " + train->into.to_string();
    } else if (const auto* predict = std::get_if<PredictClause>(&clause)) {
        for (std::size_t i = 0; i < predict->result_field.size(); ++i) {
            if (i) out += ".";
            out += render_name(predict->result_field[i]);
        }
        out += " USING " + predict->model.to_string();
    } else {
        const auto& explain = std::get<ExplainClause>(clause);
        out += explain.model.to_string();
        if (!explain.attributes.empty()) out += " WITH " + render_attrs(explain.attributes);
    }
    return out + ";";
}

}  // namespace sqlbridge
