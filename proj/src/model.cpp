#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include <Eigen/Dense>
#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "sqlbridge/engine.hpp"

namespace sqlbridge {

using nlohmann::json;

namespace {

json scalar_to_json(const AttrScalar& v) {
    return std::visit(
        [](const auto& x) -> json {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, std::int64_t>) return {{"kind", "int"}, {"value", x}};
            if constexpr (std::is_same_v<T, double>) return {{"kind", "float"}, {"value", x}};
            if constexpr (std::is_same_v<T, bool>) return {{"kind", "bool"}, {"value", x}};
            if constexpr (std::is_same_v<T, std::string>) return {{"kind", "string"}, {"value", x}};
            if constexpr (std::is_same_v<T, Identifier>) return {{"kind", "identifier"}, {"value", x.name}};
        },
        v);
}

AttrScalar scalar_from_json(const json& j) {
    const std::string kind = j.at("kind");
    if (kind == "int") return j.at("value").get<std::int64_t>();
    if (kind == "float") return j.at("value").get<double>();
    if (kind == "bool") return j.at("value").get<bool>();
    if (kind == "string") return j.at("value").get<std::string>();
    if (kind == "identifier") return Identifier{j.at("value").get<std::string>()};
    throw ExecutionError("model metadata: unknown attribute kind " + kind);
}

json attrs_to_json(const AttrMap& attrs) {
    json out = json::array();
    for (const auto& [key, value] : attrs.entries()) {
        json entry;
        if (const auto* list = std::get_if<AttrList>(&value)) {
            entry = {{"kind", "list"}, {"items", json::array()}};
            for (const auto& item : list->items) entry["items"].push_back(scalar_to_json(item));
        } else {
            entry = std::visit(
                [](const auto& x) -> json {
                    using T = std::decay_t<decltype(x)>;
                    if constexpr (std::is_same_v<T, AttrList>) {
                        return {};
                    } else {
                        return scalar_to_json(AttrScalar{x});
                    }
                },
                value);
        }
        entry["key"] = key;
        out.push_back(std::move(entry));
    }
    return out;
}

AttrMap attrs_from_json(const json& j) {
    AttrMap attrs;
    for (const auto& entry : j) {
        AttrValue value;
        if (entry.at("kind") == "list") {
            AttrList list;
            for (const auto& item : entry.at("items")) list.items.push_back(scalar_from_json(item));
            value = std::move(list);
        } else {
            value = std::visit([](auto&& v) -> AttrValue { return std::move(v); }, scalar_from_json(entry));
        }
        attrs.insert(entry.at("key").get<std::string>(), std::move(value));
    }
    return attrs;
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ExecutionError("cannot read " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path.string());
    out << text;
    if (!out) throw IoError("failed writing " + path.string());
}

const std::string& require_local(const ModelTarget& target) {
    if (target.kind == ModelTarget::Kind::url) {
        const auto scheme = target.value.substr(0, target.value.find("://"));
        throw ExecutionError("unsupported storage scheme '" + scheme + "' for model " + target.value);
    }
    return target.value;
}

bool is_linear(const ModelRef& ref) { return ref.qualified_name() == kLinearRegressor; }
bool is_majority(const ModelRef& ref) { return ref.qualified_name() == kMajorityClassifier; }

Value label_value(const std::string& text, DType dtype) {
    if (dtype == DType::Int) {
        std::int64_t v = 0;
        std::from_chars(text.data(), text.data() + text.size(), v);
        return v;
    }
    if (dtype == DType::Float) {
        double v = 0;
        std::from_chars(text.data(), text.data() + text.size(), v);
        return v;
    }
    return text;
}

}  // namespace

std::filesystem::path ModelStore::model_dir(const ModelTarget& target) const { return root_ / require_local(target); }

bool ModelStore::exists(const ModelTarget& target) const {
    return std::filesystem::exists(model_dir(target) / "metadata.json");
}

void ModelStore::save(const ModelTarget& target, const ModelArtifact& model) const {
    const auto dir = model_dir(target);
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError("cannot create model directory " + dir.string() + ": " + ec.message());
    write_file(dir / "metadata.json", serialize_metadata(model));
    write_file(dir / "weights.json", serialize_weights(model));
}

ModelArtifact ModelStore::load(const ModelTarget& target) const {
    if (!exists(target)) throw ExecutionError("model not found: " + target.value);
    const auto dir = model_dir(target);
    return deserialize_model(read_file(dir / "metadata.json"), read_file(dir / "weights.json"));
}

std::string serialize_metadata(const ModelArtifact& model) {
    json j;
    j["estimator"] = {{"image", model.estimator.image ? json(*model.estimator.image) : json(nullptr)},
                      {"package", model.estimator.package ? json(*model.estimator.package) : json(nullptr)},
                      {"name", model.estimator.name}};
    j["attributes"] = attrs_to_json(model.attributes);
    j["features"] = json::array();
    for (const auto& spec : model.features.features) {
        if (const auto* num = std::get_if<NumericFeature>(&spec)) {
            j["features"].push_back({{"type", "numeric"}, {"name", num->name}, {"mean", num->mean}});
        } else {
            const auto& cat = std::get<CategoricalFeature>(spec);
            j["features"].push_back({{"type", "categorical"}, {"name", cat.name}, {"vocabulary", cat.vocabulary}});
        }
    }
    j["label"] = model.label ? json{{"name", model.label->name}, {"dtype", to_string(model.label->dtype)}} : json(nullptr);
    return j.dump(2) + "\n";
}

std::string serialize_weights(const ModelArtifact& model) {
    json j;
    if (const auto* lin = std::get_if<LinearWeights>(&model.weights)) {
        j = {{"kind", "linear"},
             {"coefficients", lin->coefficients},
             {"intercept", lin->intercept},
             {"encoded_means", lin->encoded_means}};
    } else {
        const auto& maj = std::get<MajorityWeights>(model.weights);
        json freq = json::array();
        for (const auto& [label, count] : maj.frequencies) freq.push_back({{"class", label}, {"count", count}});
        j = {{"kind", "majority"}, {"label", maj.label}, {"frequencies", freq}};
    }
    return j.dump(2) + "\n";
}

ModelArtifact deserialize_model(std::string_view metadata, std::string_view weights) {
    try {
        const json meta = json::parse(metadata);
        const json w = json::parse(weights);
        ModelArtifact model;
        const auto& est = meta.at("estimator");
        if (!est.at("image").is_null()) model.estimator.image = est.at("image").get<std::string>();
        if (!est.at("package").is_null()) model.estimator.package = est.at("package").get<std::string>();
        model.estimator.name = est.at("name").get<std::string>();
        model.attributes = attrs_from_json(meta.at("attributes"));
        for (const auto& f : meta.at("features")) {
            if (f.at("type") == "numeric") {
                model.features.features.push_back(NumericFeature{f.at("name"), f.at("mean").get<double>()});
            } else {
                model.features.features.push_back(
                    CategoricalFeature{f.at("name"), f.at("vocabulary").get<std::vector<std::string>>()});
            }
        }
        if (!meta.at("label").is_null()) {
            model.label = FieldDesc{meta["label"].at("name"), parse_dtype(meta["label"].at("dtype").get<std::string>())};
        }
        if (w.at("kind") == "linear") {
            model.weights = LinearWeights{w.at("coefficients").get<std::vector<double>>(), w.at("intercept").get<double>(),
                                          w.at("encoded_means").get<std::vector<double>>()};
        } else {
            MajorityWeights maj;
            maj.label = w.at("label").get<std::string>();
            for (const auto& f : w.at("frequencies")) {
                maj.frequencies.emplace_back(f.at("class").get<std::string>(), f.at("count").get<std::int64_t>());
            }
            model.weights = std::move(maj);
        }
        return model;
    } catch (const json::exception& e) {
        throw ExecutionError(std::string("corrupt model files: ") + e.what());
    }
}

ModelArtifact train(const FeatureSet& features, const std::optional<FieldDesc>& label, const ModelRef& estimator,
                    const AttrMap& attributes, const ResultSet& data) {
    if (data.rows.empty()) throw ExecutionError("cannot train on an empty result set");
    ModelArtifact model{estimator, attributes, features, label, LinearWeights{}};

    std::optional<std::size_t> label_idx;
    if (label) {
        label_idx = data.column_index(label->name);
        if (!label_idx) throw ExecutionError("label " + label->name + " not found");
        for (const Row& row : data.rows) {
            if (is_null(row[*label_idx])) throw ExecutionError("NULL value in label column " + label->name);
        }
    }

    if (is_linear(estimator)) {
        if (!label) throw ExecutionError("linreg.Regressor requires LABEL");
        if (label->dtype == DType::String) throw ExecutionError("linreg.Regressor requires a numeric label");
        double l2 = 0.0;
        if (attributes.find("l2")) {
            auto v = attributes.number("l2");
            if (!v || *v < 0 || !std::isfinite(*v)) throw ExecutionError("attribute l2 must be a non-negative number");
            l2 = *v;
        }

        const std::size_t n = data.rows.size();
        const std::size_t d = features.encoded_dimension();
        Eigen::MatrixXd x(n, d + 1);
        Eigen::VectorXd y(n);
        for (std::size_t i = 0; i < n; ++i) {
            const auto enc = features.encode(data.schema, data.rows[i]);
            for (std::size_t k = 0; k < d; ++k) x(i, k) = enc[k];
            x(i, d) = 1.0;
            y(i) = *as_number(data.rows[i][*label_idx]);
        }
        Eigen::MatrixXd normal = x.transpose() * x;
        for (std::size_t k = 0; k < d; ++k) normal(k, k) += l2;
        const Eigen::VectorXd rhs = x.transpose() * y;
        Eigen::FullPivLU<Eigen::MatrixXd> lu(normal);
        if (!lu.isInvertible()) throw ExecutionError("singular system; set l2");
        const Eigen::VectorXd beta = lu.solve(rhs);

        LinearWeights w;
        w.coefficients.assign(beta.data(), beta.data() + d);
        w.intercept = beta(d);
        w.encoded_means.resize(d);
        for (std::size_t k = 0; k < d; ++k) w.encoded_means[k] = x.col(k).sum() / static_cast<double>(n);
        model.weights = std::move(w);
        return model;
    }

    if (is_majority(estimator)) {
        if (!label) throw ExecutionError("majority.Classifier requires LABEL");
        for (const Row& row : data.rows) features.encode(data.schema, row);
        std::map<std::string, std::int64_t> counts;
        for (const Row& row : data.rows) ++counts[format_value(row[*label_idx])];
        MajorityWeights w;
        std::int64_t best = -1;
        for (const auto& [cls, count] : counts) {
            w.frequencies.emplace_back(cls, count);
            if (count > best) {
                best = count;
                w.label = cls;
            }
        }
        model.weights = std::move(w);
        return model;
    }

    throw ExecutionError("unknown estimator " + estimator.to_string());
}

ResultSet predict(const ModelArtifact& model, const ResultSet& input, const std::vector<std::string>& result_field) {
    if (result_field.empty()) throw ExecutionError("empty result field");
    const std::string& column = result_field.back();

    std::vector<Value> predictions;
    predictions.reserve(input.rows.size());
    DType dtype = DType::Float;
    if (const auto* lin = std::get_if<LinearWeights>(&model.weights)) {
        for (const Row& row : input.rows) {
            const auto enc = model.features.encode(input.schema, row);
            double value = lin->intercept;
            for (std::size_t k = 0; k < enc.size(); ++k) value += lin->coefficients[k] * enc[k];
            predictions.emplace_back(value);
        }
    } else {
        const auto& maj = std::get<MajorityWeights>(model.weights);
        dtype = model.label ? model.label->dtype : DType::String;
        for (const Row& row : input.rows) {
            model.features.encode(input.schema, row);
            predictions.push_back(label_value(maj.label, dtype));
        }
    }

    ResultSet out = input;
    auto idx = out.column_index(column);
    if (!idx) {
        out.schema.push_back({column, dtype});
        for (auto& row : out.rows) row.emplace_back();
        idx = out.schema.size() - 1;
    } else {
        out.schema[*idx].dtype = dtype;
    }
    for (std::size_t i = 0; i < out.rows.size(); ++i) out.rows[i][*idx] = std::move(predictions[i]);
    return out;
}

ExplanationReport explain(const ModelArtifact& model, const ResultSet& data) {
    const auto* lin = std::get_if<LinearWeights>(&model.weights);
    if (lin == nullptr) throw ExecutionError("explanation unsupported for estimator " + model.estimator.to_string());
    if (data.rows.empty()) throw ExecutionError("no rows to explain");

    ExplanationReport report;
    for (const auto& spec : model.features.features) report.feature_names.push_back(feature_name(spec));
    const auto owner = model.features.dimension_owner();
    const std::size_t nf = report.feature_names.size();

    std::vector<double> total(nf, 0.0);
    for (const Row& row : data.rows) {
        const auto enc = model.features.encode(data.schema, row);
        std::vector<double> contrib(nf, 0.0);
        for (std::size_t k = 0; k < enc.size(); ++k) {
            contrib[owner[k]] += lin->coefficients[k] * (enc[k] - lin->encoded_means[k]);
        }
        for (std::size_t j = 0; j < nf; ++j) total[j] += std::abs(contrib[j]);
        report.contributions.push_back(std::move(contrib));
    }
    for (std::size_t j = 0; j < nf; ++j) {
        report.importance.emplace_back(report.feature_names[j], total[j] / static_cast<double>(data.rows.size()));
    }
    std::stable_sort(report.importance.begin(), report.importance.end(),
                     [](const auto& a, const auto& b) { return a.second > b.second; });
    return report;
}

std::string render_ascii_bars(const ExplanationReport& report, int width) {
    if (report.importance.empty()) throw ValidationError("cannot render an empty explanation report");
    if (width < 10) throw ValidationError("bar chart width must be at least 10");
    std::size_t name_width = 0;
    double max_value = 0.0;
    for (const auto& [name, value] : report.importance) {
        name_width = std::max(name_width, name.size());
        max_value = std::max(max_value, value);
    }
    const long bar_width = static_cast<long>(width) - static_cast<long>(name_width) - 1;
    if (bar_width < 1) throw ValidationError("bar chart width too small for feature names");

    std::string out;
    for (const auto& [name, value] : report.importance) {
        const long bars = max_value > 0 ? std::lround(value / max_value * static_cast<double>(bar_width)) : 0;
        out += fmt::format("{:>{}}|{:<{}} {:.4f}\n", name, name_width, std::string(static_cast<std::size_t>(bars), '#'),
                           bar_width, value);
    }
    return out;
}

}  // namespace sqlbridge
