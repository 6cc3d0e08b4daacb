#include "sqlbridge/compiler.hpp"

#include <algorithm>
#include <set>

namespace sqlbridge {

std::vector<std::string> exec_step_args(const CompileConfig& config, const std::string& statement_text) {
    return {"exec-step",        "--dialect",     std::string(to_string(config.dialect)),
            "--db",             config.db_path,  "--model-store",
            config.model_store_path, "--statement", statement_text};
}

Workflow compile_program(const ParsedProgram& program, const CompileConfig& config) {
    if (config.db_path.empty()) throw ValidationError("compile config: db path must be non-empty");
    if (config.model_store_path.empty()) throw ValidationError("compile config: model store path must be non-empty");
    if (program.statements.empty()) throw ValidationError("cannot compile an empty program");

    Workflow wf;
    wf.name = config.workflow_name.value_or(std::string(kDefaultWorkflowName));
    for (std::size_t i = 0; i < program.statements.size(); ++i) {
        Step step;
        step.name = "step-" + std::to_string(i);
        step.command = {std::string(kRunnerCommand)};
        step.args = exec_step_args(config, program.statements[i].full_text());
        wf.steps.push_back(std::move(step));
    }
    if (auto violations = validate_workflow(wf); !violations.empty()) {
        throw ValidationError("compile config: " + violations.front());
    }
    return wf;
}

const std::string& feature_name(const FeatureSpec& spec) {
    return std::visit([](const auto& f) -> const std::string& { return f.name; }, spec);
}

std::size_t FeatureSet::encoded_dimension() const {
    std::size_t dim = 0;
    for (const auto& f : features) {
        dim += std::holds_alternative<NumericFeature>(f) ? 1 : std::get<CategoricalFeature>(f).vocabulary.size();
    }
    return dim;
}

std::vector<std::size_t> FeatureSet::dimension_owner() const {
    std::vector<std::size_t> owner;
    for (std::size_t j = 0; j < features.size(); ++j) {
        const std::size_t width = std::holds_alternative<NumericFeature>(features[j])
                                      ? 1
                                      : std::get<CategoricalFeature>(features[j]).vocabulary.size();
        owner.insert(owner.end(), width, j);
    }
    return owner;
}

std::vector<double> FeatureSet::encode(const std::vector<FieldDesc>& schema, const Row& row) const {
    std::vector<double> out;
    out.reserve(encoded_dimension());
    for (const auto& spec : features) {
        const std::string& name = feature_name(spec);
        auto it = std::find_if(schema.begin(), schema.end(), [&](const FieldDesc& f) { return f.name == name; });
        if (it == schema.end()) throw ExecutionError("missing feature column " + name);
        const Value& value = row.at(static_cast<std::size_t>(it - schema.begin()));
        if (is_null(value)) throw ExecutionError("NULL value in feature column " + name + " (NULLs are not supported)");
        if (std::holds_alternative<NumericFeature>(spec)) {
            auto num = as_number(value);
            if (!num) throw ExecutionError("feature column " + name + " must be numeric");
            out.push_back(*num);
        } else {
            const auto& vocab = std::get<CategoricalFeature>(spec).vocabulary;
            const std::string text = format_value(value);
            const auto pos = std::lower_bound(vocab.begin(), vocab.end(), text);
            for (auto v = vocab.begin(); v != vocab.end(); ++v) {
                out.push_back(v == pos && *pos == text ? 1.0 : 0.0);
            }
        }
    }
    return out;
}

FeatureSet derive_features(const std::vector<FieldDesc>& schema, const TrainClause& train, const std::vector<Row>& rows) {
    auto index_of = [&](const std::string& name) -> std::optional<std::size_t> {
        for (std::size_t i = 0; i < schema.size(); ++i) {
            if (schema[i].name == name) return i;
        }
        return std::nullopt;
    };

    std::vector<std::size_t> candidates;
    if (train.columns) {
        std::set<std::string> seen;
        for (const auto& col : *train.columns) {
            if (train.label && col == *train.label) throw CompileError("label " + col + " cannot also be a feature column");
            auto idx = index_of(col);
            if (!idx) throw CompileError("column " + col + " not found");
            if (!seen.insert(col).second) throw CompileError("column " + col + " listed twice");
            candidates.push_back(*idx);
        }
    } else {
        for (std::size_t i = 0; i < schema.size(); ++i) {
            if (train.label && schema[i].name == *train.label) continue;
            candidates.push_back(i);
        }
    }
    if (candidates.empty()) throw CompileError("no feature columns to train on");

    FeatureSet set;
    for (std::size_t idx : candidates) {
        const FieldDesc& field = schema[idx];
        for (const Row& row : rows) {
            if (is_null(row.at(idx))) {
                throw CompileError("NULL value in column " + field.name + " (NULLs are not supported)");
            }
        }
        if (field.dtype == DType::String) {
            if (rows.empty()) throw CompileError("cannot derive a vocabulary for " + field.name + " from empty data");
            std::set<std::string> distinct;
            for (const Row& row : rows) distinct.insert(format_value(row[idx]));
            set.features.push_back(CategoricalFeature{field.name, {distinct.begin(), distinct.end()}});
        } else {
            double sum = 0.0;
            for (const Row& row : rows) sum += *as_number(row[idx]);
            const double mean = rows.empty() ? 0.0 : sum / static_cast<double>(rows.size());
            set.features.push_back(NumericFeature{field.name, mean});
        }
    }
    return set;
}

const EstimatorCatalog& EstimatorCatalog::builtin() {
    static const EstimatorCatalog catalog = [] {
        EstimatorCatalog c;
        c.add({std::string(kLinearRegressor), true});
        c.add({std::string(kMajorityClassifier), true});
        return c;
    }();
    return catalog;
}

void EstimatorCatalog::add(EstimatorInfo info) {
    auto it = std::find_if(entries_.begin(), entries_.end(), [&](const EstimatorInfo& e) { return e.name == info.name; });
    if (it != entries_.end()) {
        *it = std::move(info);
    } else {
        entries_.push_back(std::move(info));
    }
}

const EstimatorInfo* EstimatorCatalog::find(const ModelRef& ref) const {
    const std::string key = ref.qualified_name();
    auto it = std::find_if(entries_.begin(), entries_.end(), [&](const EstimatorInfo& e) { return e.name == key; });
    return it == entries_.end() ? nullptr : &*it;
}

StepPlan compile_statement(const Statement& statement, const ResultSet& data, const EstimatorCatalog& catalog) {
    StepPlan out;
    if (!statement.extension) {
        out.plan = NormalSqlPlan{statement};
        return out;
    }
    const SelectAst& select = statement.select();

    if (const auto* train = std::get_if<TrainClause>(&*statement.extension)) {
        const EstimatorInfo* info = catalog.find(train->model);
        if (info == nullptr) throw CompileError("unknown estimator " + train->model.to_string());

        TrainClause effective = *train;
        if (!info->supervised && effective.label) {
            out.warnings.push_back("LABEL " + *effective.label + " ignored: " + info->name + " is unsupervised");
            effective.label.reset();
        }
        if (info->supervised && !effective.label) throw CompileError("estimator " + info->name + " requires LABEL");

        TrainPlan plan;
        plan.select = select;
        if (effective.label) {
            auto idx = data.column_index(*effective.label);
            if (!idx) throw CompileError("label " + *effective.label + " not found");
            plan.label = data.schema[*idx];
        }
        plan.features = derive_features(data.schema, effective, data.rows);
        plan.estimator = train->model;
        plan.attributes = train->attributes;
        plan.into = train->into;
        out.plan = std::move(plan);
    } else if (const auto* predict = std::get_if<PredictClause>(&*statement.extension)) {
        out.plan = PredictPlan{select, predict->model, predict->result_field};
    } else {
        const auto& explain = std::get<ExplainClause>(*statement.extension);
        out.plan = ExplainPlan{select, explain.model, explain.attributes};
    }
    return out;
}

}  // namespace sqlbridge
