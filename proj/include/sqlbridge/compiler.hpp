#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "sqlbridge/collab.hpp"
#include "sqlbridge/error.hpp"
#include "sqlbridge/extension.hpp"
#include "sqlbridge/table.hpp"
#include "sqlbridge/workflow.hpp"

namespace sqlbridge {

inline constexpr std::string_view kDefaultWorkflowName = "sqlflow-workflow";
inline constexpr std::string_view kRunnerCommand = "sqlbridge";

struct CompileConfig {
    DialectId dialect = DialectId::generic;
    std::string db_path;
    std::string model_store_path;
    std::optional<std::string> workflow_name;
};

/// Semantic errors found while compiling a statement against its schema.
class CompileError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

/// Tier 1: one step per statement, named step-<i>, each re-invoking this
/// toolchain's exec-step runner on the verbatim statement text. Reads no data.
Workflow compile_program(const ParsedProgram& program, const CompileConfig& config);

/// Argument vector of the exec-step invocation embedded in compiled steps.
std::vector<std::string> exec_step_args(const CompileConfig& config, const std::string& statement_text);

struct NumericFeature {
    std::string name;
    double mean = 0.0;
    bool operator==(const NumericFeature&) const = default;
};

struct CategoricalFeature {
    std::string name;
    std::vector<std::string> vocabulary;  // sorted, distinct, non-empty
    bool operator==(const CategoricalFeature&) const = default;
};

using FeatureSpec = std::variant<NumericFeature, CategoricalFeature>;

const std::string& feature_name(const FeatureSpec& spec);

struct FeatureSet {
    std::vector<FeatureSpec> features;

    std::size_t encoded_dimension() const;
    /// Numeric features pass through; categoricals become a one-hot block over
    /// the vocabulary (all zeros for an unseen value). Throws ExecutionError for
    /// missing columns, NULLs or mistyped values.
    std::vector<double> encode(const std::vector<FieldDesc>& schema, const Row& row) const;
    /// For each encoded dimension, the index of the feature it belongs to.
    std::vector<std::size_t> dimension_owner() const;

    bool operator==(const FeatureSet&) const = default;
};

/// Candidate columns are COLUMN entries if given, else every schema column
/// except the label. INT/FLOAT become numeric (mean over `rows`), STRING
/// becomes categorical (sorted distinct values). Throws CompileError.
FeatureSet derive_features(const std::vector<FieldDesc>& schema, const TrainClause& train, const std::vector<Row>& rows);

struct EstimatorInfo {
    std::string name;  // package.Name
    bool supervised = true;
};

/// Registry of trainable model definitions, looked up by package-qualified
/// name (any image prefix is ignored for lookup).
class EstimatorCatalog {
public:
    static const EstimatorCatalog& builtin();

    void add(EstimatorInfo info);
    const EstimatorInfo* find(const ModelRef& ref) const;
    const std::vector<EstimatorInfo>& entries() const noexcept { return entries_; }

private:
    std::vector<EstimatorInfo> entries_;
};

inline constexpr std::string_view kLinearRegressor = "linreg.Regressor";
inline constexpr std::string_view kMajorityClassifier = "majority.Classifier";

struct NormalSqlPlan {
    Statement statement;
    const std::string& text() const { return statement.raw_text; }
};

struct TrainPlan {
    SelectAst select;
    FeatureSet features;
    std::optional<FieldDesc> label;
    ModelRef estimator;
    AttrMap attributes;
    ModelTarget into;
};

struct PredictPlan {
    SelectAst select;
    ModelTarget model;
    std::vector<std::string> result_field;
};

struct ExplainPlan {
    SelectAst select;
    ModelTarget model;
    AttrMap attributes;
};

struct StepPlan {
    std::variant<NormalSqlPlan, TrainPlan, PredictPlan, ExplainPlan> plan;
    std::vector<std::string> warnings;
};

/// Tier 2, run when the step executes. `data` is the extended SELECT's result
/// (schema and rows); it is ignored for normal statements.
StepPlan compile_statement(const Statement& statement, const ResultSet& data,
                           const EstimatorCatalog& catalog = EstimatorCatalog::builtin());

}  // namespace sqlbridge
