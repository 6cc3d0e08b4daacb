#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "sqlbridge/compiler.hpp"
#include "sqlbridge/table.hpp"
#include "sqlbridge/workflow.hpp"

namespace sqlbridge {

/// Directory of CSV tables; table `a.b` lives in `<root>/a.b.csv`.
/// Assumes a single writer.
class TableStore {
public:
    explicit TableStore(std::filesystem::path root) : root_(std::move(root)) {}

    const std::filesystem::path& root() const noexcept { return root_; }
    std::filesystem::path table_path(std::string_view name) const;
    bool exists(std::string_view name) const;
    /// Throws ExecutionError("unknown table ...") if absent.
    ResultSet load(std::string_view name) const;
    void save(std::string_view name, const ResultSet& table) const;

private:
    std::filesystem::path root_;
};

/// Cross product of the FROM tables in file order (first table outermost),
/// then the WHERE conjunction, projection and LIMIT. Throws ExecutionError.
ResultSet eval_select(const SelectAst& select, const TableStore& tables);

struct LinearWeights {
    std::vector<double> coefficients;  // one per encoded dimension
    double intercept = 0.0;
    std::vector<double> encoded_means;  // training mean of each encoded dimension
    bool operator==(const LinearWeights&) const = default;
};

struct MajorityWeights {
    std::string label;  // modal class, as text
    std::vector<std::pair<std::string, std::int64_t>> frequencies;  // sorted by class
    bool operator==(const MajorityWeights&) const = default;
};

struct ModelArtifact {
    ModelRef estimator;
    AttrMap attributes;
    FeatureSet features;
    std::optional<FieldDesc> label;
    std::variant<LinearWeights, MajorityWeights> weights;
    bool operator==(const ModelArtifact&) const = default;
};

/// Directory of trained models: `<root>/<name>/metadata.json` and
/// `<root>/<name>/weights.json`. Only local names are storable.
class ModelStore {
public:
    explicit ModelStore(std::filesystem::path root) : root_(std::move(root)) {}

    const std::filesystem::path& root() const noexcept { return root_; }
    std::filesystem::path model_dir(const ModelTarget& target) const;
    bool exists(const ModelTarget& target) const;
    void save(const ModelTarget& target, const ModelArtifact& model) const;
    /// Throws ExecutionError("model not found ...") if absent.
    ModelArtifact load(const ModelTarget& target) const;

private:
    std::filesystem::path root_;
};

std::string serialize_metadata(const ModelArtifact& model);
std::string serialize_weights(const ModelArtifact& model);
ModelArtifact deserialize_model(std::string_view metadata, std::string_view weights);

/// linreg.Regressor: least squares via the normal equations with optional
/// ridge penalty `l2` (intercept unpenalized). majority.Classifier: modal
/// label, ties to the lexicographically smallest. Throws ExecutionError.
ModelArtifact train(const FeatureSet& features, const std::optional<FieldDesc>& label, const ModelRef& estimator,
                    const AttrMap& attributes, const ResultSet& data);

/// Sets (or appends) the column named by the last component of `result_field`.
ResultSet predict(const ModelArtifact& model, const ResultSet& input, const std::vector<std::string>& result_field);

struct ExplanationReport {
    /// Mean |contribution| per feature, descending.
    std::vector<std::pair<std::string, double>> importance;
    std::vector<std::string> feature_names;       // feature order
    std::vector<std::vector<double>> contributions;  // rows x features
};

/// Contribution of feature j on row i is sum over its encoded dimensions k of
/// w_k * (x_ik - training_mean_k). Linear models only.
ExplanationReport explain(const ModelArtifact& model, const ResultSet& data);

/// One line per feature: right-aligned name, '|', a bar scaled so the largest
/// value spans width - name_width - 1 characters, then the value (4 decimals).
std::string render_ascii_bars(const ExplanationReport& report, int width);

/// Executes a tier-2 plan and returns what the step prints.
std::string exec_step(const StepPlan& plan, const TableStore& tables, const ModelStore& models);

/// Parses one statement, compiles it against the run-time schema and runs it.
std::string execute_statement(std::string_view statement, DialectId dialect, const TableStore& tables,
                              const ModelStore& models);

struct StepResult {
    enum class Status { ok, failed };
    std::string step;
    Status status = Status::ok;
    std::string output;
    std::string error;

    bool ok() const noexcept { return status == Status::ok; }
};

using StepLauncher = std::function<StepResult(const Step&)>;

/// Runs steps in order and stops after the first failure.
std::vector<StepResult> run_workflow(const Workflow& workflow, const StepLauncher& launcher);

/// Default launcher: `sqlbridge exec-step ...` steps run in-process against
/// `tables`/`models`; anything else runs as a subprocess.
std::vector<StepResult> run_workflow(const Workflow& workflow, const TableStore& tables, const ModelStore& models);

StepResult launch_local(const Step& step, const TableStore& tables, const ModelStore& models);
/// Spawns command + args via PATH lookup; captures stdout and stderr.
StepResult run_subprocess(const Step& step);

}  // namespace sqlbridge
