#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "sqlbridge/error.hpp"

namespace sqlbridge {

inline constexpr std::string_view kWorkflowApiVersion = "sqlbridge.dev/v1";
inline constexpr std::string_view kWorkflowKind = "Workflow";

/// One container-style invocation. Steps run strictly in list order.
struct Step {
    std::string name;
    std::vector<std::string> command;
    std::vector<std::string> args;
    std::vector<std::pair<std::string, std::string>> env;

    bool operator==(const Step&) const = default;
};

struct Workflow {
    std::string name;
    std::vector<Step> steps;

    bool operator==(const Workflow&) const = default;
};

class WorkflowFormatError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

/// Every broken invariant, one message each; empty means valid.
std::vector<std::string> validate_workflow(const Workflow& workflow);

/// Canonical YAML. Throws WorkflowFormatError if the workflow is invalid.
std::string encode_workflow(const Workflow& workflow);

/// Throws WorkflowFormatError on malformed YAML, schema violations or
/// invalid workflows.
Workflow decode_workflow(std::string_view yaml);

}  // namespace sqlbridge
