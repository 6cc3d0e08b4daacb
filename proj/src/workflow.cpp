#include "sqlbridge/workflow.hpp"

#include <algorithm>
#include <cstdio>
#include <set>

#include <yaml-cpp/yaml.h>

namespace sqlbridge {

namespace {

bool valid_resource_name(std::string_view name) {
    return !name.empty() && name.size() <= 63 &&
           std::all_of(name.begin(), name.end(), [](char c) { return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '-'; });
}

bool valid_env_key(std::string_view key) {
    if (key.empty() || (key[0] >= '0' && key[0] <= '9')) return false;
    return std::all_of(key.begin(), key.end(), [](char c) {
        return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_';
    });
}

/// YAML double-quoted scalar.
std::string quoted(std::string_view s) {
    std::string out = "\"";
    for (char c : s) {
        const auto byte = static_cast<unsigned char>(c);
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            case '\r': out += "\\r"; break;
            default:
                if (byte < 0x20 || byte == 0x7f) {
                    char buf[8];
                    std::snprintf(buf, sizeof buf, "\\x%02X", byte);
                    out += buf;
                } else {
                    out.push_back(c);
                }
        }
    }
    return out + "\"";
}

std::string flow_list(const std::vector<std::string>& items) {
    std::string out = "[";
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (i) out += ", ";
        out += quoted(items[i]);
    }
    return out + "]";
}

[[noreturn]] void schema_error(const std::string& message) { throw WorkflowFormatError("workflow YAML: " + message); }

void check_keys(const YAML::Node& node, const std::set<std::string>& allowed, const std::string& where) {
    for (const auto& kv : node) {
        const auto key = kv.first.as<std::string>();
        if (!allowed.count(key)) schema_error("unknown key '" + key + "' in " + where);
    }
}

std::string scalar(const YAML::Node& node, const std::string& what) {
    if (!node || !node.IsScalar()) schema_error(what + " must be a scalar");
    return node.as<std::string>();
}

std::vector<std::string> string_list(const YAML::Node& node, const std::string& what) {
    if (!node.IsSequence()) schema_error(what + " must be a list");
    std::vector<std::string> out;
    for (const auto& item : node) out.push_back(scalar(item, what + " item"));
    return out;
}

}  // namespace

std::vector<std::string> validate_workflow(const Workflow& workflow) {
    std::vector<std::string> violations;
    if (!valid_resource_name(workflow.name)) {
        violations.push_back("workflow name '" + workflow.name + "' must match [a-z0-9-]+ and be at most 63 characters");
    }
    std::set<std::string> names;
    for (std::size_t i = 0; i < workflow.steps.size(); ++i) {
        const Step& step = workflow.steps[i];
        const std::string where = "step " + std::to_string(i);
        if (!valid_resource_name(step.name)) {
            violations.push_back(where + ": name '" + step.name + "' must match [a-z0-9-]+ and be at most 63 characters");
        }
        if (!names.insert(step.name).second) violations.push_back(where + ": duplicate step name '" + step.name + "'");
        if (step.command.empty() || step.command.front().empty()) violations.push_back(where + ": command must be non-empty");
        std::set<std::string> keys;
        for (const auto& [key, value] : step.env) {
            if (!valid_env_key(key)) violations.push_back(where + ": invalid env key '" + key + "'");
            if (!keys.insert(key).second) violations.push_back(where + ": duplicate env key '" + key + "'");
        }
    }
    return violations;
}

std::string encode_workflow(const Workflow& workflow) {
    if (auto violations = validate_workflow(workflow); !violations.empty()) {
        throw WorkflowFormatError("invalid workflow: " + violations.front());
    }
    std::string out;
    out += "apiVersion: " + std::string(kWorkflowApiVersion) + "\n";
    out += "kind: " + std::string(kWorkflowKind) + "\n";
    out += "metadata:\n";
    out += "  name: " + workflow.name + "\n";
    out += "spec:\n";
    if (workflow.steps.empty()) {
        out += "  steps: []\n";
        return out;
    }
    out += "  steps:\n";
    for (const Step& step : workflow.steps) {
        out += "  - name: " + step.name + "\n";
        out += "    command: " + flow_list(step.command) + "\n";
        out += "    args: " + flow_list(step.args) + "\n";
        if (!step.env.empty()) {
            out += "    env:\n";
            for (const auto& [key, value] : step.env) out += "      " + key + ": " + quoted(value) + "\n";
        }
    }
    return out;
}

Workflow decode_workflow(std::string_view yaml) {
    YAML::Node root;
    try {
        root = YAML::Load(std::string(yaml));
    } catch (const YAML::Exception& e) {
        schema_error(std::string("malformed document: ") + e.what());
    }
    if (!root.IsMap()) schema_error("document must be a mapping");

    Workflow wf;
    try {
        check_keys(root, {"apiVersion", "kind", "metadata", "spec"}, "document");
        if (!root["apiVersion"]) schema_error("missing apiVersion");
        if (scalar(root["apiVersion"], "apiVersion") != kWorkflowApiVersion) {
            schema_error("unsupported apiVersion '" + root["apiVersion"].as<std::string>() + "'");
        }
        if (!root["kind"]) schema_error("missing kind");
        if (scalar(root["kind"], "kind") != kWorkflowKind) {
            schema_error("kind must be Workflow, got '" + root["kind"].as<std::string>() + "'");
        }
        const YAML::Node metadata = root["metadata"];
        if (!metadata || !metadata.IsMap()) schema_error("missing metadata mapping");
        check_keys(metadata, {"name"}, "metadata");
        wf.name = scalar(metadata["name"], "metadata.name");

        const YAML::Node spec = root["spec"];
        if (!spec || !spec.IsMap()) schema_error("missing spec mapping");
        check_keys(spec, {"steps"}, "spec");
        const YAML::Node steps = spec["steps"];
        if (!steps || !steps.IsSequence()) schema_error("spec.steps must be a list");
        for (const auto& node : steps) {
            if (!node.IsMap()) schema_error("each step must be a mapping");
            check_keys(node, {"name", "command", "args", "env"}, "step");
            Step step;
            step.name = scalar(node["name"], "step name");
            if (!node["command"]) schema_error("step '" + step.name + "' has no command");
            step.command = string_list(node["command"], "command");
            if (node["args"]) step.args = string_list(node["args"], "args");
            if (const YAML::Node env = node["env"]) {
                if (!env.IsMap()) schema_error("env must be a mapping");
                for (const auto& kv : env) {
                    step.env.emplace_back(kv.first.as<std::string>(), scalar(kv.second, "env value"));
                }
            }
            wf.steps.push_back(std::move(step));
        }
    } catch (const YAML::Exception& e) {
        schema_error(e.what());
    }

    if (auto violations = validate_workflow(wf); !violations.empty()) schema_error(violations.front());
    return wf;
}

}  // namespace sqlbridge
