#include <fcntl.h>
#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>

#include "sqlbridge/collab.hpp"
#include "sqlbridge/engine.hpp"

extern char** environ;

namespace sqlbridge {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

std::string join(const std::vector<std::string>& parts, std::size_t count, char sep) {
    std::string out;
    for (std::size_t i = 0; i < count; ++i) {
        if (i) out.push_back(sep);
        out += parts[i];
    }
    return out;
}

int explain_width(const AttrMap& attrs) {
    const AttrValue* v = attrs.find("width");
    if (v == nullptr) return 60;
    const auto* w = std::get_if<std::int64_t>(v);
    if (w == nullptr || *w < 10 || *w > 1000) throw ExecutionError("attribute width must be an integer in [10, 1000]");
    return static_cast<int>(*w);
}

}  // namespace

std::string exec_step(const StepPlan& step, const TableStore& tables, const ModelStore& models) {
    std::string out;
    for (const auto& warning : step.warnings) out += "warning: " + warning + "\n";
    out += std::visit(
        overloaded{
            [&](const NormalSqlPlan& plan) -> std::string {
                if (const auto* ctas = std::get_if<CreateTableAs>(&plan.statement.body)) {
                    const ResultSet rs = eval_select(ctas->select, tables);
                    tables.save(ctas->table, rs);
                    return "created table " + ctas->table + " (" + std::to_string(rs.rows.size()) + " rows)\n";
                }
                return write_csv(eval_select(plan.statement.select(), tables));
            },
            [&](const TrainPlan& plan) -> std::string {
                models.model_dir(plan.into);  // rejects URL targets before any work
                const ResultSet data = eval_select(plan.select, tables);
                const ModelArtifact model = train(plan.features, plan.label, plan.estimator, plan.attributes, data);
                models.save(plan.into, model);
                return "trained model " + plan.into.value + " with " + plan.estimator.to_string() + " on " +
                       std::to_string(data.rows.size()) + " rows (" + std::to_string(plan.features.features.size()) +
                       " features)\n";
            },
            [&](const PredictPlan& plan) -> std::string {
                const ModelArtifact model = models.load(plan.model);
                const ResultSet data = eval_select(plan.select, tables);
                const ResultSet result = predict(model, data, plan.result_field);
                if (plan.result_field.size() > 1) {
                    const std::string table = join(plan.result_field, plan.result_field.size() - 1, '.');
                    tables.save(table, result);
                    return "wrote " + std::to_string(result.rows.size()) + " predictions to " + table + "." +
                           plan.result_field.back() + "\n";
                }
                return write_csv(result);
            },
            [&](const ExplainPlan& plan) -> std::string {
                const int width = explain_width(plan.attributes);
                const ModelArtifact model = models.load(plan.model);
                const ResultSet data = eval_select(plan.select, tables);
                return render_ascii_bars(explain(model, data), width);
            },
        },
        step.plan);
    return out;
}

std::string execute_statement(std::string_view statement, DialectId dialect, const TableStore& tables,
                              const ModelStore& models) {
    const ParsedProgram program = parse_program(dialect, statement);
    if (program.statements.size() != 1) {
        throw ValidationError("exec-step expects exactly one statement, got " + std::to_string(program.statements.size()));
    }
    const Statement& stmt = program.statements.front();
    ResultSet data;
    if (stmt.extension) data = eval_select(stmt.select(), tables);
    return exec_step(compile_statement(stmt, data), tables, models);
}

std::vector<StepResult> run_workflow(const Workflow& workflow, const StepLauncher& launcher) {
    std::vector<StepResult> results;
    for (const Step& step : workflow.steps) {
        StepResult result = launcher(step);
        result.step = step.name;
        results.push_back(std::move(result));
        if (!results.back().ok()) break;
    }
    return results;
}

std::vector<StepResult> run_workflow(const Workflow& workflow, const TableStore& tables, const ModelStore& models) {
    return run_workflow(workflow, [&](const Step& step) { return launch_local(step, tables, models); });
}

StepResult launch_local(const Step& step, const TableStore& tables, const ModelStore& models) {
    const bool self_invocation = step.command.size() == 1 && step.command.front() == kRunnerCommand &&
                                 !step.args.empty() && step.args.front() == "exec-step";
    if (!self_invocation) return run_subprocess(step);

    StepResult result;
    result.step = step.name;
    try {
        DialectId dialect = DialectId::generic;
        std::optional<std::string> statement;
        for (std::size_t i = 1; i < step.args.size(); i += 2) {
            if (i + 1 >= step.args.size()) throw ValidationError("flag " + step.args[i] + " has no value");
            const std::string& flag = step.args[i];
            const std::string& value = step.args[i + 1];
            if (flag == "--dialect") {
                dialect = parse_dialect_id(value);
            } else if (flag == "--statement") {
                statement = value;
            } else if (flag != "--db" && flag != "--model-store") {
                throw ValidationError("unknown exec-step flag " + flag);
            }
        }
        if (!statement) throw ValidationError("exec-step needs --statement");
        result.output = execute_statement(*statement, dialect, tables, models);
    } catch (const std::exception& e) {
        result.status = StepResult::Status::failed;
        result.error = step.name + ": " + e.what();
    }
    return result;
}

StepResult run_subprocess(const Step& step) {
    StepResult result;
    result.step = step.name;
    auto fail = [&](const std::string& message) {
        result.status = StepResult::Status::failed;
        result.error = step.name + ": " + message;
        return result;
    };
    if (step.command.empty()) return fail("empty command");

    std::vector<std::string> argv_storage = step.command;
    argv_storage.insert(argv_storage.end(), step.args.begin(), step.args.end());
    std::vector<char*> argv;
    for (auto& arg : argv_storage) argv.push_back(arg.data());
    argv.push_back(nullptr);

    std::vector<std::string> env_storage;
    for (char** e = environ; e && *e; ++e) env_storage.emplace_back(*e);
    for (const auto& [key, value] : step.env) env_storage.push_back(key + "=" + value);
    std::vector<char*> envp;
    for (auto& entry : env_storage) envp.push_back(entry.data());
    envp.push_back(nullptr);

    int pipe_fds[2];
    if (pipe(pipe_fds) != 0) return fail(std::string("pipe: ") + std::strerror(errno));

    posix_spawn_file_actions_t actions;
    posix_spawn_file_actions_init(&actions);
    posix_spawn_file_actions_addclose(&actions, pipe_fds[0]);
    posix_spawn_file_actions_adddup2(&actions, pipe_fds[1], STDOUT_FILENO);
    posix_spawn_file_actions_adddup2(&actions, pipe_fds[1], STDERR_FILENO);
    posix_spawn_file_actions_addclose(&actions, pipe_fds[1]);

    pid_t pid = 0;
    const int rc = posix_spawnp(&pid, argv[0], &actions, nullptr, argv.data(), envp.data());
    posix_spawn_file_actions_destroy(&actions);
    close(pipe_fds[1]);
    if (rc != 0) {
        close(pipe_fds[0]);
        return fail("cannot launch " + step.command.front() + ": " + std::strerror(rc));
    }

    char buf[4096];
    ssize_t n = 0;
    while ((n = read(pipe_fds[0], buf, sizeof buf)) > 0 || (n < 0 && errno == EINTR)) {
        if (n > 0) result.output.append(buf, static_cast<std::size_t>(n));
    }
    close(pipe_fds[0]);

    int status = 0;
    while (waitpid(pid, &status, 0) < 0 && errno == EINTR) {
    }
    if (WIFEXITED(status) && WEXITSTATUS(status) == 0) return result;
    if (WIFEXITED(status)) return fail(step.command.front() + " exited with status " + std::to_string(WEXITSTATUS(status)));
    return fail(step.command.front() + " terminated by signal " + std::to_string(WTERMSIG(status)));
}

}  // namespace sqlbridge
