#include "sqlbridge/cli.hpp"

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "sqlbridge/collab.hpp"
#include "sqlbridge/compiler.hpp"
#include "sqlbridge/engine.hpp"

namespace sqlbridge {

namespace {

std::string read_text(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void report(std::ostream& err, const std::exception& e, std::string_view source_name, std::string_view source) {
    if (const auto* pf = dynamic_cast<const ParseFailure*>(&e)) {
        const LineColumn lc = line_column(source, pf->position());
        err << "error: " << source_name << ":" << lc.line << ":" << lc.column << " (offset " << pf->position()
            << "): " << pf->what() << "\n";
        return;
    }
    err << "error: " << e.what() << "\n";
}

struct Options {
    std::string file;
    std::string dialect = "generic";
    std::string db;
    std::string model_store;
    std::string output;
    std::string name;
    std::string statement;
};

int cmd_parse(const Options& opt, std::ostream& out, std::ostream& err) {
    std::string source;
    try {
        source = read_text(opt.file);
        out << dump_program(parse_program(parse_dialect_id(opt.dialect), source));
        return kExitOk;
    } catch (const std::exception& e) {
        report(err, e, opt.file, source);
        return exit_code_for(e);
    }
}

int cmd_compile(const Options& opt, std::ostream& out, std::ostream& err) {
    std::string source;
    try {
        source = read_text(opt.file);
        CompileConfig config;
        config.dialect = parse_dialect_id(opt.dialect);
        config.db_path = opt.db;
        config.model_store_path = opt.model_store;
        if (!opt.name.empty()) config.workflow_name = opt.name;
        const std::string yaml = encode_workflow(compile_program(parse_program(config.dialect, source), config));
        if (opt.output.empty()) {
            out << yaml;
        } else {
            std::ofstream file(opt.output, std::ios::binary | std::ios::trunc);
            if (!file) throw IoError("cannot write " + opt.output);
            file << yaml;
            if (!file) throw IoError("failed writing " + opt.output);
        }
        return kExitOk;
    } catch (const std::exception& e) {
        report(err, e, opt.file, source);
        return exit_code_for(e);
    }
}

int cmd_run(const Options& opt, std::ostream& out, std::ostream& err) {
    try {
        const Workflow workflow = decode_workflow(read_text(opt.file));
        const auto results = run_workflow(workflow, TableStore(opt.db), ModelStore(opt.model_store));
        bool all_ok = results.size() == workflow.steps.size();
        for (const auto& result : results) {
            out << result.output;
            if (result.ok()) {
                out << result.step << " ok\n";
            } else {
                all_ok = false;
                out << result.step << " failed: " << result.error << "\n";
            }
        }
        return all_ok ? kExitOk : kExitExecution;
    } catch (const std::exception& e) {
        report(err, e, opt.file, {});
        return exit_code_for(e);
    }
}

int cmd_exec_step(const Options& opt, std::ostream& out, std::ostream& err) {
    try {
        out << execute_statement(opt.statement, parse_dialect_id(opt.dialect), TableStore(opt.db),
                                 ModelStore(opt.model_store));
        return kExitOk;
    } catch (const std::exception& e) {
        report(err, e, "<statement>", opt.statement);
        return exit_code_for(e);
    }
}

}  // namespace

int exit_code_for(const std::exception& error) {
    if (dynamic_cast<const IoError*>(&error)) return kExitIo;
    if (dynamic_cast<const ParseFailure*>(&error) || dynamic_cast<const ValidationError*>(&error)) return kExitInvalid;
    return kExitExecution;
}

LineColumn line_column(std::string_view text, std::size_t offset) {
    LineColumn lc;
    for (std::size_t i = 0; i < offset && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++lc.line;
            lc.column = 1;
        } else {
            ++lc.column;
        }
    }
    return lc;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Compile SQL programs with TO TRAIN/PREDICT/EXPLAIN clauses into workflows and run them", "sqlbridge"};
    app.require_subcommand(1);
    Options opt;

    auto add_dialect = [&](CLI::App* sub) {
        sub->add_option("--dialect", opt.dialect, "SQL dialect parser (generic, mysql)")
            ->check(CLI::IsMember({"generic", "mysql"}))
            ->capture_default_str();
    };

    CLI::App* parse = app.add_subcommand("parse", "Print the parsed statements of a SQL program");
    parse->add_option("file", opt.file, "SQL program")->required();
    add_dialect(parse);

    CLI::App* compile = app.add_subcommand("compile", "Compile a SQL program into workflow YAML");
    compile->add_option("file", opt.file, "SQL program")->required();
    add_dialect(compile);
    compile->add_option("--db", opt.db, "Table store directory used by the steps")->required();
    compile->add_option("--model-store", opt.model_store, "Model store directory used by the steps")->required();
    compile->add_option("-o,--output", opt.output, "Output file (default: stdout)");
    compile->add_option("--name", opt.name, "Workflow name");

    CLI::App* run = app.add_subcommand("run", "Run a workflow YAML file locally");
    run->add_option("workflow", opt.file, "Workflow YAML")->required();
    run->add_option("--db", opt.db, "Table store directory")->required();
    run->add_option("--model-store", opt.model_store, "Model store directory")->required();

    CLI::App* exec = app.add_subcommand("exec-step", "Compile and run one statement against the current tables");
    add_dialect(exec);
    exec->add_option("--db", opt.db, "Table store directory")->required();
    exec->add_option("--model-store", opt.model_store, "Model store directory")->required();
    exec->add_option("--statement", opt.statement, "Statement text")->required();

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitInvalid;
    }

    if (parse->parsed()) return cmd_parse(opt, out, err);
    if (compile->parsed()) return cmd_compile(opt, out, err);
    if (run->parsed()) return cmd_run(opt, out, err);
    return cmd_exec_step(opt, out, err);
}

}  // namespace sqlbridge
