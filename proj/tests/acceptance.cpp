// Acceptance checks. Usage: acceptance <path-to-sqlbridge> <golden-dir>
// Prints one PASS/FAIL line per criterion; exits 1 if any fails.

#include <chrono>
#include <cmath>
#include <functional>
#include <iostream>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include "sqlbridge/collab.hpp"
#include "sqlbridge/compiler.hpp"
#include "sqlbridge/engine.hpp"
#include "sqlbridge/workflow.hpp"
#include "support/program_gen.hpp"
#include "support/temp_dir.hpp"

using namespace sqlbridge;
using sqlbridge::testing::read_text;
using sqlbridge::testing::TempDir;
using sqlbridge::testing::write_text;

namespace {

std::string g_binary;
std::filesystem::path g_golden;

struct Outcome {
    bool pass = true;
    std::string detail;
};

Outcome fail(std::string detail) { return {false, std::move(detail)}; }

// Alias disambiguation: exact AST equality against golden dumps, < 1 s.
Outcome alias_disambiguation() {
    const std::pair<const char*, const char*> cases[] = {
        {"SELECT * FROM t1, t2, t3 TRAIN;", "alias_train.ast"},
        {"SELECT * FROM t1, t2, t3 TO TRAIN m INTO x;", "to_train.ast"},
    };
    for (const auto& [sql, file] : cases) {
        const std::string expected = read_text(g_golden / file);
        if (expected.empty()) return fail(std::string("missing golden ") + file);
        for (DialectId id : registered_dialects()) {
            const ParsedProgram program = parse_program(id, sql);
            if (dump_program(program) != expected) return fail(std::string("AST differs from ") + file);
        }
    }
    const auto alias = parse_program(DialectId::mysql, cases[0].first);
    const auto train = parse_program(DialectId::mysql, cases[1].first);
    if (alias.statements.size() != 1 || alias.statements[0].extension) return fail("alias parsed as extension");
    if (train.statements.size() != 1 || !train.statements[0].extension ||
        !std::holds_alternative<TrainClause>(*train.statements[0].extension)) {
        return fail("TO TRAIN not parsed as Train extension");
    }
    return {true, "2 golden ASTs x 2 dialects"};
}

// Algorithm conformance on >= 1000 random programs.
Outcome collaborative_parsing() {
    constexpr int kPrograms = 1000;
    testing::ProgramGenerator gen(20240601);
    std::size_t extended = 0;
    for (int i = 0; i < kPrograms; ++i) {
        const auto generated = gen.program(1, 10);
        for (DialectId id : registered_dialects()) {
            ParsedProgram program;
            try {
                program = parse_program(id, generated.text);
            } catch (const ParseFailure& e) {
                return fail("program " + std::to_string(i) + " rejected at " + std::to_string(e.position()) + ": " +
                            e.what());
            }
            const auto spans = split_statements(generated.text);
            if (program.statements.size() != spans.size() || program.statements.size() != generated.statements.size()) {
                return fail("statement count mismatch in program " + std::to_string(i));
            }
            if (program.spans != spans) return fail("span mismatch in program " + std::to_string(i));
            std::set<std::size_t> first_errors, to_offsets;
            for (const auto& pass : program.passes) {
                if (pass.first_error) first_errors.insert(pass.first_error->position);
            }
            for (const auto& st : generated.statements) {
                if (st.to_offset) to_offsets.insert(*st.to_offset);
            }
            if (first_errors != to_offsets) return fail("first-call error offset != TO offset in program " + std::to_string(i));
            if (id == DialectId::generic) extended += to_offsets.size();
        }
    }
    return {true, std::to_string(kPrograms) + " programs x 2 dialects, " + std::to_string(extended) +
                      " extended statements, 100% match"};
}

// Step count for 1..20 statements.
Outcome step_count() {
    testing::ProgramGenerator gen(7);
    const CompileConfig config{DialectId::generic, "/unreachable/db", "/unreachable/models", {}};
    for (int n = 1; n <= 20; ++n) {
        for (int rep = 0; rep < 5; ++rep) {
            const auto generated = gen.program(n, n);
            const Workflow wf = compile_program(parse_program(DialectId::generic, generated.text), config);
            if (wf.steps.size() != static_cast<std::size_t>(n)) return fail("N=" + std::to_string(n) + " gave " + std::to_string(wf.steps.size()) + " steps");
            for (int k = 0; k < n; ++k) {
                if (wf.steps[static_cast<std::size_t>(k)].name != "step-" + std::to_string(k)) return fail("bad step name");
            }
        }
    }
    return {true, "N=1..20, 5 programs each"};
}

Workflow random_workflow(std::mt19937& rng) {
    auto pick = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
    auto text = [&]() {
        static const std::string chars = "abc XYZ09\"\\'\n\t:#-{}[],&*!|>%@`;";
        std::string s;
        for (int i = pick(0, 12); i > 0; --i) s.push_back(chars[static_cast<std::size_t>(pick(0, static_cast<int>(chars.size()) - 1))]);
        return s;
    };
    Workflow wf{"wf-" + std::to_string(pick(0, 999)), {}};
    for (int i = 0, n = pick(0, 8); i < n; ++i) {
        Step step{"step-" + std::to_string(i), {pick(0, 1) ? "sqlbridge" : "echo"}, {}, {}};
        for (int k = pick(0, 6); k > 0; --k) step.args.push_back(text());
        for (int k = pick(0, 2); k > 0; --k) step.env.emplace_back("E" + std::to_string(k), text());
        wf.steps.push_back(std::move(step));
    }
    return wf;
}

// YAML determinism and round trip on 100 random workflows.
Outcome yaml_codec() {
    std::mt19937 rng(99);
    for (int i = 0; i < 100; ++i) {
        const Workflow wf = random_workflow(rng);
        const std::string a = encode_workflow(wf);
        const std::string b = encode_workflow(wf);
        if (a != b) return fail("encode not byte-identical");
        if (decode_workflow(a) != wf) return fail("decode(encode(w)) != w for workflow " + std::to_string(i));
    }
    return {true, "100 workflows"};
}

std::string run_tool(const std::vector<std::string>& args, bool& ok) {
    const StepResult r = run_subprocess(Step{"tool", {g_binary}, args, {}});
    ok = r.ok();
    return r.output;
}

void write_line_table(const std::filesystem::path& db) {
    std::string csv = "x,y\n";
    for (int x = 0; x <= 9; ++x) csv += std::to_string(x) + "," + std::to_string(2 * x + 1) + "\n";
    write_text(db / "t.csv", csv);
}

// End-to-end train/predict through compile + run, max abs error <= 1e-9.
Outcome train_predict() {
    TempDir dir;
    write_line_table(dir / "db");
    write_text(dir / "p.sql",
               "SELECT * FROM t TO TRAIN linreg.Regressor LABEL y INTO m;\n"
               "SELECT x FROM t TO PREDICT out.y USING m;\n");
    bool ok = false;
    const std::string db = (dir / "db").string(), ms = (dir / "models").string();
    std::string out = run_tool({"compile", (dir / "p.sql").string(), "--db", db, "--model-store", ms, "-o",
                                (dir / "wf.yaml").string()}, ok);
    if (!ok) return fail("compile failed: " + out);
    out = run_tool({"run", (dir / "wf.yaml").string(), "--db", db, "--model-store", ms}, ok);
    if (!ok) return fail("run failed: " + out);

    // Normal equations for y = w x + b solved by Cramer's rule.
    double sx = 0, sxx = 0, sy = 0, sxy = 0, n = 10;
    for (int x = 0; x <= 9; ++x) {
        sx += x;
        sxx += x * x;
        sy += 2 * x + 1;
        sxy += x * (2 * x + 1);
    }
    const double det = sxx * n - sx * sx;
    const double w = (sxy * n - sx * sy) / det;
    const double b = (sxx * sy - sx * sxy) / det;

    const ModelArtifact model = ModelStore(dir / "models").load({ModelTarget::Kind::local_name, "m"});
    const auto& lw = std::get<LinearWeights>(model.weights);
    if (lw.coefficients.size() != 1) return fail("expected one coefficient");
    if (std::abs(lw.coefficients[0] - w) > 1e-9 || std::abs(lw.intercept - b) > 1e-9) {
        return fail("weights differ from normal-equations oracle");
    }
    const ResultSet pred = TableStore(dir / "db").load("out");
    if (pred.rows.size() != 10) return fail("expected 10 predictions");
    double max_err = 0;
    for (const auto& row : pred.rows) {
        const double x = *as_number(row[0]);
        max_err = std::max(max_err, std::abs(*as_number(row[1]) - (2 * x + 1)));
    }
    if (max_err > 1e-9) return fail("max abs error " + std::to_string(max_err));
    std::ostringstream detail;
    detail << "w=" << w << " b=" << b << " max abs error " << max_err << " <= 1e-9";
    return {true, detail.str()};
}

// Explanation consistency on 20 random linear datasets plus the x in {0,1,2} case.
Outcome explanation() {
    std::mt19937 rng(2024);
    std::uniform_real_distribution<double> u(-4, 4);
    const ModelRef linreg{std::nullopt, "linreg", "Regressor"};
    double worst = 0;
    for (int iter = 0; iter < 20; ++iter) {
        const int k = 1 + iter % 3;
        ResultSet data;
        FeatureSet fs;
        for (int j = 0; j < k; ++j) data.schema.push_back({"f" + std::to_string(j), DType::Float});
        data.schema.push_back({"y", DType::Float});
        std::vector<double> w(static_cast<std::size_t>(k));
        for (auto& v : w) v = u(rng);
        std::vector<double> sums(static_cast<std::size_t>(k), 0.0);
        const int n = 15 + iter;
        for (int i = 0; i < n; ++i) {
            Row row;
            double y = u(rng);
            for (int j = 0; j < k; ++j) {
                const double x = u(rng);
                row.push_back(x);
                sums[static_cast<std::size_t>(j)] += x;
                y += w[static_cast<std::size_t>(j)] * x;
            }
            row.push_back(y + 0.05 * u(rng));
            data.rows.push_back(row);
        }
        for (int j = 0; j < k; ++j) fs.features.push_back(NumericFeature{"f" + std::to_string(j), sums[static_cast<std::size_t>(j)] / n});
        const ModelArtifact model = train(fs, FieldDesc{"y", DType::Float}, linreg, {}, data);
        const ResultSet pred = predict(model, data, {"pred"});
        double mean = 0;
        for (const auto& row : pred.rows) mean += std::get<double>(row.back()) / n;
        const ExplanationReport report = explain(model, data);
        for (int i = 0; i < n; ++i) {
            const auto& c = report.contributions[static_cast<std::size_t>(i)];
            const double diff = std::get<double>(pred.rows[static_cast<std::size_t>(i)].back()) - mean -
                                std::accumulate(c.begin(), c.end(), 0.0);
            worst = std::max(worst, std::abs(diff));
        }
    }
    if (worst > 1e-9) return fail("max deviation " + std::to_string(worst));

    ResultSet small;
    small.schema = {{"x", DType::Float}, {"y", DType::Float}};
    small.rows = {{0.0, 1.0}, {1.0, 3.0}, {2.0, 5.0}};
    const ModelArtifact model = train(FeatureSet{{NumericFeature{"x", 1.0}}}, FieldDesc{"y", DType::Float}, linreg, {}, small);
    const ExplanationReport report = explain(model, small);
    const double value = report.importance.at(0).second;
    if (std::abs(value - 4.0 / 3.0) > 1e-9) return fail("x in {0,1,2} importance " + std::to_string(value));
    std::ostringstream detail;
    detail << "20 datasets, max deviation " << worst << "; 3-row case " << value;
    return {true, detail.str()};
}

std::string strip_status_lines(const std::string& text) {
    std::istringstream in(text);
    std::string line, out;
    while (std::getline(in, line)) {
        if (line.rfind("step-", 0) == 0 && line.size() > 3 && line.compare(line.size() - 3, 3, " ok") == 0) continue;
        out += line + "\n";
    }
    return out;
}

std::map<std::string, std::string> snapshot(const std::filesystem::path& root) {
    std::map<std::string, std::string> files;
    if (!std::filesystem::exists(root)) return files;
    for (const auto& entry : std::filesystem::recursive_directory_iterator(root)) {
        if (entry.is_regular_file()) files[std::filesystem::relative(entry.path(), root).string()] = read_text(entry.path());
    }
    return files;
}

// compile + run equals sequential exec-step: same tables, models and output.
Outcome toolchain_composition() {
    const std::string program =
        "CREATE TABLE train_set AS SELECT x, y FROM t WHERE x < 8;\n"
        "SELECT * FROM train_set LIMIT 3;\n"
        "SELECT * FROM train_set TO TRAIN linreg.Regressor WITH l2=0.0 LABEL y INTO m;\n"
        "SELECT x FROM t WHERE x >= 8 TO PREDICT holdout.y USING m;\n"
        "SELECT x FROM t LIMIT 2 TO PREDICT y USING m;\n"
        "SELECT x FROM t TO EXPLAIN m WITH width=30;\n";
    TempDir seq, wf;
    for (const TempDir* d : {&seq, &wf}) write_line_table(d->path() / "db");

    std::string sequential;
    for (const Statement& stmt : parse_program(DialectId::generic, program).statements) {
        bool ok = false;
        sequential += run_tool({"exec-step", "--db", (seq / "db").string(), "--model-store", (seq / "models").string(),
                                "--statement", stmt.full_text()}, ok);
        if (!ok) return fail("exec-step failed: " + sequential);
    }

    write_text(wf / "p.sql", program);
    bool ok = false;
    const std::string db = (wf / "db").string(), ms = (wf / "models").string();
    std::string out = run_tool({"compile", (wf / "p.sql").string(), "--db", db, "--model-store", ms, "-o",
                                (wf / "wf.yaml").string()}, ok);
    if (!ok) return fail("compile failed: " + out);
    const std::string composed = run_tool({"run", (wf / "wf.yaml").string(), "--db", db, "--model-store", ms}, ok);
    if (!ok) return fail("run failed: " + composed);

    if (strip_status_lines(composed) != sequential) return fail("printed output differs");
    if (snapshot(seq / "db") != snapshot(wf / "db")) return fail("table directories differ");
    const auto models = snapshot(seq / "models");
    if (models.empty() || models != snapshot(wf / "models")) return fail("model directories differ");
    return {true, "6 statements; tables, models and output identical"};
}

}  // namespace

int main(int argc, char** argv) {
    if (argc != 3) {
        std::cerr << "usage: acceptance <sqlbridge-binary> <golden-dir>\n";
        return 2;
    }
    g_binary = std::filesystem::absolute(argv[1]).string();
    g_golden = argv[2];

    struct Criterion {
        const char* name;
        double limit_seconds;  // 0: no time bound
        std::function<Outcome()> check;
    };
    const std::vector<Criterion> criteria = {
        {"alias disambiguation", 1.0, alias_disambiguation},
        {"collaborative parsing conformance", 0.0, collaborative_parsing},
        {"step count", 1.0, step_count},
        {"yaml determinism and round trip", 0.0, yaml_codec},
        {"end-to-end train/predict", 5.0, train_predict},
        {"explanation consistency", 0.0, explanation},
        {"toolchain composition", 0.0, toolchain_composition},
    };

    int failures = 0;
    for (const auto& c : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Outcome outcome;
        try {
            outcome = c.check();
        } catch (const std::exception& e) {
            outcome = fail(std::string("exception: ") + e.what());
        }
        const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (outcome.pass && c.limit_seconds > 0 && seconds >= c.limit_seconds) {
            outcome = fail("took " + std::to_string(seconds) + " s");
        }
        std::ostringstream line;
        line.setf(std::ios::fixed);
        line.precision(3);
        line << (outcome.pass ? "[PASS] " : "[FAIL] ") << c.name << ": " << outcome.detail << " (" << seconds << " s";
        if (c.limit_seconds > 0) line << " < " << c.limit_seconds << " s";
        line << ")";
        std::cout << line.str() << std::endl;
        failures += !outcome.pass;
    }
    return failures == 0 ? 0 : 1;
}
