#include <gtest/gtest.h>

#include "sqlbridge/dialect.hpp"
#include "sqlbridge/lexer.hpp"
#include "support/program_gen.hpp"

namespace sqlbridge {
namespace {

TEST(Dialect, MysqlSimpleSelect) {
    const auto out = parse_prefix(DialectId::mysql, "SELECT a FROM t;");
    ASSERT_TRUE(out.ok());
    ASSERT_EQ(out.statements.size(), 1u);
    EXPECT_EQ(out.statements[0].kind(), StatementKind::select);
    EXPECT_EQ(out.stop_at, 16u);
}

TEST(Dialect, ToIsUnconsumable) {
    const auto out = parse_prefix(DialectId::mysql, "SELECT a FROM t TO TRAIN m INTO x;");
    ASSERT_FALSE(out.ok());
    EXPECT_EQ(out.error->position, 16u);
    EXPECT_TRUE(out.statements.empty());
}

TEST(Dialect, TrainAsTableAlias) {
    const auto out = parse_prefix(DialectId::mysql, "SELECT * FROM t1, t2, t3 TRAIN;");
    ASSERT_TRUE(out.ok());
    ASSERT_EQ(out.statements.size(), 1u);
    const auto& from = out.statements[0].select().from;
    ASSERT_EQ(from.size(), 3u);
    EXPECT_EQ(from[2].table, "t3");
    EXPECT_EQ(from[2].alias, "TRAIN");
    EXPECT_FALSE(from[0].alias);
}

TEST(Dialect, MisspelledSelect) {
    const auto out = parse_prefix(DialectId::generic, "SELEC a;");
    ASSERT_FALSE(out.ok());
    EXPECT_EQ(out.error->position, 0u);
}

TEST(Dialect, BacktickIdentifiers) {
    const auto my = parse_prefix(DialectId::mysql, "SELECT `a b` FROM t;");
    ASSERT_TRUE(my.ok());
    const auto& proj = my.statements[0].select().projections;
    EXPECT_EQ(std::get<ColumnRef>(proj[0].expr).name, "a b");

    const auto gen = parse_prefix(DialectId::generic, "SELECT `a b` FROM t;");
    ASSERT_FALSE(gen.ok());
    EXPECT_EQ(gen.error->position, 7u);
}

TEST(Dialect, DoubleQuotes) {
    const auto gen = parse_prefix(DialectId::generic, "SELECT \"a b\" FROM t;");
    ASSERT_TRUE(gen.ok());
    EXPECT_EQ(std::get<ColumnRef>(gen.statements[0].select().projections[0].expr).name, "a b");

    const auto my = parse_prefix(DialectId::mysql, "SELECT \"a b\" FROM t;");
    ASSERT_TRUE(my.ok());
    EXPECT_TRUE(std::holds_alternative<Literal>(my.statements[0].select().projections[0].expr));

    EXPECT_FALSE(parse_prefix(DialectId::mysql, "SELECT a FROM \"t\";").ok());
}

TEST(Dialect, DifferencesTableMatchesBehavior) {
    const auto accepted = [](DialectId id, const char* sql) { return parse_prefix(id, sql).ok(); };
    for (const auto& d : dialect_differences()) {
        bool actual = false;
        if (d.feature == "backtick_identifiers") actual = accepted(d.dialect, "SELECT `a` FROM t;");
        else if (d.feature == "double_quoted_identifiers") actual = accepted(d.dialect, "SELECT a FROM \"t\";");
        else if (d.feature == "bare_aliases") actual = accepted(d.dialect, "SELECT a b FROM t c;");
        else if (d.feature == "to_as_alias") actual = accepted(d.dialect, "SELECT a FROM t TO;");
        else FAIL() << d.feature;
        EXPECT_EQ(actual, d.accepted) << to_string(d.dialect) << " " << d.feature;
    }
}

TEST(Dialect, ToRejectedAsAliasAtItsOffset) {
    for (DialectId id : registered_dialects()) {
        const auto out = parse_prefix(id, "SELECT * FROM t TO;");
        ASSERT_FALSE(out.ok());
        EXPECT_EQ(out.error->position, 16u);
    }
    EXPECT_FALSE(parse_prefix(DialectId::generic, "SELECT a AS \"to\" FROM t;").ok());
    EXPECT_FALSE(parse_prefix(DialectId::mysql, "SELECT a FROM `To`;").ok());
}

TEST(Dialect, CreateTableAs) {
    const auto out = parse_prefix(DialectId::generic, "CREATE TABLE t2 AS SELECT x FROM t;");
    ASSERT_TRUE(out.ok());
    EXPECT_EQ(out.statements[0].kind(), StatementKind::create_table_as);
    EXPECT_EQ(std::get<CreateTableAs>(out.statements[0].body).table, "t2");
}

TEST(Dialect, WhereAndLimit) {
    const auto out = parse_prefix(DialectId::generic, "SELECT x FROM t WHERE x > -1.5 AND c = 'a' LIMIT 3");
    ASSERT_TRUE(out.ok());
    const auto& sel = out.statements[0].select();
    ASSERT_EQ(sel.where.size(), 2u);
    EXPECT_EQ(sel.where[0].op, CompareOp::gt);
    EXPECT_EQ(std::get<double>(sel.where[0].value.value), -1.5);
    EXPECT_EQ(sel.limit, 3);
    EXPECT_FALSE(out.statements[0].terminated);
}

TEST(Dialect, RawTextIsExactSlice) {
    const std::string src = "SELECT 1;\n  select a   from t ;";
    const auto out = parse_prefix(DialectId::generic, src);
    ASSERT_EQ(out.statements.size(), 2u);
    EXPECT_EQ(out.statements[0].raw_text, "SELECT 1;");
    EXPECT_EQ(out.statements[1].raw_text, "select a   from t ;");
    EXPECT_EQ(out.statements[1].offset, 12u);
}

TEST(Dialect, StarRequiresFrom) { EXPECT_FALSE(parse_prefix(DialectId::generic, "SELECT *;").ok()); }

TEST(Dialect, LexErrorSurfacesAsParseError) {
    const auto out = parse_prefix(DialectId::generic, "SELECT 'abc");
    ASSERT_FALSE(out.ok());
    EXPECT_EQ(out.error->position, 7u);
}

TEST(Dialect, RegistryLookup) {
    EXPECT_EQ(parse_dialect_id("mysql"), DialectId::mysql);
    EXPECT_EQ(parse_dialect_id("generic"), DialectId::generic);
    EXPECT_THROW(parse_dialect_id("hive"), ValidationError);
    EXPECT_GE(registered_dialects().size(), 2u);
}

std::vector<std::string> normal_sources(unsigned seed, int count) {
    testing::ProgramGenerator gen(seed);
    std::vector<std::string> out;
    for (int i = 0; i < count; ++i) {
        std::string s;
        const int n = gen.uniform(1, 4);
        for (int k = 0; k < n; ++k) s += gen.normal_statement() + "; ";
        out.push_back(s);
    }
    return out;
}

bool has_to_name(const Statement& stmt) {
    auto is_to = [](const std::string& s) { return s.size() == 2 && std::toupper(s[0]) == 'T' && std::toupper(s[1]) == 'O'; };
    const SelectAst& sel = stmt.select();
    for (const auto& p : sel.projections) {
        if (p.alias && is_to(*p.alias)) return true;
        if (const auto* c = std::get_if<ColumnRef>(&p.expr); c && (is_to(c->name) || (c->qualifier && is_to(*c->qualifier)))) return true;
    }
    for (const auto& f : sel.from) {
        if (is_to(f.table) || (f.alias && is_to(*f.alias))) return true;
    }
    return false;
}

TEST(DialectProperty, PrefixMonotonicity) {
    const std::vector<std::string> pads = {" ", "\n", "\t\t", "  \n "};
    for (DialectId id : registered_dialects()) {
        for (const auto& src : normal_sources(21, 200)) {
            const auto base = parse_prefix(id, src);
            ASSERT_TRUE(base.ok()) << src;
            for (const auto& pad : pads) {
                const auto padded = parse_prefix(id, src + pad);
                ASSERT_TRUE(padded.ok());
                ASSERT_EQ(padded.statements.size(), base.statements.size());
                for (std::size_t i = 0; i < base.statements.size(); ++i) {
                    EXPECT_EQ(padded.statements[i].raw_text, base.statements[i].raw_text);
                    EXPECT_EQ(padded.statements[i].body, base.statements[i].body);
                }
            }
        }
    }
}

TEST(DialectProperty, ErrorPositionOnTokenStart) {
    testing::ProgramGenerator gen(22);
    std::mt19937 rng(23);
    int failures = 0;
    for (int i = 0; i < 1500; ++i) {
        std::string src = gen.program().text;
        // Random deletions and insertions of structural characters.
        const int edits = gen.uniform(0, 3);
        for (int e = 0; e < edits && !src.empty(); ++e) {
            const std::size_t at = rng() % src.size();
            if (rng() % 2) src.erase(at, 1);
            else src.insert(at, 1, ",;()* TO"[rng() % 8]);
        }
        for (DialectId id : registered_dialects()) {
            const auto out = parse_prefix(id, src);
            if (out.ok()) continue;
            ++failures;
            const std::size_t pos = out.error->position;
            if (pos == src.size()) continue;
            bool on_token = false;
            try {
                for (const auto& t : tokenize(src)) on_token = on_token || t.start == pos;
            } catch (const LexError& e) {
                Lexer lexer(src);
                try {
                    while (auto t = lexer.next_token()) on_token = on_token || t->start == pos;
                } catch (const LexError&) {
                }
                on_token = on_token || e.position() == pos;
            }
            EXPECT_TRUE(on_token) << src << " @" << pos;
        }
    }
    EXPECT_GT(failures, 100);
}

TEST(DialectProperty, Determinism) {
    testing::ProgramGenerator gen(24);
    for (int i = 0; i < 300; ++i) {
        const auto src = gen.program().text;
        for (DialectId id : registered_dialects()) {
            const auto a = parse_prefix(id, src);
            const auto b = parse_prefix(id, src);
            ASSERT_EQ(a.ok(), b.ok());
            EXPECT_EQ(a.stop_at, b.stop_at);
            if (!a.ok()) {
                EXPECT_EQ(a.error->position, b.error->position);
                EXPECT_EQ(a.error->message, b.error->message);
            }
            ASSERT_EQ(a.statements.size(), b.statements.size());
            for (std::size_t k = 0; k < a.statements.size(); ++k) {
                EXPECT_EQ(a.statements[k].raw_text, b.statements[k].raw_text);
            }
        }
    }
}

TEST(DialectProperty, ReservedToNeverAppears) {
    testing::ProgramGenerator gen(25);
    const std::vector<std::string> to_forms = {"TO", "to", "\"TO\"", "`to`", "To"};
    for (int i = 0; i < 1000; ++i) {
        std::string src = gen.normal_statement();
        // Splice a TO spelling after a random token boundary.
        const auto tokens = tokenize(src);
        const std::size_t at = tokens[static_cast<std::size_t>(gen.uniform(0, static_cast<int>(tokens.size()) - 1))].end;
        src.insert(at, " " + gen.pick(to_forms) + " ");
        for (DialectId id : registered_dialects()) {
            const auto out = parse_prefix(id, src);
            for (const auto& stmt : out.statements) EXPECT_FALSE(has_to_name(stmt)) << src;
        }
    }
}

}  // namespace
}  // namespace sqlbridge
