#include <algorithm>

#include "adaquery/error.hpp"
#include "adaquery/generator.hpp"
#include "adaquery/mock.hpp"
#include "adaquery/parser.hpp"
#include "doctest.h"

using namespace adaquery;
using sql::StatementKind;

namespace {

const FeatureCatalog& cat() { return FeatureCatalog::builtin(); }

std::string spec_path(const char* name) { return std::string(ADAQUERY_SOURCE_DIR) + "/data/mock/" + name; }

MockAdapter open_spec(const char* text) {
    MockAdapter m(MockDialectSpec::parse(text));
    m.open("");
    return m;
}

std::vector<Row> sorted(std::vector<Row> rows) {
    std::sort(rows.begin(), rows.end());
    return rows;
}

Row ints(std::initializer_list<std::int64_t> v) {
    Row r;
    for (auto x : v) r.push_back(Value::integer(x));
    return r;
}

void load_t0(MockAdapter& m, const char* values) {
    REQUIRE(m.execute("CREATE TABLE t0 (c0 INTEGER)").ok());
    REQUIRE(m.execute(std::string("INSERT INTO t0 (c0) VALUES ") + values).ok());
}

}  // namespace

TEST_CASE("spec parsing") {
    const auto s = MockDialectSpec::parse(
        "# comment\n[supported]\nSELECT WHERE\nTABLE\n[typing]\ndynamic\n[bugs]\nNULLIF,!= first_arg\n"
        "[flaky]\nSIN 0.5\n");
    CHECK_FALSE(s.all_supported);
    CHECK(s.supported == std::set<std::string>{"SELECT", "WHERE", "TABLE"});
    CHECK(s.typing == MockTyping::Dynamic);
    REQUIRE(s.bugs.size() == 1);
    CHECK(s.bugs[0] == BugInjection{{"NULLIF", "!="}, BugEffect::FirstArg});
    CHECK(s.flaky.at("SIN") == 0.5);
    CHECK(MockDialectSpec::parse(s.serialize()).serialize() == s.serialize());

    CHECK(MockDialectSpec::parse("[supported]\n@all\n*\n").all_supported);
    CHECK(MockDialectSpec::parse("[supported]\n*\n").supported.count("*") == 1);

    auto line_of = [](const char* text) -> std::size_t {
        try {
            MockDialectSpec::parse(text);
        } catch (const ParseError& e) {
            return e.line();
        }
        return 0;
    };
    CHECK(line_of("SELECT\n") == 1);
    CHECK(line_of("[supported]\nSELECT\n[nope]\n") == 3);
    CHECK(line_of("[typing]\nloose\n") == 2);
    CHECK(line_of("[bugs]\nNULLIF,!= explode\n") == 2);
    CHECK(line_of("[flaky]\nSIN 1.5\n") == 2);
    CHECK_THROWS_AS(MockDialectSpec::parse("[supported]\nSELECT\n[bugs]\nNULLIF,!= first_arg\n").validate(cat()),
                    CatalogError);
    CHECK_THROWS_AS(MockDialectSpec::parse("[supported]\nBOGUS\n").validate(cat()), CatalogError);
}

TEST_CASE("composite and typing support follow the spec") {
    const auto s = MockDialectSpec::parse("[supported]\nSIN\n[typing]\nstatic\n");
    CHECK(s.supports(cat().index("SIN"), cat()));
    CHECK(s.supports(cat().index("SIN1STRING"), cat()));
    CHECK_FALSE(s.supports(cat().index("COS1INT"), cat()));
    CHECK_FALSE(s.supports(cat().index("IMPLICIT_CAST"), cat()));
    CHECK(MockDialectSpec::parse("[supported]\nSIN\n[typing]\ndynamic\n").supports(cat().index("IMPLICIT_CAST"), cat()));
}

TEST_CASE("adapter examples") {
    auto m = open_spec("[supported]\nTABLE INTEGER SELECT\n");
    CHECK(m.execute("CREATE TABLE t0 (c0 INTEGER)").ok());
    const auto st = m.execute("CREATE INDEX i0 ON t0 (c0)");
    CHECK_FALSE(st.ok());
    CHECK(st.message == "unsupported: INDEX");

    auto full = open_spec("[supported]\n@all\n");
    const auto one = full.query("SELECT 1");
    REQUIRE(one.status.ok());
    CHECK(one.rows.rows == std::vector<Row>{ints({1})});
    CHECK_FALSE(full.query("SELECT * FROM missing").status.ok());
    CHECK(full.execute("CREATE TABLE t0 (c0 INTEGER)").ok());
    CHECK(full.execute("INSERT INTO t0 (c0) VALUES (1)").ok());

    full.kill();
    CHECK(full.execute("INSERT INTO t0 (c0) VALUES (1)").fatal());
    CHECK(full.query("SELECT 1").status.fatal());
}

TEST_CASE("ddl semantics") {
    auto m = open_spec("[supported]\n@all\n");
    REQUIRE(m.execute("CREATE TABLE t0 (c0 INTEGER, c1 TEXT)").ok());
    CHECK_FALSE(m.execute("CREATE TABLE t0 (c0 INTEGER)").ok());
    CHECK_FALSE(m.execute("CREATE TABLE t1 (c0 INTEGER, c0 TEXT)").ok());
    REQUIRE(m.execute("INSERT INTO t0 (c0, c1) VALUES (1, 'a'), (1, 'b')").ok());
    CHECK_FALSE(m.execute("CREATE UNIQUE INDEX i0 ON t0 (c0)").ok());
    CHECK(m.execute("CREATE UNIQUE INDEX i0 ON t0 (c1)").ok());
    // A unique violation rejects the whole INSERT.
    CHECK_FALSE(m.execute("INSERT INTO t0 (c0, c1) VALUES (5, 'z'), (6, 'a')").ok());
    CHECK(m.query("SELECT * FROM t0").rows.rows.size() == 2);
    REQUIRE(m.execute("CREATE VIEW v0 AS SELECT t0.c0 AS c0 FROM t0").ok());
    CHECK_FALSE(m.execute("CREATE INDEX i1 ON v0 (c0)").ok());
    CHECK_FALSE(m.execute("INSERT INTO v0 (c0) VALUES (1)").ok());
    REQUIRE(m.execute("INSERT INTO t0 (c0, c1) VALUES (3, 'c')").ok());
    // Views are evaluated at query time.
    CHECK(m.query("SELECT * FROM v0").rows.rows.size() == 3);
    CHECK(m.database().describe().size() == 3);
}

TEST_CASE("injected NULLIF bug changes the WHERE result deterministically") {
    MockAdapter m;
    m.open(spec_path("nullif.spec"));
    load_t0(m, "(1), (2), (NULL)");
    const char* q = "SELECT * FROM t0 WHERE (NULLIF(t0.c0, 2) != 1)";
    const auto buggy = m.query(q);
    REQUIRE(buggy.status.ok());
    CHECK(sorted(buggy.rows.rows) == std::vector<Row>{ints({2})});
    CHECK(m.query(q).rows == buggy.rows);
    const auto ref = m.reference_query(q);
    REQUIRE(ref.status.ok());
    CHECK(ref.rows.rows.empty());
    // Not at the WHERE root: no effect.
    CHECK(m.query("SELECT * FROM t0 WHERE ((NULLIF(t0.c0, 2) != 1) IS TRUE)").rows.rows.empty());
}

TEST_CASE("reference evaluator examples") {
    auto m = open_spec("[supported]\n@all\n");
    load_t0(m, "(0), (1), (NULL)");
    CHECK(m.reference_query("SELECT * FROM t0 WHERE NULL").rows.rows.empty());
    CHECK(m.reference_query("SELECT * FROM t0 WHERE (t0.c0 > 0)").rows.rows == std::vector<Row>{ints({1})});
    const auto proj = m.reference_query("SELECT 7 FROM t0");
    CHECK(proj.rows.rows == std::vector<Row>(3, ints({7})));
    CHECK(proj.rows.columns == 1);
    auto limited = open_spec("[supported]\nSELECT TABLE INTEGER INSERT\n");
    load_t0(limited, "(1)");
    CHECK(limited.reference_query("SELECT * FROM t0 WHERE (t0.c0 > 0)").status.message == "unsupported: >");
}

TEST_CASE("scalar semantics") {
    using namespace mock;
    CHECK(truth(Value::null()) == std::nullopt);
    CHECK(truth(Value::integer(2)) == true);
    CHECK(compare(Value::integer(1), Value::null()) == std::nullopt);
    CHECK(*compare(Value::text("a"), Value::text("b")) < 0);
    CHECK(like("abc", "a%"));
    CHECK(like("abc", "_b_"));
    CHECK_FALSE(like("abc", "b%"));
    const Value args[] = {Value::integer(3), Value::integer(3)};
    CHECK(apply("NULLIF", args) == Value::null());
    CHECK(apply("+", args) == Value::integer(6));
    const Value div0[] = {Value::integer(1), Value::integer(0)};
    CHECK(apply("/", div0) == Value::null());
    const Value big[] = {Value::integer(INT64_MAX), Value::integer(1)};
    CHECK_THROWS_AS(apply("+", big), EvalError);
    const Value and_args[] = {Value::boolean(false), Value::null()};
    CHECK(apply("AND", and_args) == Value::boolean(false));
    const Value or_args[] = {Value::boolean(true), Value::null()};
    CHECK(apply("OR", or_args) == Value::boolean(true));
    for (const auto& d : cat().all())
        if (d.category == FeatureCategory::Function || d.category == FeatureCategory::Operator) CHECK(implemented(d.id));
}

TEST_CASE("flaky features fail deterministically") {
    auto m = open_spec("[supported]\n@all\n[flaky]\nABS 0.5\n");
    load_t0(m, "(1)");
    int failures = 0;
    for (int k = 0; k < 200; ++k) {
        const auto q = "SELECT ABS(" + std::to_string(k) + ") FROM t0";
        const auto a = m.query(q);
        CHECK(a.status.ok() == m.query(q).status.ok());
        if (!a.status.ok()) {
            CHECK(a.status.message == "flaky: ABS");
            ++failures;
        }
    }
    CHECK(failures > 60);
    CHECK(failures < 140);
}

TEST_CASE("engine agrees with the reference evaluator on generated queries") {
    for (const char* spec : {"full.spec", "full_dynamic.spec"}) {
        CAPTURE(spec);
        MockAdapter m;
        GenConfig cfg;
        cfg.typing = std::string(spec) == "full.spec" ? TypingMode::Static : TypingMode::Dynamic;
        Generator gen(cat(), cfg);
        gen.set_depth(3);
        Rng rng(21);
        int compared = 0;
        for (int round = 0; round < 30; ++round) {
            m.open(spec_path(spec));
            SchemaModel schema;
            for (auto kind : {StatementKind::CreateTable, StatementKind::CreateTable, StatementKind::Insert,
                              StatementKind::Insert, StatementKind::Insert, StatementKind::CreateView}) {
                auto g = gen.generate_statement(kind, schema, rng);
                if (g) schema.commit(schema.stage(g->ast), m.execute(g->sql));
            }
            for (int i = 0; i < 100; ++i) {
                auto q = gen.generate_query(schema, rng);
                sql::Select s = q->base;
                s.where = q->predicate;
                const auto sql = sql::render(s, cat());
                const auto a = m.query(sql);
                const auto b = m.reference_query(sql);
                CAPTURE(sql);
                REQUIRE(a.status.ok() == b.status.ok());
                if (!a.status.ok()) continue;
                REQUIRE(a.rows.columns == b.rows.columns);
                REQUIRE(sorted(a.rows.rows) == sorted(b.rows.rows));
                ++compared;
            }
        }
        CHECK(compared > 2000);
    }
}

TEST_CASE("schema model mirrors the mock catalog") {
    MockAdapter m;
    Generator gen(cat(), GenConfig{});
    Rng rng(5);
    for (int seq = 0; seq < 100; ++seq) {
        m.open(spec_path("benchmark.spec"));
        SchemaModel schema;
        for (int i = 0; i < 12; ++i) {
            const auto kind = static_cast<StatementKind>(rng.below(5));
            std::optional<GeneratedStatement> g;
            try {
                g = gen.generate_statement(kind, schema, rng);
            } catch (const EmptySchemaError&) {
                continue;
            }
            if (!g) continue;
            schema.commit(schema.stage(g->ast), m.execute(g->sql));
            REQUIRE(schema.describe() == m.database().describe());
        }
    }
}
