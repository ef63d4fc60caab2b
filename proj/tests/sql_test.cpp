#include "adaquery/error.hpp"
#include "adaquery/generator.hpp"
#include "adaquery/parser.hpp"
#include "doctest.h"

using namespace adaquery;
using namespace adaquery::sql;

namespace {

const FeatureCatalog& cat() { return FeatureCatalog::builtin(); }

std::set<std::string> ids(const FeatureSet& s) {
    const auto v = feature_ids(s, cat());
    return {v.begin(), v.end()};
}

Expr col(const char* name, DataType t = DataType::Integer) { return Expr::column_ref("t0", name, t); }
Expr lit(std::int64_t v) { return Expr::constant(Value::integer(v)); }
Expr call(const char* id, std::vector<Expr> args) { return Expr::call(cat().index(id), std::move(args)); }

}  // namespace

TEST_CASE("render uses catalog templates") {
    CHECK(render(call("SIN", {lit(1)}), cat()) == "SIN(1)");
    CHECK(render(call("!=", {call("NULLIF", {col("c0"), lit(2)}), lit(1)}), cat()) == "(NULLIF(t0.c0, 2) != 1)");
    CHECK(render(call("IS_NULL", {Expr::constant(Value::null())}), cat()) == "(NULL IS NULL)");
    CHECK(render(Expr::constant(Value::text("it's")), cat()) == "'it''s'");
    CHECK(render(call("BETWEEN", {lit(1), lit(0), lit(2)}), cat()) == "(1 BETWEEN 0 AND 2)");
}

TEST_CASE("feature collection examples") {
    CHECK(ids([] {
              FeatureSet s;
              collect_features(call("SIN", {lit(1)}), cat(), s);
              return s;
          }()) == std::set<std::string>{"SIN", "SIN1INT"});
    CHECK(ids([] {
              FeatureSet s;
              collect_features(call("SIN", {Expr::constant(Value::text("a"))}), cat(), s);
              return s;
          }()) == std::set<std::string>{"SIN", "SIN1STRING", "IMPLICIT_CAST"});

    const auto st = parse_statement("SELECT * FROM t0 WHERE (NULLIF(c0, 2) != 1)", cat());
    const auto f = ids(collect_features(st, cat()));
    for (const char* id : {"SELECT", "WHERE", "NULLIF", "!="}) CHECK(f.count(id) == 1);
}

TEST_CASE("parser accepts rendered statements") {
    const char* stmts[] = {
        "CREATE TABLE t0 (c0 INTEGER, c1 TEXT, c2 BOOLEAN)",
        "CREATE UNIQUE INDEX i0 ON t0 (c0, c1)",
        "CREATE VIEW v0 AS SELECT DISTINCT t0.c0 AS c0 FROM t0",
        "INSERT INTO t0 (c0, c1) VALUES (1, 'a'), (NULL, '')",
        "ANALYZE",
        "SELECT * FROM t0 LEFT JOIN t1 ON (t0.c0 = t1.c0) WHERE (EXISTS (SELECT 1 FROM t1))",
        "SELECT t0.c0 FROM t0 NATURAL JOIN t1 CROSS JOIN t2",
        "SELECT (CASE WHEN TRUE THEN 1 ELSE 2 END) FROM t0 WHERE ((t0.c1 LIKE 'a%') OR (NOT (t0.c2)))",
    };
    for (const char* s : stmts) {
        CAPTURE(s);
        const auto st = parse_statement(s, cat());
        const auto again = parse_statement(render(st, cat()), cat());
        CHECK(render(again, cat()) == render(st, cat()));
    }
}

TEST_CASE("parser rejects malformed input") {
    CHECK_THROWS_AS(parse_statement("SELECT FROM", cat()), ParseError);
    CHECK_THROWS_AS(parse_statement("SELECT BOGUS(1) FROM t0", cat()), ParseError);
    CHECK_THROWS_AS(parse_statement("CREATE TABLE t0 (c0 INTEGER", cat()), ParseError);
    CHECK_THROWS_AS(parse_expression("(1 +", cat()), ParseError);
}

TEST_CASE("typing helpers") {
    CHECK(infer_type(call("NULLIF", {Expr::constant(Value::null()), col("c1", DataType::Text)}), cat()) ==
          DataType::Text);
    CHECK(ill_typed_call(call("=", {lit(1), Expr::constant(Value::text("1"))}), cat()));
    CHECK_FALSE(ill_typed_call(call("=", {lit(1), Expr::constant(Value::null())}), cat()));
    CHECK(ill_typed_slot(DataType::Integer, DataType::Boolean));
    CHECK_FALSE(ill_typed_slot(DataType::Untyped, DataType::Boolean));
}

TEST_CASE("generated statements round trip and keep exact feature sets") {
    // Every generated statement re-parses to the same text, and re-walking its
    // AST recovers exactly the features recorded during generation.
    for (TypingMode mode : {TypingMode::Static, TypingMode::Dynamic}) {
        GenConfig cfg;
        cfg.max_depth = 3;
        cfg.typing = mode;
        cfg.max_views = 2;
        Generator gen(cat(), cfg);
        gen.set_depth(3);
        Rng rng(static_cast<std::uint64_t>(mode) + 5);
        int checked = 0;
        for (int round = 0; round < 40; ++round) {
            SchemaModel schema;
            for (auto kind : {StatementKind::CreateTable, StatementKind::CreateTable, StatementKind::Insert,
                              StatementKind::Insert, StatementKind::CreateIndex, StatementKind::CreateView}) {
                auto g = gen.generate_statement(kind, schema, rng);
                if (!g) continue;
                REQUIRE(g->features == collect_features(g->ast, cat()));
                REQUIRE(render(parse_statement(g->sql, cat()), cat()) == g->sql);
                schema.commit(schema.stage(g->ast), ExecutionStatus::success());
                ++checked;
            }
            for (int q = 0; q < 25; ++q) {
                auto qc = gen.generate_query(schema, rng);
                REQUIRE(qc);
                FeatureSet base;
                collect_features(qc->base, cat(), base);
                REQUIRE(base == qc->base_features);
                FeatureSet pred;
                collect_where_features(qc->predicate, cat(), pred);
                REQUIRE(pred == qc->predicate_features);
                Select full = qc->base;
                full.where = qc->predicate;
                const auto text = render(full, cat());
                REQUIRE(render(parse_select(text, cat()), cat()) == text);
                ++checked;
            }
        }
        CHECK(checked > 1000);
    }
}
