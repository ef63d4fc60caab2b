#include "adaquery/error.hpp"
#include "adaquery/parser.hpp"
#include "adaquery/schema_model.hpp"
#include "doctest.h"

using namespace adaquery;

namespace {

const FeatureCatalog& cat() { return FeatureCatalog::builtin(); }

StagedObject stage(const SchemaModel& m, const char* sql) { return m.stage(sql::parse_statement(sql, cat())); }

}  // namespace

TEST_CASE("stage") {
    SchemaModel m;
    CHECK(std::get<TableDef>(stage(m, "CREATE TABLE t0 (c0 INTEGER)")) ==
          TableDef{"t0", {{"c0", DataType::Integer}}, TableKind::BaseTable});
    CHECK(std::get<IndexDef>(stage(m, "CREATE INDEX i0 ON t0 (c0)")) == IndexDef{"i0", "t0", {"c0"}, false});
    CHECK(std::get<IndexDef>(stage(m, "CREATE UNIQUE INDEX i1 ON t0 (c0)")).unique);
    auto v = sql::parse_statement("CREATE VIEW v0 AS SELECT t0.c0 AS c0 FROM t0", cat());
    std::get<sql::CreateView>(v).select.items[0].expr.dtype = DataType::Integer;
    const auto view = std::get<TableDef>(m.stage(v));
    CHECK(view.name == "v0");
    CHECK(view.kind == TableKind::View);
    CHECK(view.columns == std::vector<ColumnDef>{{"c0", DataType::Integer}});
    CHECK(std::holds_alternative<std::monostate>(stage(m, "ANALYZE")));
    CHECK(std::holds_alternative<std::monostate>(stage(m, "INSERT INTO t0 (c0) VALUES (1)")));
}

TEST_CASE("commit only on success") {
    SchemaModel m;
    const auto t0 = stage(m, "CREATE TABLE t0 (c0 INTEGER)");
    m.commit(t0, ExecutionStatus::error("no"));
    CHECK(m.empty());
    CHECK(m.describe().empty());
    m.commit(t0, ExecutionStatus::fatal("gone"));
    CHECK(m.empty());
    m.commit(t0, ExecutionStatus::success());
    m.commit(stage(m, "CREATE TABLE t1 (c0 TEXT, c1 BOOLEAN)"), ExecutionStatus::success());
    CHECK(m.tables().size() == 2);
    CHECK(m.find_table("t1")->columns[1].dtype == DataType::Boolean);
    CHECK(m.has_object("t0"));
    CHECK_FALSE(m.has_object("t2"));
}

TEST_CASE("fresh names") {
    SchemaModel m;
    CHECK(m.fresh_name(ObjectClass::Table) == "t0");
    CHECK(m.fresh_name(ObjectClass::Table) == "t1");
    CHECK(m.fresh_name(ObjectClass::View) == "v0");
    CHECK(m.fresh_name(ObjectClass::Index) == "i0");
    m.commit(stage(m, "CREATE TABLE t2 (c0 INTEGER)"), ExecutionStatus::success());
    CHECK(m.fresh_name(ObjectClass::Table) == "t3");
}

TEST_CASE("fresh_name never collides") {
    Rng rng(3);
    SchemaModel m;
    for (int i = 0; i < 300; ++i) {
        const auto cls = static_cast<ObjectClass>(rng.below(3));
        const auto name = m.fresh_name(cls);
        REQUIRE_FALSE(m.has_object(name));
        if (rng.chance(0.5)) {
            if (cls == ObjectClass::Index)
                m.commit(IndexDef{name, "t0", {"c0"}, false}, ExecutionStatus::success());
            else
                m.commit(TableDef{name, {{"c0", DataType::Integer}},
                                  cls == ObjectClass::View ? TableKind::View : TableKind::BaseTable},
                         ExecutionStatus::success());
        }
    }
}

TEST_CASE("random selection") {
    SchemaModel m;
    Rng r0(1);
    CHECK_THROWS_AS(m.random_table(r0), EmptySchemaError);
    m.commit(stage(m, "CREATE TABLE t0 (c0 INTEGER)"), ExecutionStatus::success());
    m.commit(stage(m, "CREATE TABLE t1 (c0 INTEGER, c1 TEXT)"), ExecutionStatus::success());
    std::vector<std::string> a, b;
    Rng r1(42), r2(42);
    for (int i = 0; i < 50; ++i) {
        a.push_back(m.random_table(r1).name);
        b.push_back(m.random_table(r2).name);
    }
    CHECK(a == b);
    CHECK(std::count(a.begin(), a.end(), "t0") > 0);
    CHECK(std::count(a.begin(), a.end(), "t1") > 0);
    const auto& c = SchemaModel::random_column(*m.find_table("t1"), r1);
    CHECK((c.name == "c0" || c.name == "c1"));
    CHECK(m.count(TableKind::BaseTable) == 2);
    CHECK(m.count(TableKind::View) == 0);
}
