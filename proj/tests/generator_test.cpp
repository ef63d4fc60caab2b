#include <boost/math/distributions/chi_squared.hpp>
#include <map>

#include "adaquery/error.hpp"
#include "adaquery/generator.hpp"
#include "adaquery/mock.hpp"
#include "doctest.h"

using namespace adaquery;
using sql::StatementKind;

namespace {

const FeatureCatalog& cat() { return FeatureCatalog::builtin(); }

// Nested call depth: leaves 0, a call or EXISTS one more than its deepest operand.
int nesting(const sql::Expr& e) {
    int inner = 0;
    for (const auto& a : e.args) inner = std::max(inner, nesting(a));
    if (e.subquery) sql::visit_exprs(*e.subquery, [&](const sql::Expr& x) { inner = std::max(inner, nesting(x)); });
    return e.kind == sql::Expr::Kind::Call || e.kind == sql::Expr::Kind::Exists ? inner + 1 : 0;
}

SchemaModel small_schema() {
    SchemaModel s;
    s.commit(TableDef{s.fresh_name(ObjectClass::Table), {{"c0", DataType::Integer}, {"c1", DataType::Text}},
                      TableKind::BaseTable},
             ExecutionStatus::success());
    s.commit(TableDef{s.fresh_name(ObjectClass::Table), {{"c0", DataType::Boolean}}, TableKind::BaseTable},
             ExecutionStatus::success());
    return s;
}

}  // namespace

TEST_CASE("depth schedule") {
    GenConfig cfg;
    cfg.depth_schedule_interval = 100000;
    cfg.max_depth = 3;
    CHECK(current_depth(0, cfg) == 1);
    CHECK(current_depth(99999, cfg) == 1);
    CHECK(current_depth(100000, cfg) == 2);
    CHECK(current_depth(199999, cfg) == 2);
    CHECK(current_depth(200000, cfg) == 3);
    CHECK(current_depth(10000000, cfg) == 3);
}

TEST_CASE("choose_alternative never picks zero weight") {
    const std::vector<FeatureIndex> alts{cat().index("="), cat().index("!="), cat().index("<"), cat().index("<=>")};
    std::vector<FeatureState> states(cat().size(), FeatureState::Supported);
    states[cat().index("<=>")] = FeatureState::Unsupported;
    const auto ctx = make_context("cmp", alts);
    Rng rng(1);
    std::map<FeatureIndex, int> counts;
    for (int i = 0; i < 1000000; ++i) ++counts[choose_alternative(ctx, states, rng)];
    CHECK(counts.count(cat().index("<=>")) == 0);
    CHECK(counts.size() == 3);

    const auto single = make_context("one", {cat().index("SIN")});
    for (int i = 0; i < 100; ++i) CHECK(choose_alternative(single, states, rng) == cat().index("SIN"));
}

TEST_CASE("choose_alternative frequencies pass a chi-square test") {
    std::vector<FeatureIndex> alts;
    for (FeatureIndex f = 0; f < 8; ++f) alts.push_back(f);
    std::vector<FeatureState> states(cat().size(), FeatureState::Unknown);
    const auto ctx = make_context("u", alts);
    Rng rng(99);
    std::vector<double> counts(alts.size());
    const int draws = 100000;
    for (int i = 0; i < draws; ++i) ++counts[choose_alternative(ctx, states, rng)];
    const double expected = static_cast<double>(draws) / alts.size();
    double chi2 = 0;
    for (double c : counts) chi2 += (c - expected) * (c - expected) / expected;
    const boost::math::chi_squared dist(static_cast<double>(alts.size() - 1));
    CHECK(chi2 < boost::math::quantile(dist, 0.9987));
    for (double c : counts) CHECK(std::fabs(c - expected) < 3 * std::sqrt(expected * (1 - 1.0 / alts.size())) + 1);
}

TEST_CASE("expression depth bound") {
    const auto schema = small_schema();
    std::vector<const TableDef*> scope{&schema.tables()[0], &schema.tables()[1]};
    for (TypingMode mode : {TypingMode::Static, TypingMode::Dynamic}) {
        GenConfig cfg;
        cfg.typing = mode;
        cfg.max_depth = 4;
        Generator gen(cat(), cfg);
        Rng rng(2);
        for (int budget = 0; budget <= 4; ++budget) {
            int max_seen = 0;
            for (int i = 0; i < 2000; ++i) {
                sql::FeatureSet fs;
                const auto e = gen.generate_expression(DataType::Boolean, budget, scope, &schema, rng, fs);
                REQUIRE(nesting(e) <= budget);
                max_seen = std::max(max_seen, nesting(e));
                if (budget == 0) REQUIRE(e.kind != sql::Expr::Kind::Call);
                sql::FeatureSet walked;
                sql::collect_features(e, cat(), walked);
                walked.erase(cat().index("SELECT"));
                walked.erase(cat().index("WHERE"));
                for (auto f : walked) REQUIRE(fs.count(f) == 1);
            }
            CHECK(max_seen == budget);
        }
        sql::FeatureSet fs;
        CHECK_THROWS_AS(gen.generate_expression(DataType::Integer, -1, scope, &schema, rng, fs), Error);
    }
}

TEST_CASE("generation is deterministic for a seed") {
    auto stream = [](std::uint64_t seed) {
        GenConfig cfg;
        cfg.seed = seed;
        Generator gen(cat(), cfg);
        gen.set_depth(3);
        Rng rng(seed);
        SchemaModel schema;
        std::vector<std::string> out;
        for (auto kind : {StatementKind::CreateTable, StatementKind::CreateTable, StatementKind::Insert,
                          StatementKind::CreateIndex, StatementKind::CreateView}) {
            auto g = gen.generate_statement(kind, schema, rng);
            if (!g) continue;
            out.push_back(g->sql);
            for (auto f : g->features) out.push_back(cat().id(f));
            schema.commit(schema.stage(g->ast), ExecutionStatus::success());
        }
        for (int i = 0; i < 200; ++i) {
            auto q = gen.generate_query(schema, rng);
            sql::Select s = q->base;
            s.where = q->predicate;
            out.push_back(sql::render(s, cat()));
        }
        return out;
    };
    CHECK(stream(17) == stream(17));
    CHECK(stream(17) != stream(18));
}

TEST_CASE("suppressed statement kinds yield nothing") {
    Generator gen(cat(), GenConfig{});
    std::vector<FeatureState> states(cat().size(), FeatureState::Supported);
    states[cat().index("INDEX")] = FeatureState::Unsupported;
    gen.set_states(states);
    auto schema = small_schema();
    Rng rng(4);
    for (int i = 0; i < 50; ++i) CHECK_FALSE(gen.generate_statement(StatementKind::CreateIndex, schema, rng));
    CHECK(gen.generate_statement(StatementKind::Insert, schema, rng));
    states[cat().index("WHERE")] = FeatureState::Unsupported;
    gen.set_states(states);
    CHECK_FALSE(gen.generate_query(schema, rng));
    SchemaModel empty;
    CHECK_THROWS_AS(gen.generate_statement(StatementKind::Insert, empty, rng), EmptySchemaError);
}

TEST_CASE("unsupported features never appear after suppression") {
    Rng pick(8);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<FeatureState> states(cat().size(), FeatureState::Unknown);
        for (FeatureIndex f = 0; f < cat().size(); ++f)
            if (pick.chance(0.25)) states[f] = FeatureState::Unsupported;
        // Keep the round skeleton alive so queries are generated at all.
        for (const char* id : {"TABLE", "INSERT", "SELECT", "WHERE", "INTEGER"})
            states[cat().index(id)] = FeatureState::Supported;
        GenConfig cfg;
        cfg.typing = trial % 2 ? TypingMode::Dynamic : TypingMode::Learn;
        Generator gen(cat(), cfg);
        gen.set_states(states);
        gen.set_depth(3);
        Rng rng(trial);
        SchemaModel schema;
        for (auto kind : {StatementKind::CreateTable, StatementKind::CreateTable, StatementKind::Insert,
                          StatementKind::CreateIndex, StatementKind::CreateView, StatementKind::Analyze}) {
            std::optional<GeneratedStatement> g;
            try {
                g = gen.generate_statement(kind, schema, rng);
            } catch (const EmptySchemaError&) {
                continue;
            }
            if (!g) continue;
            for (auto f : sql::collect_features(g->ast, cat())) REQUIRE(states[f] != FeatureState::Unsupported);
            schema.commit(schema.stage(g->ast), ExecutionStatus::success());
        }
        if (schema.empty()) continue;
        for (int i = 0; i < 300; ++i) {
            std::optional<QueryCase> q;
            try {
                q = gen.generate_query(schema, rng);
            } catch (const GenerationExhaustedError&) {
                break;
            }
            if (!q) continue;
            for (auto f : q->features()) REQUIRE(states[f] != FeatureState::Unsupported);
        }
    }
}

TEST_CASE("learn typing switches to static when IMPLICIT_CAST is unsupported") {
    GenConfig cfg;
    cfg.typing = TypingMode::Learn;
    Generator gen(cat(), cfg);
    CHECK(gen.effective_typing() == TypingMode::Dynamic);
    std::vector<FeatureState> states(cat().size(), FeatureState::Unknown);
    states[cat().index("IMPLICIT_CAST")] = FeatureState::Unsupported;
    gen.set_states(states);
    CHECK(gen.effective_typing() == TypingMode::Static);
}

TEST_CASE("static typing is valid on a fully supported static mock") {
    // Only runtime value errors may fail; no statement may be ill-typed.
    MockAdapter db;
    db.open(std::string(ADAQUERY_SOURCE_DIR) + "/data/mock/full.spec");
    GenConfig cfg;
    cfg.typing = TypingMode::Static;
    cfg.max_views = 1;
    Generator gen(cat(), cfg);
    gen.set_depth(3);
    Rng rng(12);
    int executed = 0, failed = 0;
    auto allowed = [](const std::string& m) {
        for (const char* ok : {"integer overflow", "numeric result out of range", "string or blob too big",
                               "UNIQUE constraint failed"})
            if (m.find(ok) != std::string::npos) return true;
        return false;
    };
    while (executed < 10000) {
        db.close();
        db.open(std::string(ADAQUERY_SOURCE_DIR) + "/data/mock/full.spec");
        SchemaModel schema;
        for (auto kind : {StatementKind::CreateTable, StatementKind::CreateTable, StatementKind::Insert,
                          StatementKind::Insert, StatementKind::Insert, StatementKind::CreateIndex,
                          StatementKind::CreateView, StatementKind::Analyze}) {
            auto g = gen.generate_statement(kind, schema, rng);
            if (!g) continue;
            const auto st = db.execute(g->sql);
            ++executed;
            if (!st.ok()) {
                ++failed;
                CAPTURE(g->sql);
                CAPTURE(st.message);
                REQUIRE(allowed(st.message));
            }
            for (auto f : g->features) REQUIRE(cat().id(f) != "IMPLICIT_CAST");
            schema.commit(schema.stage(g->ast), st);
        }
        for (int i = 0; i < 100; ++i) {
            auto q = gen.generate_query(schema, rng);
            REQUIRE(q);
            REQUIRE(q->features().count(cat().index("IMPLICIT_CAST")) == 0);
            sql::Select s = q->base;
            s.where = q->predicate;
            const auto sql = sql::render(s, cat());
            const auto r = db.query(sql);
            ++executed;
            if (!r.status.ok()) {
                ++failed;
                CAPTURE(sql);
                CAPTURE(r.status.message);
                REQUIRE(allowed(r.status.message));
            }
        }
    }
    MESSAGE("runtime value errors: " << failed << " of " << executed);
    CHECK(failed * 20 < executed);
}
