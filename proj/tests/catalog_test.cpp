#include <regex>
#include <set>

#include "adaquery/error.hpp"
#include "adaquery/feature_catalog.hpp"
#include "doctest.h"

using namespace adaquery;

TEST_CASE("default catalog shape") {
    const auto& cat = FeatureCatalog::builtin();
    CHECK(cat.base_size() == 100);
    CHECK(cat.of_category(FeatureCategory::Statement).size() == 6);
    CHECK(cat.of_category(FeatureCategory::ClauseKeyword).size() == 10);
    CHECK(cat.of_category(FeatureCategory::Function).size() >= 20);
    CHECK(cat.of_category(FeatureCategory::Operator).size() >= 20);
    CHECK(cat.joins().size() == 6);
    CHECK(cat.find("IMPLICIT_CAST").has_value());
}

TEST_CASE("feature ids are unique and well formed") {
    const auto& cat = FeatureCatalog::builtin();
    const std::regex re("[A-Z0-9_<>=!+~*/%-]+");
    std::set<std::string> seen;
    for (const auto& d : cat.all()) {
        CAPTURE(d.id);
        CHECK(std::regex_match(d.id, re));
        CHECK(seen.insert(d.id).second);
        CHECK(cat.index(d.id) == cat.find(d.id).value());
    }
}

TEST_CASE("composite features follow FUNC argIndex TYPE") {
    const auto& cat = FeatureCatalog::builtin();
    const auto sin = cat.index("SIN");
    CHECK(cat.id(cat.composite(sin, 0, DataType::Integer)) == "SIN1INT");
    CHECK(cat.id(cat.composite(sin, 0, DataType::Text)) == "SIN1STRING");
    CHECK(cat.id(cat.composite(sin, 0, DataType::Boolean)) == "SIN1BOOLEAN");
    const auto sub = cat.index("SUBSTR");
    CHECK(cat.id(cat.composite(sub, 2, DataType::Integer)) == "SUBSTR3INT");
    const auto& def = cat.at(cat.index("SUBSTR3INT"));
    CHECK(def.category == FeatureCategory::CompositeArgType);
    CHECK(def.parent == sub);
    CHECK(def.arg_index == 2);
    CHECK_THROWS_AS(cat.composite(sin, 1, DataType::Integer), CatalogError);
    CHECK_THROWS_AS(cat.composite(cat.index("="), 0, DataType::Integer), CatalogError);
    CHECK_THROWS_AS(cat.composite(sin, 0, DataType::Untyped), CatalogError);
}

TEST_CASE("ddl rule membership") {
    const auto& cat = FeatureCatalog::builtin();
    for (const char* id : {"TABLE", "INDEX", "VIEW", "INSERT", "ANALYZE", "INTEGER", "TEXT", "BOOLEAN", "UNIQUE"})
        CHECK(cat.uses_ddl_rule(cat.index(id)));
    for (const char* id : {"SELECT", "WHERE", "SIN", "=", "SIN1INT", "IMPLICIT_CAST", "LEFT_JOIN"})
        CHECK_FALSE(cat.uses_ddl_rule(cat.index(id)));
}

TEST_CASE("signatures") {
    const auto& cat = FeatureCatalog::builtin();
    const auto& nullif = cat.at(cat.index("NULLIF"));
    REQUIRE(nullif.signature);
    CHECK(nullif.signature->params == std::vector<ParamType>{ParamType::Generic, ParamType::Generic});
    CHECK(nullif.signature->result == ParamType::Generic);
    const auto& is_null = cat.at(cat.index("IS_NULL"));
    CHECK(is_null.signature->params == std::vector<ParamType>{ParamType::Any});
    CHECK(is_null.signature->result == ParamType::Boolean);
    CHECK(cat.at(cat.index("INNER_JOIN")).is_join);
    CHECK(cat.at(cat.index("INNER_JOIN")).signature.has_value());
    CHECK_FALSE(cat.at(cat.index("CROSS_JOIN")).signature.has_value());
}

TEST_CASE("catalog parse errors carry line numbers") {
    auto line_of = [](const char* text) -> std::size_t {
        try {
            FeatureCatalog::parse(text);
        } catch (const ParseError& e) {
            return e.line();
        }
        return 0;
    };
    CHECK(line_of("# c\nStatement\tSELECT\tSELECT {items} FROM {from}\nStatement\tSELECT\tx\n") == 3);
    CHECK(line_of("Bogus\tX\tx\n") == 1);
    CHECK(line_of("Function\tlower\tlower({0:STRING}) -> STRING\n") == 1);
    CHECK(line_of("Statement\tSELECT\n") == 1);
    CHECK(line_of("CompositeArgType\tSIN1INT\t-\n") == 1);
    CHECK_THROWS_AS(FeatureCatalog::builtin().index("NOPE"), CatalogError);
}

TEST_CASE("custom catalog") {
    const auto cat = FeatureCatalog::parse(
        "Statement\tSELECT\tSELECT {items} FROM {from}\n"
        "ClauseKeyword\tWHERE\tWHERE {0:BOOLEAN}\n"
        "Function\tF\tF({0:INT}, {1:STRING}) -> INT\n");
    CHECK(cat.base_size() == 3);
    CHECK(cat.size() == 3 + 6);
    CHECK(cat.find("F2STRING").has_value());
    CHECK(cat.expression_features().size() == 1);
}
