#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "adaquery/adapter.hpp"
#include "adaquery/ast.hpp"
#include "adaquery/error.hpp"
#include "adaquery/schema_model.hpp"

namespace adaquery {

enum class BugEffect {
    FirstArg,    // trigger functions return their first argument unchanged
    NullAsTrue,  // the root operator yields TRUE where it would yield NULL
    Invert,      // the root operator swaps TRUE and FALSE
};

std::string_view to_string(BugEffect e);

// A logic bug of the mock engine. It fires in the outermost WHERE of a query
// whose predicate root is the last trigger feature and which contains every
// other trigger feature somewhere below it.
struct BugInjection {
    std::vector<std::string> trigger;
    BugEffect effect = BugEffect::FirstArg;

    bool operator==(const BugInjection&) const = default;
};

enum class MockTyping { Static, Dynamic };

// Spec file grammar (one item per line, `#` comments):
//   [supported]   feature ids, or `@all` for every implemented feature
//   [typing]      static | dynamic
//   [bugs]        ID,ID,...,ROOT <space> first_arg|null_as_true|invert
//   [flaky]       ID <space> success-probability
// Composite features follow their function; IMPLICIT_CAST follows [typing].
struct MockDialectSpec {
    bool all_supported = false;
    std::set<std::string> supported;
    MockTyping typing = MockTyping::Static;
    std::vector<BugInjection> bugs;
    std::map<std::string, double> flaky;

    static MockDialectSpec parse(std::string_view text);
    static MockDialectSpec load(const std::filesystem::path& path);
    std::string serialize() const;

    // Throws CatalogError on unknown ids or bugs on unsupported features.
    void validate(const FeatureCatalog& cat) const;
    bool supports(FeatureIndex f, const FeatureCatalog& cat) const;
};

struct MockTable {
    TableDef def;
    std::vector<Row> rows;
    std::optional<sql::Select> view;
};

struct MockDatabase {
    std::vector<MockTable> tables;
    std::vector<IndexDef> indexes;

    const MockTable* find(const std::string& name) const;
    MockTable* find(const std::string& name);
    bool has_object(const std::string& name) const;
    // Same canonical form as SchemaModel::describe.
    std::vector<std::string> describe() const;
};

namespace mock {

// Runtime failure inside the mock engine (overflow, oversized string...).
class EvalError : public Error {
public:
    using Error::Error;
};

// Scalar semantics shared by the engine and the reference evaluator.
std::optional<std::int64_t> to_int(const Value& v);
std::optional<bool> truth(const Value& v);
std::optional<std::string> to_text(const Value& v);
// <0, 0, >0, or nullopt when either side is NULL.
std::optional<int> compare(const Value& a, const Value& b);
bool like(std::string_view s, std::string_view pattern);
bool implemented(std::string_view feature_id);
Value apply(std::string_view feature_id, std::span<const Value> args);

}  // namespace mock

// Evaluates a query under three-valued logic without injected bugs.
// Column types in `q` must be resolved. Unsupported features yield Error.
QueryResult mock_reference_eval(const sql::Select& q, const MockDatabase& db, const MockDialectSpec& spec,
                                const FeatureCatalog& cat = FeatureCatalog::builtin());

// The mock dialect interpreter behind `mock:<spec-path>`.
class MockAdapter : public Adapter {
public:
    MockAdapter() = default;
    explicit MockAdapter(MockDialectSpec spec, const FeatureCatalog& cat = FeatureCatalog::builtin());

    void open(const std::string& config) override;
    ExecutionStatus execute(const std::string& sql) override;
    QueryResult query(const std::string& sql) override;
    void close() override;
    Normalization normalization() const override;

    // Parses, resolves and feature-checks `sql`, then evaluates it with the
    // reference evaluator instead of the engine.
    QueryResult reference_query(const std::string& sql) const;

    // Simulates losing the server process: every later call is Fatal.
    void kill() { killed_ = true; }

    const MockDatabase& database() const { return db_; }
    const MockDialectSpec& spec() const { return spec_; }

private:
    const FeatureCatalog* cat_ = &FeatureCatalog::builtin();
    MockDialectSpec spec_;
    MockDatabase db_;
    bool open_ = false;
    bool killed_ = false;

    QueryResult run(const std::string& sql, bool want_rows);
};

// Resolves column types of a parsed statement against the mock catalog.
// Throws mock::EvalError for unknown tables/columns.
void resolve_statement(sql::Statement& st, const MockDatabase& db, const FeatureCatalog& cat);
void resolve_select(sql::Select& s, const MockDatabase& db, const FeatureCatalog& cat);

}  // namespace adaquery
