#pragma once

// Internal: relational evaluation shared by the mock adapter.

#include <deque>

#include "adaquery/mock.hpp"

namespace adaquery::mock {

struct Source {
    std::string name;
    std::vector<ColumnDef> columns;
};

// Column scope of one row during evaluation; parent links EXISTS subqueries
// to the enclosing query.
struct Env {
    const std::vector<Source>* sources = nullptr;
    const std::vector<const Row*>* row = nullptr;
    const Env* parent = nullptr;
};

// Looks a column up in env (innermost scope first). Throws EvalError.
Value lookup(const sql::Expr& col, const Env& env);

// Bug effects active while evaluating one predicate.
struct ActiveBugs {
    std::set<FeatureIndex> first_arg;
    const sql::Expr* root = nullptr;
    bool null_as_true = false;
    bool invert = false;

    bool any() const { return !first_arg.empty() || null_as_true || invert; }
};

ActiveBugs triggered_bugs(const sql::Expr& predicate, const std::vector<BugInjection>& bugs,
                          const FeatureCatalog& cat);

class Engine {
public:
    Engine(const MockDatabase& db, const FeatureCatalog& cat, const std::vector<BugInjection>& bugs)
        : db_(db), cat_(cat), bugs_(bugs) {}

    // Throws EvalError on runtime failures.
    ResultSet select(const sql::Select& q, const Env* parent = nullptr, bool outermost = true);
    Value eval(const sql::Expr& e, const Env& env, const ActiveBugs* bugs = nullptr);

private:
    struct Relation {
        std::vector<Source> sources;
        std::vector<std::vector<const Row*>> rows;
    };

    const MockDatabase& db_;
    const FeatureCatalog& cat_;
    const std::vector<BugInjection>& bugs_;
    std::deque<std::vector<Row>> storage_;

    Relation from(const sql::FromItem& item, const Env* parent);
};

}  // namespace adaquery::mock
