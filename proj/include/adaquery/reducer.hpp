#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "adaquery/adapter.hpp"
#include "adaquery/ast.hpp"
#include "adaquery/oracles.hpp"

namespace adaquery {

// A replayable bug-inducing test case: setup statements and one oracle check.
// NoREC uses only base.from.
struct TestCase {
    std::vector<std::string> setup;
    OracleKind oracle = OracleKind::TLP;
    sql::Select base;
    sql::Expr predicate;

    std::vector<PlannedQuery> queries(const FeatureCatalog& cat) const;
    // Features recorded when generating the check: base query and WHERE predicate.
    sql::FeatureSet check_features(const FeatureCatalog& cat) const;

    bool operator==(const TestCase&) const = default;
};

// Runs the check of `tc` after its setup on an already opened adapter.
OracleVerdict run_check(const TestCase& tc, Adapter& adapter, const FeatureCatalog& cat);
// Fresh instance of `target` (suffix "replay"), setup, post_setup, check.
OracleVerdict replay(const TestCase& tc, const TargetSpec& target, const FeatureCatalog& cat);

// True iff the candidate still fails.
using FailurePredicate = std::function<bool(const TestCase&)>;

struct ReduceResult {
    TestCase test_case;
    bool deterministic = true;
    std::size_t replays = 0;
};

// ddmin over setup statements, greedy subtree hoisting over the check, then
// ddmin again. Gives up (returning the original) unless two initial replays fail.
ReduceResult reduce(const TestCase& tc, const FailurePredicate& fails, const FeatureCatalog& cat,
                    std::size_t max_replays = 1000);

// Standalone statement-level ddmin; `fails` sees candidate subsequences.
std::vector<std::string> ddmin(const std::vector<std::string>& items,
                               const std::function<bool(const std::vector<std::string>&)>& fails,
                               std::size_t& budget);

}  // namespace adaquery
