#pragma once

#include <string>
#include <vector>

#include "adaquery/adapter.hpp"
#include "adaquery/ast.hpp"

namespace adaquery {

enum class OracleKind { TLP, NoREC };

std::string_view to_string(OracleKind k);
OracleKind parse_oracle_kind(std::string_view s);

// A physical query of an oracle check and the features it exercises.
struct PlannedQuery {
    std::string sql;
    sql::FeatureSet features;
};

struct OracleVerdict {
    enum class Status { Pass, Fail, Skip };

    OracleKind oracle = OracleKind::TLP;
    std::string original_query;
    std::vector<std::string> derived_queries;
    ResultSet original_result;
    ResultSet derived_result;
    Status status = Status::Skip;
    std::string reason;
    // Statuses of all queries issued, original first.
    std::vector<ExecutionStatus> statuses;

    bool failed() const { return status == Status::Fail; }
};

std::string_view to_string(OracleVerdict::Status s);

// Q0 = base, then base WHERE p, WHERE NOT (p), WHERE (p) IS NULL.
std::vector<PlannedQuery> tlp_queries(const sql::Select& base, const sql::Expr& predicate, const FeatureCatalog& cat);
// SELECT * FROM f WHERE p, then SELECT (p) IS TRUE FROM f.
std::vector<PlannedQuery> norec_queries(const sql::FromItem& from, const sql::Expr& predicate,
                                        const FeatureCatalog& cat);

// Adapter Fatal statuses throw FatalAdapterError.
OracleVerdict tlp_check(const sql::Select& base, const sql::Expr& predicate, Adapter& adapter,
                        const FeatureCatalog& cat = FeatureCatalog::builtin());
OracleVerdict norec_check(const sql::FromItem& from, const sql::Expr& predicate, Adapter& adapter,
                          const FeatureCatalog& cat = FeatureCatalog::builtin());

// Order-insensitive multiset equality after cell normalization. Different
// column counts compare unequal.
bool compare_multisets(const ResultSet& a, const ResultSet& b, Normalization n);
// Normalized cell key: equal keys iff cells compare equal under `n`.
std::string normalized_cell(const Value& v, Normalization n);

}  // namespace adaquery
