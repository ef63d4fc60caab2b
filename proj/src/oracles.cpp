#include "adaquery/oracles.hpp"

#include <algorithm>

#include "adaquery/error.hpp"

namespace adaquery {

std::string_view to_string(OracleKind k) { return k == OracleKind::TLP ? "TLP" : "NoREC"; }

OracleKind parse_oracle_kind(std::string_view s) {
    std::string u(s);
    for (auto& c : u) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    if (u == "TLP") return OracleKind::TLP;
    if (u == "NOREC") return OracleKind::NoREC;
    throw Error("unknown oracle: " + std::string(s));
}

std::string_view to_string(OracleVerdict::Status s) {
    switch (s) {
        case OracleVerdict::Status::Pass: return "Pass";
        case OracleVerdict::Status::Fail: return "Fail";
        case OracleVerdict::Status::Skip: return "Skip";
    }
    return "?";
}

namespace {

PlannedQuery with_where(const sql::Select& base, std::optional<sql::Expr> p, const sql::FeatureSet& base_features,
                        const FeatureCatalog& cat) {
    sql::Select q = base;
    PlannedQuery out{"", base_features};
    if (p) {
        sql::collect_where_features(*p, cat, out.features);
        q.where = std::move(p);
    }
    out.sql = sql::render(q, cat);
    return out;
}

sql::Expr wrap(const char* id, const sql::Expr& p, const FeatureCatalog& cat) {
    return sql::Expr::call(cat.index(id), {p});
}

// Runs a query, converting Fatal into an exception. The first error makes
// the verdict Skip.
QueryResult run(Adapter& adapter, const std::string& sql, OracleVerdict& v, bool& errored) {
    QueryResult r = adapter.query(sql);
    if (r.status.fatal()) throw FatalAdapterError(r.status.message);
    v.statuses.push_back(r.status);
    if (!r.status.ok() && !errored) {
        errored = true;
        v.status = OracleVerdict::Status::Skip;
        v.reason = r.status.message;
    }
    return r;
}

bool counts_as_true(const Value& v) {
    switch (v.tag()) {
        case Value::Tag::Bool: return v.as_bool();
        case Value::Tag::Int: return v.as_int() != 0;
        case Value::Tag::Real: return v.as_real() != 0.0;
        default: return false;
    }
}

}  // namespace

std::vector<PlannedQuery> tlp_queries(const sql::Select& base, const sql::Expr& predicate, const FeatureCatalog& cat) {
    sql::FeatureSet base_features;
    sql::collect_features(base, cat, base_features);
    return {
        with_where(base, std::nullopt, base_features, cat),
        with_where(base, predicate, base_features, cat),
        with_where(base, wrap("NOT", predicate, cat), base_features, cat),
        with_where(base, wrap("IS_NULL", predicate, cat), base_features, cat),
    };
}

std::vector<PlannedQuery> norec_queries(const sql::FromItem& from, const sql::Expr& predicate,
                                        const FeatureCatalog& cat) {
    sql::Select opt;
    opt.star = true;
    opt.from = from;
    sql::FeatureSet opt_base;
    sql::collect_features(opt, cat, opt_base);
    PlannedQuery optimized = with_where(opt, predicate, opt_base, cat);

    sql::Select unopt;
    unopt.from = from;
    unopt.items.push_back({wrap("IS_TRUE", predicate, cat), ""});
    PlannedQuery unoptimized{sql::render(unopt, cat), {}};
    sql::collect_features(unopt, cat, unoptimized.features);
    return {optimized, unoptimized};
}

OracleVerdict tlp_check(const sql::Select& base, const sql::Expr& predicate, Adapter& adapter,
                        const FeatureCatalog& cat) {
    const auto queries = tlp_queries(base, predicate, cat);
    OracleVerdict v;
    v.oracle = OracleKind::TLP;
    v.original_query = queries[0].sql;
    for (std::size_t i = 1; i < queries.size(); ++i) v.derived_queries.push_back(queries[i].sql);

    // Every query runs even after an error so each one feeds back its status.
    bool errored = false;
    QueryResult q0 = run(adapter, queries[0].sql, v, errored);
    v.original_result = std::move(q0.rows);
    v.derived_result.columns = v.original_result.columns;
    for (std::size_t i = 1; i < queries.size(); ++i) {
        QueryResult qi = run(adapter, queries[i].sql, v, errored);
        if (errored) continue;
        v.derived_result.columns = qi.rows.columns;
        for (auto& row : qi.rows.rows) v.derived_result.rows.push_back(std::move(row));
    }
    if (errored) return v;
    const bool same = compare_multisets(v.original_result, v.derived_result, adapter.normalization());
    v.status = same ? OracleVerdict::Status::Pass : OracleVerdict::Status::Fail;
    if (!same) v.reason = "partition union differs from the original result";
    return v;
}

OracleVerdict norec_check(const sql::FromItem& from, const sql::Expr& predicate, Adapter& adapter,
                          const FeatureCatalog& cat) {
    const auto queries = norec_queries(from, predicate, cat);
    OracleVerdict v;
    v.oracle = OracleKind::NoREC;
    v.original_query = queries[0].sql;
    v.derived_queries.push_back(queries[1].sql);

    bool errored = false;
    QueryResult opt = run(adapter, queries[0].sql, v, errored);
    QueryResult unopt = run(adapter, queries[1].sql, v, errored);
    if (errored) return v;

    const auto optimized = static_cast<std::int64_t>(opt.rows.rows.size());
    std::int64_t unoptimized = 0;
    for (const auto& row : unopt.rows.rows)
        if (!row.empty() && counts_as_true(row[0])) ++unoptimized;
    v.original_result = ResultSet{1, {Row{Value::integer(optimized)}}};
    v.derived_result = ResultSet{1, {Row{Value::integer(unoptimized)}}};
    const bool same = optimized == unoptimized;
    v.status = same ? OracleVerdict::Status::Pass : OracleVerdict::Status::Fail;
    if (!same) v.reason = "optimized and unoptimized counts differ";
    return v;
}

std::string normalized_cell(const Value& v, Normalization n) {
    switch (v.tag()) {
        case Value::Tag::Null: return "N";
        case Value::Tag::Bool: return v.as_bool() ? "B1" : "B0";
        case Value::Tag::Int:
            return (n == Normalization::Static ? "I" : "V") + v.canonical();
        case Value::Tag::Real:
            return (n == Normalization::Static ? "R" : "V") + v.canonical();
        case Value::Tag::Text:
            return (n == Normalization::Static ? "T" : "V") + v.as_text();
    }
    return "?";
}

bool compare_multisets(const ResultSet& a, const ResultSet& b, Normalization n) {
    if (a.rows.size() != b.rows.size()) return false;
    if (a.columns != b.columns) return false;
    auto keys = [n](const ResultSet& r) {
        std::vector<std::vector<std::string>> out;
        out.reserve(r.rows.size());
        for (const auto& row : r.rows) {
            std::vector<std::string> k;
            k.reserve(row.size());
            for (const auto& cell : row) k.push_back(normalized_cell(cell, n));
            out.push_back(std::move(k));
        }
        std::sort(out.begin(), out.end());
        return out;
    };
    return keys(a) == keys(b);
}

}  // namespace adaquery
