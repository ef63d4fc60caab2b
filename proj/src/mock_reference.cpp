#include <algorithm>

#include "adaquery/mock.hpp"

namespace adaquery {

namespace {

// Flat relation: qualified column names and fully materialized rows.
struct Table {
    std::vector<std::pair<std::string, std::string>> names;
    std::vector<Row> rows;
};

struct Scope {
    const Table* table;
    const Row* row;
};

class Reference {
public:
    Reference(const MockDatabase& db, const FeatureCatalog& cat) : db_(db), cat_(cat) {}

    Table run(const sql::Select& q, std::vector<Scope>& outer) {
        Table input = q.from ? relation(*q.from, outer) : Table{{}, {Row{}}};
        Table out;
        if (q.star) {
            out.names = input.names;
        } else {
            for (const auto& item : q.items) out.names.emplace_back("", item.alias);
        }
        for (const auto& row : input.rows) {
            outer.push_back({&input, &row});
            bool keep = true;
            if (q.where) keep = mock::truth(value(*q.where, outer)) == std::optional<bool>(true);
            if (keep) {
                if (q.star) {
                    out.rows.push_back(row);
                } else {
                    Row r;
                    for (const auto& item : q.items) r.push_back(value(item.expr, outer));
                    out.rows.push_back(std::move(r));
                }
            }
            outer.pop_back();
        }
        if (q.distinct) {
            std::vector<Row> seen;
            for (const auto& r : out.rows)
                if (std::count(seen.begin(), seen.end(), r) == 0) seen.push_back(r);
            out.rows = std::move(seen);
        }
        return out;
    }

private:
    const MockDatabase& db_;
    const FeatureCatalog& cat_;

    Table relation(const sql::FromItem& item, std::vector<Scope>& outer) {
        if (!item.is_join) {
            const MockTable* t = db_.find(item.table);
            if (!t) throw mock::EvalError("no such table: " + item.table);
            Table out;
            for (const auto& c : t->def.columns) out.names.emplace_back(t->def.name, c.name);
            if (t->view) {
                std::vector<Scope> none;
                out.rows = run(*t->view, none).rows;
            } else {
                out.rows = t->rows;
            }
            return out;
        }
        const Table left = relation(item.children[0], outer);
        const Table right = relation(item.children[1], outer);
        Table out;
        out.names = left.names;
        out.names.insert(out.names.end(), right.names.begin(), right.names.end());
        const std::string kind = cat_.id(item.join);
        const Row left_nulls(left.names.size(), Value::null());
        const Row right_nulls(right.names.size(), Value::null());

        auto joined = [](const Row& a, const Row& b) {
            Row r = a;
            r.insert(r.end(), b.begin(), b.end());
            return r;
        };
        auto matches = [&](const Row& r) {
            if (item.on) {
                outer.push_back({&out, &r});
                const bool ok = mock::truth(value(*item.on, outer)) == std::optional<bool>(true);
                outer.pop_back();
                return ok;
            }
            if (kind != "NATURAL_JOIN") return true;
            for (std::size_t j = 0; j < right.names.size(); ++j) {
                for (std::size_t i = 0; i < left.names.size(); ++i) {
                    if (left.names[i].second != right.names[j].second) continue;
                    auto c = mock::compare(r[i], r[left.names.size() + j]);
                    if (c != std::optional<int>(0)) return false;
                    break;
                }
            }
            return true;
        };

        std::vector<char> right_used(right.rows.size(), 0);
        for (const auto& l : left.rows) {
            bool any = false;
            for (std::size_t j = 0; j < right.rows.size(); ++j) {
                Row r = joined(l, right.rows[j]);
                if (!matches(r)) continue;
                any = true;
                right_used[j] = 1;
                out.rows.push_back(std::move(r));
            }
            if (!any && (kind == "LEFT_JOIN" || kind == "FULL_JOIN")) out.rows.push_back(joined(l, right_nulls));
        }
        if (kind == "RIGHT_JOIN" || kind == "FULL_JOIN") {
            for (std::size_t j = 0; j < right.rows.size(); ++j)
                if (!right_used[j]) out.rows.push_back(joined(left_nulls, right.rows[j]));
        }
        return out;
    }

    Value column(const sql::Expr& e, const std::vector<Scope>& scopes) {
        for (auto it = scopes.rbegin(); it != scopes.rend(); ++it) {
            std::optional<std::size_t> hit;
            for (std::size_t i = 0; i < it->table->names.size(); ++i) {
                const auto& [t, c] = it->table->names[i];
                if (c != e.column || (!e.table.empty() && t != e.table)) continue;
                if (hit) throw mock::EvalError("ambiguous column name: " + e.column);
                hit = i;
            }
            if (hit) return (*it->row)[*hit];
        }
        throw mock::EvalError("no such column: " + e.column);
    }

    Value value(const sql::Expr& e, std::vector<Scope>& scopes) {
        using K = sql::Expr::Kind;
        if (e.kind == K::Constant) return e.value;
        if (e.kind == K::Column) return column(e, scopes);
        if (e.kind == K::Exists) return Value::boolean(!run(*e.subquery, scopes).rows.empty());
        std::vector<Value> args;
        for (const auto& a : e.args) args.push_back(value(a, scopes));
        return mock::apply(cat_.id(e.feature), args);
    }
};

}  // namespace

QueryResult mock_reference_eval(const sql::Select& q, const MockDatabase& db, const MockDialectSpec& spec,
                                const FeatureCatalog& cat) {
    for (FeatureIndex f : sql::collect_features(q, cat)) {
        if (!spec.supports(f, cat)) return {ExecutionStatus::error("unsupported: " + cat.id(f)), {}};
    }
    try {
        Reference ref(db, cat);
        std::vector<Scope> scopes;
        Table t = ref.run(q, scopes);
        return {ExecutionStatus::success(), ResultSet{t.names.size(), std::move(t.rows)}};
    } catch (const mock::EvalError& e) {
        return {ExecutionStatus::error(e.what()), {}};
    }
}

}  // namespace adaquery
