#include <algorithm>
#include <cmath>
#include <mutex>
#include <unordered_map>

#include "adaquery/mock.hpp"
#include "adaquery/parser.hpp"
#include "adaquery/rng.hpp"
#include "mock_engine.hpp"

namespace adaquery {

namespace {

struct ScopeEntry {
    std::string name;
    const std::vector<ColumnDef>* columns;
};

struct Scope {
    std::vector<ScopeEntry> entries;
    const Scope* parent = nullptr;
};

void collect_scope(const sql::FromItem& item, const MockDatabase& db, Scope& scope) {
    if (item.is_join) {
        for (const auto& c : item.children) collect_scope(c, db, scope);
        return;
    }
    const MockTable* t = db.find(item.table);
    if (!t) throw mock::EvalError("no such table: " + item.table);
    scope.entries.push_back({t->def.name, &t->def.columns});
}

void resolve_expr(sql::Expr& e, const Scope& scope, const MockDatabase& db, const FeatureCatalog& cat);

void resolve_in(sql::Select& s, const Scope* parent, const MockDatabase& db, const FeatureCatalog& cat) {
    Scope scope;
    scope.parent = parent;
    if (s.from) collect_scope(*s.from, db, scope);
    auto visit_from = [&](auto& self, sql::FromItem& item) -> void {
        for (auto& c : item.children) self(self, c);
        if (item.on) resolve_expr(*item.on, scope, db, cat);
    };
    if (s.from) visit_from(visit_from, *s.from);
    for (auto& item : s.items) resolve_expr(item.expr, scope, db, cat);
    if (s.where) resolve_expr(*s.where, scope, db, cat);
}

void resolve_expr(sql::Expr& e, const Scope& scope, const MockDatabase& db, const FeatureCatalog& cat) {
    switch (e.kind) {
        case sql::Expr::Kind::Constant: return;
        case sql::Expr::Kind::Exists: {
            auto copy = std::make_shared<sql::Select>(*e.subquery);
            resolve_in(*copy, &scope, db, cat);
            e.subquery = std::move(copy);
            return;
        }
        case sql::Expr::Kind::Call:
            for (auto& a : e.args) resolve_expr(a, scope, db, cat);
            return;
        case sql::Expr::Kind::Column: break;
    }
    for (const Scope* s = &scope; s; s = s->parent) {
        const ColumnDef* hit = nullptr;
        for (const auto& entry : s->entries) {
            if (!e.table.empty() && entry.name != e.table) continue;
            for (const auto& c : *entry.columns) {
                if (c.name != e.column) continue;
                if (hit) throw mock::EvalError("ambiguous column name: " + e.column);
                hit = &c;
            }
        }
        if (hit) {
            e.dtype = hit->dtype;
            return;
        }
    }
    throw mock::EvalError("no such column: " + (e.table.empty() ? e.column : e.table + "." + e.column));
}

bool rows_collide(const Row& a, const Row& b, const std::vector<std::size_t>& cols) {
    for (std::size_t c : cols) {
        auto cmp = mock::compare(a[c], b[c]);
        if (cmp != std::optional<int>(0)) return false;
    }
    return true;
}

bool violates_unique(const MockTable& t, const IndexDef& ix, const std::vector<Row>& rows) {
    std::vector<std::size_t> cols;
    for (const auto& name : ix.columns) {
        for (std::size_t i = 0; i < t.def.columns.size(); ++i)
            if (t.def.columns[i].name == name) cols.push_back(i);
    }
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = i + 1; j < rows.size(); ++j)
            if (rows_collide(rows[i], rows[j], cols)) return true;
    return false;
}

MockDialectSpec cached_spec(const std::string& path, const FeatureCatalog& cat) {
    static std::mutex mu;
    static std::unordered_map<std::string, MockDialectSpec> cache;
    std::lock_guard lock(mu);
    auto it = cache.find(path);
    if (it != cache.end()) return it->second;
    MockDialectSpec spec = MockDialectSpec::load(path);
    spec.validate(cat);
    return cache.emplace(path, std::move(spec)).first->second;
}

// Parses, resolves and checks features and flakiness; sets `error` on failure.
std::optional<sql::Statement> prepare(const std::string& text, const MockDatabase& db, const MockDialectSpec& spec,
                                      const FeatureCatalog& cat, ExecutionStatus& error) {
    sql::Statement st;
    try {
        st = sql::parse_statement(text, cat);
    } catch (const ParseError& e) {
        error = ExecutionStatus::error(std::string("syntax error: ") + e.what());
        return std::nullopt;
    }
    try {
        resolve_statement(st, db, cat);
    } catch (const mock::EvalError& e) {
        error = ExecutionStatus::error(e.what());
        return std::nullopt;
    }
    const sql::FeatureSet features = sql::collect_features(st, cat);
    for (const auto& id : sql::feature_ids(features, cat)) {
        if (!spec.supports(cat.index(id), cat)) {
            error = ExecutionStatus::error("unsupported: " + id);
            return std::nullopt;
        }
    }
    for (const auto& id : sql::feature_ids(features, cat)) {
        auto it = spec.flaky.find(id);
        if (it == spec.flaky.end()) continue;
        const std::uint64_t h = fnv1a(text + "\x1f" + id);
        const double u = static_cast<double>(h >> 11) * 0x1.0p-53;
        if (u >= it->second) {
            error = ExecutionStatus::error("flaky: " + id);
            return std::nullopt;
        }
    }
    return st;
}

}  // namespace

void resolve_select(sql::Select& s, const MockDatabase& db, const FeatureCatalog& cat) {
    resolve_in(s, nullptr, db, cat);
}

void resolve_statement(sql::Statement& st, const MockDatabase& db, const FeatureCatalog& cat) {
    if (auto* s = std::get_if<sql::Select>(&st)) {
        resolve_select(*s, db, cat);
    } else if (auto* v = std::get_if<sql::CreateView>(&st)) {
        resolve_select(v->select, db, cat);
    } else if (auto* ins = std::get_if<sql::Insert>(&st)) {
        const MockTable* t = db.find(ins->table);
        if (!t) throw mock::EvalError("no such table: " + ins->table);
        ins->column_types.clear();
        for (const auto& name : ins->columns) {
            const ColumnDef* c = t->def.column(name);
            if (!c) throw mock::EvalError("table " + ins->table + " has no column named " + name);
            ins->column_types.push_back(c->dtype);
        }
        Scope empty;
        for (auto& row : ins->rows)
            for (auto& e : row) resolve_expr(e, empty, db, cat);
    }
}

MockAdapter::MockAdapter(MockDialectSpec spec, const FeatureCatalog& cat) : cat_(&cat), spec_(std::move(spec)) {
    spec_.validate(cat);
}

void MockAdapter::open(const std::string& config) {
    if (!config.empty()) spec_ = cached_spec(config, *cat_);
    db_ = MockDatabase{};
    open_ = true;
}

void MockAdapter::close() {
    db_ = MockDatabase{};
    open_ = false;
}

Normalization MockAdapter::normalization() const {
    return spec_.typing == MockTyping::Static ? Normalization::Static : Normalization::Dynamic;
}

ExecutionStatus MockAdapter::execute(const std::string& sql) { return run(sql, false).status; }

QueryResult MockAdapter::query(const std::string& sql) { return run(sql, true); }

QueryResult MockAdapter::reference_query(const std::string& sql) const {
    if (killed_ || !open_) return {ExecutionStatus::fatal("mock server is not running"), {}};
    ExecutionStatus error;
    auto st = prepare(sql, db_, spec_, *cat_, error);
    if (!st) return {error, {}};
    const auto* q = std::get_if<sql::Select>(&*st);
    if (!q) return {ExecutionStatus::error("not a query"), {}};
    return mock_reference_eval(*q, db_, spec_, *cat_);
}

QueryResult MockAdapter::run(const std::string& sql, bool want_rows) {
    if (killed_ || !open_) return {ExecutionStatus::fatal("mock server is not running"), {}};
    ExecutionStatus error;
    auto prepared = prepare(sql, db_, spec_, *cat_, error);
    if (!prepared) return {error, {}};
    sql::Statement& st = *prepared;
    if (want_rows && !std::holds_alternative<sql::Select>(st)) return {ExecutionStatus::error("not a query"), {}};
    try {
        mock::Engine engine(db_, *cat_, spec_.bugs);
        if (auto* q = std::get_if<sql::Select>(&st)) {
            ResultSet rows = engine.select(*q);
            return {ExecutionStatus::success(), want_rows ? std::move(rows) : ResultSet{}};
        }
        if (auto* ct = std::get_if<sql::CreateTable>(&st)) {
            if (db_.has_object(ct->name)) return {ExecutionStatus::error("object " + ct->name + " already exists"), {}};
            MockTable t;
            t.def.name = ct->name;
            for (const auto& c : ct->columns) {
                if (t.def.column(c.name)) return {ExecutionStatus::error("duplicate column name: " + c.name), {}};
                t.def.columns.push_back({c.name, c.type});
            }
            db_.tables.push_back(std::move(t));
        } else if (auto* cv = std::get_if<sql::CreateView>(&st)) {
            if (db_.has_object(cv->name)) return {ExecutionStatus::error("object " + cv->name + " already exists"), {}};
            MockTable t;
            t.def.name = cv->name;
            t.def.kind = TableKind::View;
            if (cv->select.star) {
                Scope scope;
                if (cv->select.from) collect_scope(*cv->select.from, db_, scope);
                for (const auto& e : scope.entries)
                    for (const auto& c : *e.columns) t.def.columns.push_back(c);
            } else {
                for (std::size_t i = 0; i < cv->select.items.size(); ++i) {
                    const auto& item = cv->select.items[i];
                    std::string name = item.alias;
                    if (name.empty())
                        name = item.expr.kind == sql::Expr::Kind::Column ? item.expr.column : "c" + std::to_string(i);
                    DataType type = sql::infer_type(item.expr, *cat_);
                    if (type == DataType::Untyped) type = DataType::Integer;
                    t.def.columns.push_back({name, type});
                }
            }
            for (std::size_t i = 0; i < t.def.columns.size(); ++i)
                for (std::size_t j = 0; j < i; ++j)
                    if (t.def.columns[i].name == t.def.columns[j].name)
                        return {ExecutionStatus::error("duplicate column name: " + t.def.columns[i].name), {}};
            // Evaluate once so views over failing expressions are rejected up front.
            engine.select(cv->select, nullptr, false);
            t.view = cv->select;
            db_.tables.push_back(std::move(t));
        } else if (auto* ci = std::get_if<sql::CreateIndex>(&st)) {
            if (db_.has_object(ci->name)) return {ExecutionStatus::error("object " + ci->name + " already exists"), {}};
            MockTable* t = db_.find(ci->table);
            if (!t) return {ExecutionStatus::error("no such table: " + ci->table), {}};
            if (t->view) return {ExecutionStatus::error("views may not be indexed"), {}};
            for (const auto& c : ci->columns)
                if (!t->def.column(c)) return {ExecutionStatus::error("no such column: " + c), {}};
            IndexDef ix{ci->name, ci->table, ci->columns, ci->unique};
            if (ix.unique && violates_unique(*t, ix, t->rows))
                return {ExecutionStatus::error("UNIQUE constraint failed: " + ci->table), {}};
            db_.indexes.push_back(std::move(ix));
        } else if (auto* ins = std::get_if<sql::Insert>(&st)) {
            MockTable* t = db_.find(ins->table);
            if (t->view) return {ExecutionStatus::error("cannot modify " + ins->table + " because it is a view"), {}};
            std::vector<Row> rows = t->rows;
            for (const auto& values : ins->rows) {
                if (values.size() != ins->columns.size())
                    return {ExecutionStatus::error("values do not match the column list"), {}};
                Row row(t->def.columns.size(), Value::null());
                mock::Env env;
                for (std::size_t i = 0; i < values.size(); ++i) {
                    for (std::size_t c = 0; c < t->def.columns.size(); ++c)
                        if (t->def.columns[c].name == ins->columns[i]) row[c] = engine.eval(values[i], env);
                }
                rows.push_back(std::move(row));
            }
            for (const auto& ix : db_.indexes)
                if (ix.unique && ix.table == t->def.name && violates_unique(*t, ix, rows))
                    return {ExecutionStatus::error("UNIQUE constraint failed: " + ix.table), {}};
            t->rows = std::move(rows);
        }
        return {ExecutionStatus::success(), {}};
    } catch (const mock::EvalError& e) {
        return {ExecutionStatus::error(e.what()), {}};
    }
}

}  // namespace adaquery
