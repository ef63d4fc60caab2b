#include "adaquery/ast.hpp"

#include <algorithm>

namespace adaquery::sql {

namespace {

void add_id(const FeatureCatalog& cat, std::string_view id, FeatureSet& out) {
    if (auto f = cat.find(id)) out.insert(*f);
}

DataType literal_type(const Value& v) {
    switch (v.tag()) {
        case Value::Tag::Int: return DataType::Integer;
        case Value::Tag::Text: return DataType::Text;
        case Value::Tag::Bool: return DataType::Boolean;
        default: return DataType::Untyped;
    }
}

}  // namespace

Expr Expr::constant(Value v) {
    Expr e;
    e.kind = Kind::Constant;
    e.dtype = literal_type(v);
    e.value = std::move(v);
    return e;
}

Expr Expr::column_ref(std::string table, std::string column, DataType type) {
    Expr e;
    e.kind = Kind::Column;
    e.table = std::move(table);
    e.column = std::move(column);
    e.dtype = type;
    return e;
}

Expr Expr::call(FeatureIndex feature, std::vector<Expr> args) {
    Expr e;
    e.kind = Kind::Call;
    e.feature = feature;
    e.args = std::move(args);
    return e;
}

Expr Expr::exists(Select sub) {
    Expr e;
    e.kind = Kind::Exists;
    e.dtype = DataType::Boolean;
    e.subquery = std::make_shared<Select>(std::move(sub));
    return e;
}

bool Expr::operator==(const Expr& o) const {
    if (kind != o.kind) return false;
    switch (kind) {
        case Kind::Constant: return value == o.value;
        case Kind::Column: return table == o.table && column == o.column && dtype == o.dtype;
        case Kind::Call: return feature == o.feature && args == o.args;
        case Kind::Exists: return *subquery == *o.subquery;
    }
    return false;
}

FromItem FromItem::leaf(std::string name) {
    FromItem f;
    f.table = std::move(name);
    return f;
}

FromItem FromItem::make_join(FeatureIndex join, FromItem left, FromItem right, std::optional<Expr> on) {
    FromItem f;
    f.is_join = true;
    f.join = join;
    f.children.push_back(std::move(left));
    f.children.push_back(std::move(right));
    f.on = std::move(on);
    return f;
}

std::vector<std::string> FromItem::tables() const {
    if (!is_join) return {table};
    auto out = children[0].tables();
    for (auto& t : children[1].tables()) out.push_back(std::move(t));
    return out;
}

StatementKind kind_of(const Statement& s) { return static_cast<StatementKind>(s.index()); }

std::string_view to_string(StatementKind k) {
    switch (k) {
        case StatementKind::CreateTable: return "CreateTable";
        case StatementKind::CreateIndex: return "CreateIndex";
        case StatementKind::CreateView: return "CreateView";
        case StatementKind::Insert: return "Insert";
        case StatementKind::Analyze: return "Analyze";
        case StatementKind::Select: return "Select";
    }
    return "?";
}

bool is_ddl(StatementKind k) {
    return k == StatementKind::CreateTable || k == StatementKind::CreateIndex || k == StatementKind::CreateView;
}

DataType infer_type(const Expr& e, const FeatureCatalog& cat) {
    switch (e.kind) {
        case Expr::Kind::Constant:
        case Expr::Kind::Column: return e.dtype;
        case Expr::Kind::Exists: return DataType::Boolean;
        case Expr::Kind::Call: break;
    }
    const auto& sig = *cat.at(e.feature).signature;
    if (sig.result != ParamType::Generic) return concrete_type(sig.result);
    for (std::size_t i = 0; i < e.args.size() && i < sig.params.size(); ++i) {
        if (sig.params[i] != ParamType::Generic) continue;
        DataType t = infer_type(e.args[i], cat);
        if (t != DataType::Untyped) return t;
    }
    return DataType::Untyped;
}

bool ill_typed_call(const Expr& e, const FeatureCatalog& cat) {
    if (e.kind != Expr::Kind::Call) return false;
    const auto& sig = *cat.at(e.feature).signature;
    DataType generic = DataType::Untyped;
    for (std::size_t i = 0; i < e.args.size() && i < sig.params.size(); ++i) {
        const DataType a = infer_type(e.args[i], cat);
        if (a == DataType::Untyped) continue;
        switch (sig.params[i]) {
            case ParamType::Any: break;
            case ParamType::Generic:
                if (generic != DataType::Untyped && generic != a) return true;
                generic = a;
                break;
            default:
                if (concrete_type(sig.params[i]) != a) return true;
        }
    }
    return false;
}

DataType composite_arg_type(const Expr& e, std::size_t arg, const FeatureCatalog& cat) {
    const DataType a = infer_type(e.args.at(arg), cat);
    if (a != DataType::Untyped) return a;
    const ParamType p = cat.at(e.feature).signature->params.at(arg);
    if (DataType c = concrete_type(p); c != DataType::Untyped) return c;
    if (p == ParamType::Generic) {
        if (DataType t = infer_type(e, cat); t != DataType::Untyped) return t;
    }
    return DataType::Integer;
}

bool ill_typed_slot(DataType actual, DataType expected) {
    return actual != DataType::Untyped && expected != DataType::Untyped && actual != expected;
}

void collect_features(const Expr& e, const FeatureCatalog& cat, FeatureSet& out) {
    switch (e.kind) {
        case Expr::Kind::Constant:
        case Expr::Kind::Column: return;
        case Expr::Kind::Exists:
            add_id(cat, "SUBQUERY", out);
            collect_features(*e.subquery, cat, out);
            return;
        case Expr::Kind::Call: break;
    }
    out.insert(e.feature);
    if (cat.at(e.feature).category == FeatureCategory::Function) {
        for (std::size_t i = 0; i < e.args.size(); ++i)
            out.insert(cat.composite(e.feature, static_cast<int>(i), composite_arg_type(e, i, cat)));
    }
    if (ill_typed_call(e, cat)) add_id(cat, "IMPLICIT_CAST", out);
    for (const auto& a : e.args) collect_features(a, cat, out);
}

void collect_features(const FromItem& f, const FeatureCatalog& cat, FeatureSet& out) {
    if (!f.is_join) return;
    out.insert(f.join);
    for (const auto& c : f.children) collect_features(c, cat, out);
    if (f.on) {
        collect_features(*f.on, cat, out);
        if (ill_typed_slot(infer_type(*f.on, cat), DataType::Boolean)) add_id(cat, "IMPLICIT_CAST", out);
    }
}

void collect_where_features(const Expr& predicate, const FeatureCatalog& cat, FeatureSet& out) {
    add_id(cat, "WHERE", out);
    collect_features(predicate, cat, out);
    if (ill_typed_slot(infer_type(predicate, cat), DataType::Boolean)) add_id(cat, "IMPLICIT_CAST", out);
}

void collect_features(const Select& s, const FeatureCatalog& cat, FeatureSet& out) {
    add_id(cat, "SELECT", out);
    if (s.distinct) add_id(cat, "DISTINCT", out);
    for (const auto& it : s.items) collect_features(it.expr, cat, out);
    if (s.from) collect_features(*s.from, cat, out);
    if (s.where) collect_where_features(*s.where, cat, out);
}

FeatureSet collect_features(const Statement& st, const FeatureCatalog& cat) {
    FeatureSet out;
    std::visit(
        [&](const auto& s) {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, CreateTable>) {
                add_id(cat, "TABLE", out);
                for (const auto& c : s.columns) add_id(cat, sql_type_name(c.type), out);
            } else if constexpr (std::is_same_v<T, CreateIndex>) {
                add_id(cat, "INDEX", out);
                if (s.unique) add_id(cat, "UNIQUE", out);
            } else if constexpr (std::is_same_v<T, CreateView>) {
                add_id(cat, "VIEW", out);
                collect_features(s.select, cat, out);
            } else if constexpr (std::is_same_v<T, Insert>) {
                add_id(cat, "INSERT", out);
                for (const auto& row : s.rows) {
                    for (std::size_t i = 0; i < row.size(); ++i) {
                        collect_features(row[i], cat, out);
                        if (i < s.column_types.size() &&
                            ill_typed_slot(infer_type(row[i], cat), s.column_types[i]))
                            add_id(cat, "IMPLICIT_CAST", out);
                    }
                }
            } else if constexpr (std::is_same_v<T, Analyze>) {
                add_id(cat, "ANALYZE", out);
            } else {
                collect_features(s, cat, out);
            }
        },
        st);
    return out;
}

std::vector<std::string> feature_ids(const FeatureSet& s, const FeatureCatalog& cat) {
    std::vector<std::string> ids;
    for (FeatureIndex f : s) ids.push_back(cat.id(f));
    std::sort(ids.begin(), ids.end());
    return ids;
}

}  // namespace adaquery::sql
