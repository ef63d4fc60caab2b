#include "adaquery/ast.hpp"

namespace adaquery::sql {

namespace {

std::string render_template(const FeatureDef& def, const std::vector<std::string>& operands,
                            const std::string& left = {}, const std::string& right = {}) {
    std::string out;
    for (const auto& p : def.pieces) {
        switch (p.kind) {
            case TemplatePiece::Kind::Text: out += p.text; break;
            case TemplatePiece::Kind::Operand: out += operands.at(static_cast<std::size_t>(p.operand)); break;
            case TemplatePiece::Kind::Left: out += left; break;
            case TemplatePiece::Kind::Right: out += right; break;
        }
    }
    return out;
}

std::string join_list(const std::vector<std::string>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ", ";
        out += v[i];
    }
    return out;
}

}  // namespace

std::string render(const Expr& e, const FeatureCatalog& cat) {
    switch (e.kind) {
        case Expr::Kind::Constant: return e.value.sql();
        case Expr::Kind::Column: return e.table.empty() ? e.column : e.table + "." + e.column;
        case Expr::Kind::Exists: return "(EXISTS (" + render(*e.subquery, cat) + "))";
        case Expr::Kind::Call: break;
    }
    std::vector<std::string> ops;
    ops.reserve(e.args.size());
    for (const auto& a : e.args) ops.push_back(render(a, cat));
    return render_template(cat.at(e.feature), ops);
}

std::string render(const FromItem& f, const FeatureCatalog& cat) {
    if (!f.is_join) return f.table;
    std::vector<std::string> ops;
    if (f.on) ops.push_back(render(*f.on, cat));
    return render_template(cat.at(f.join), ops, render(f.children[0], cat), render(f.children[1], cat));
}

std::string render(const Select& s, const FeatureCatalog& cat) {
    std::string out = s.distinct ? "SELECT DISTINCT " : "SELECT ";
    if (s.star) {
        out += "*";
    } else {
        for (std::size_t i = 0; i < s.items.size(); ++i) {
            if (i) out += ", ";
            out += render(s.items[i].expr, cat);
            if (!s.items[i].alias.empty()) out += " AS " + s.items[i].alias;
        }
    }
    if (s.from) out += " FROM " + render(*s.from, cat);
    if (s.where) out += " WHERE " + render(*s.where, cat);
    return out;
}

std::string render(const Statement& st, const FeatureCatalog& cat) {
    return std::visit(
        [&](const auto& s) -> std::string {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, CreateTable>) {
                std::vector<std::string> cols;
                for (const auto& c : s.columns) cols.push_back(c.name + " " + std::string(sql_type_name(c.type)));
                return "CREATE TABLE " + s.name + " (" + join_list(cols) + ")";
            } else if constexpr (std::is_same_v<T, CreateIndex>) {
                return std::string(s.unique ? "CREATE UNIQUE INDEX " : "CREATE INDEX ") + s.name + " ON " + s.table +
                       " (" + join_list(s.columns) + ")";
            } else if constexpr (std::is_same_v<T, CreateView>) {
                return "CREATE VIEW " + s.name + " AS " + render(s.select, cat);
            } else if constexpr (std::is_same_v<T, Insert>) {
                std::string out = "INSERT INTO " + s.table + " (" + join_list(s.columns) + ") VALUES ";
                for (std::size_t r = 0; r < s.rows.size(); ++r) {
                    if (r) out += ", ";
                    std::vector<std::string> vals;
                    for (const auto& v : s.rows[r]) vals.push_back(render(v, cat));
                    out += "(" + join_list(vals) + ")";
                }
                return out;
            } else if constexpr (std::is_same_v<T, Analyze>) {
                return "ANALYZE";
            } else {
                return render(s, cat);
            }
        },
        st);
}

}  // namespace adaquery::sql
