#include "adaquery/schema_model.hpp"

#include <algorithm>

#include "adaquery/error.hpp"

namespace adaquery {

const ColumnDef* TableDef::column(const std::string& n) const {
    for (const auto& c : columns)
        if (c.name == n) return &c;
    return nullptr;
}

StagedObject SchemaModel::stage(const sql::Statement& stmt) const {
    if (const auto* t = std::get_if<sql::CreateTable>(&stmt)) {
        TableDef def{t->name, {}, TableKind::BaseTable};
        for (const auto& c : t->columns) def.columns.push_back({c.name, c.type});
        return def;
    }
    if (const auto* v = std::get_if<sql::CreateView>(&stmt)) {
        TableDef def{v->name, {}, TableKind::View};
        for (std::size_t i = 0; i < v->select.items.size(); ++i) {
            const auto& item = v->select.items[i];
            std::string name = item.alias.empty() ? item.expr.column : item.alias;
            def.columns.push_back({name, item.expr.dtype});
        }
        return def;
    }
    if (const auto* ix = std::get_if<sql::CreateIndex>(&stmt)) {
        return IndexDef{ix->name, ix->table, ix->columns, ix->unique};
    }
    return std::monostate{};
}

void SchemaModel::commit(const StagedObject& staged, const ExecutionStatus& status) {
    if (!status.ok()) return;
    if (const auto* t = std::get_if<TableDef>(&staged)) tables_.push_back(*t);
    if (const auto* i = std::get_if<IndexDef>(&staged)) indexes_.push_back(*i);
}

std::string SchemaModel::fresh_name(ObjectClass c) {
    const char* prefix = c == ObjectClass::Table ? "t" : c == ObjectClass::View ? "v" : "i";
    while (true) {
        std::string name = prefix + std::to_string(counters_[c]++);
        if (!has_object(name)) return name;
    }
}

const TableDef* SchemaModel::find_table(const std::string& name) const {
    for (const auto& t : tables_)
        if (t.name == name) return &t;
    return nullptr;
}

bool SchemaModel::has_object(const std::string& name) const {
    if (find_table(name)) return true;
    return std::any_of(indexes_.begin(), indexes_.end(), [&](const IndexDef& i) { return i.name == name; });
}

std::size_t SchemaModel::count(TableKind k) const {
    return static_cast<std::size_t>(
        std::count_if(tables_.begin(), tables_.end(), [&](const TableDef& t) { return t.kind == k; }));
}

const TableDef& SchemaModel::random_table(Rng& rng) const {
    if (tables_.empty()) throw EmptySchemaError("schema has no tables");
    return tables_[rng.below(tables_.size())];
}

const TableDef& SchemaModel::random_base_table(Rng& rng) const {
    std::vector<const TableDef*> base;
    for (const auto& t : tables_)
        if (t.kind == TableKind::BaseTable) base.push_back(&t);
    if (base.empty()) throw EmptySchemaError("schema has no base tables");
    return *base[rng.below(base.size())];
}

const ColumnDef& SchemaModel::random_column(const TableDef& t, Rng& rng) {
    return t.columns[rng.below(t.columns.size())];
}

std::string describe_object(const TableDef& t) {
    std::string out = (t.kind == TableKind::View ? "view " : "table ") + t.name + "(";
    for (std::size_t i = 0; i < t.columns.size(); ++i) {
        if (i) out += ", ";
        out += t.columns[i].name + " " + std::string(to_string(t.columns[i].dtype));
    }
    return out + ")";
}

std::string describe_object(const IndexDef& i) {
    std::string out = std::string(i.unique ? "unique index " : "index ") + i.name + " on " + i.table + "(";
    for (std::size_t k = 0; k < i.columns.size(); ++k) {
        if (k) out += ", ";
        out += i.columns[k];
    }
    return out + ")";
}

std::vector<std::string> SchemaModel::describe() const {
    std::vector<std::string> out;
    for (const auto& t : tables_) out.push_back(describe_object(t));
    for (const auto& i : indexes_) out.push_back(describe_object(i));
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace adaquery
