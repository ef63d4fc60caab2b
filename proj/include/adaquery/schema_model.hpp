#pragma once

#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "adaquery/ast.hpp"
#include "adaquery/rng.hpp"

namespace adaquery {

struct ColumnDef {
    std::string name;
    DataType dtype = DataType::Integer;

    bool operator==(const ColumnDef&) const = default;
};

enum class TableKind { BaseTable, View };

struct TableDef {
    std::string name;
    std::vector<ColumnDef> columns;
    TableKind kind = TableKind::BaseTable;

    const ColumnDef* column(const std::string& n) const;
    bool operator==(const TableDef&) const = default;
};

struct IndexDef {
    std::string name;
    std::string table;
    std::vector<std::string> columns;
    bool unique = false;

    bool operator==(const IndexDef&) const = default;
};

using StagedObject = std::variant<std::monostate, TableDef, IndexDef>;

enum class ObjectClass { Table, View, Index };

// Outcome of executing a statement on a target.
struct ExecutionStatus {
    enum class Outcome { Success, Error, Fatal };
    Outcome outcome = Outcome::Success;
    std::string message;

    static ExecutionStatus success() { return {}; }
    static ExecutionStatus error(std::string m) { return {Outcome::Error, std::move(m)}; }
    static ExecutionStatus fatal(std::string m) { return {Outcome::Fatal, std::move(m)}; }
    bool ok() const { return outcome == Outcome::Success; }
    bool fatal() const { return outcome == Outcome::Fatal; }
};

// Mirror of the target's catalog, updated only when DDL succeeds.
class SchemaModel {
public:
    // The object a DDL statement would create; monostate for other statements.
    StagedObject stage(const sql::Statement& stmt) const;
    void commit(const StagedObject& staged, const ExecutionStatus& status);

    // Next unused name for the class: t<k>, v<k>, i<k>. Counters only grow.
    std::string fresh_name(ObjectClass c);

    bool empty() const { return tables_.empty(); }
    const std::vector<TableDef>& tables() const { return tables_; }
    const std::vector<IndexDef>& indexes() const { return indexes_; }
    const TableDef* find_table(const std::string& name) const;
    bool has_object(const std::string& name) const;
    std::size_t count(TableKind k) const;

    // Throws EmptySchemaError when there is no table or view.
    const TableDef& random_table(Rng& rng) const;
    const TableDef& random_base_table(Rng& rng) const;
    static const ColumnDef& random_column(const TableDef& t, Rng& rng);

    // Canonical one-line-per-object description used for mirror comparison.
    std::vector<std::string> describe() const;

private:
    std::vector<TableDef> tables_;
    std::vector<IndexDef> indexes_;
    std::map<ObjectClass, std::size_t> counters_;
};

// Describes a table/index the same way SchemaModel::describe does.
std::string describe_object(const TableDef& t);
std::string describe_object(const IndexDef& i);

}  // namespace adaquery
