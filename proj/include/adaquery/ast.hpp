#pragma once

#include <memory>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "adaquery/feature_catalog.hpp"
#include "adaquery/value.hpp"

namespace adaquery::sql {

struct Select;

// Expression node. Operators and functions are both Calls of a catalog
// feature and render through that feature's template.
struct Expr {
    enum class Kind { Constant, Column, Call, Exists };

    Kind kind = Kind::Constant;
    // Constant: literal type (Untyped for NULL). Column: column type.
    DataType dtype = DataType::Untyped;
    Value value;
    std::string table;
    std::string column;
    FeatureIndex feature = 0;
    std::vector<Expr> args;
    std::shared_ptr<Select> subquery;

    static Expr constant(Value v);
    static Expr column_ref(std::string table, std::string column, DataType type);
    static Expr call(FeatureIndex feature, std::vector<Expr> args);
    static Expr exists(Select sub);

    bool operator==(const Expr& o) const;
};

struct FromItem {
    // Leaf: a table or view name. Join: two children and an optional ON.
    std::string table;
    bool is_join = false;
    FeatureIndex join = 0;
    std::vector<FromItem> children;
    std::optional<Expr> on;

    static FromItem leaf(std::string name);
    static FromItem make_join(FeatureIndex join, FromItem left, FromItem right, std::optional<Expr> on);
    // Table names in left-to-right order.
    std::vector<std::string> tables() const;

    bool operator==(const FromItem&) const = default;
};

struct SelectItem {
    Expr expr;
    std::string alias;

    bool operator==(const SelectItem&) const = default;
};

struct Select {
    bool distinct = false;
    bool star = false;
    std::vector<SelectItem> items;
    std::optional<FromItem> from;
    std::optional<Expr> where;

    bool operator==(const Select&) const = default;
};

struct ColumnSpec {
    std::string name;
    DataType type = DataType::Integer;

    bool operator==(const ColumnSpec&) const = default;
};

struct CreateTable {
    std::string name;
    std::vector<ColumnSpec> columns;

    bool operator==(const CreateTable&) const = default;
};

struct CreateIndex {
    std::string name;
    std::string table;
    std::vector<std::string> columns;
    bool unique = false;

    bool operator==(const CreateIndex&) const = default;
};

struct CreateView {
    std::string name;
    Select select;

    bool operator==(const CreateView&) const = default;
};

struct Insert {
    std::string table;
    std::vector<std::string> columns;
    // Target column types, resolved by the generator or the executing engine.
    std::vector<DataType> column_types;
    std::vector<std::vector<Expr>> rows;

    bool operator==(const Insert&) const = default;
};

struct Analyze {
    bool operator==(const Analyze&) const = default;
};

using Statement = std::variant<CreateTable, CreateIndex, CreateView, Insert, Analyze, Select>;

enum class StatementKind { CreateTable, CreateIndex, CreateView, Insert, Analyze, Select };

StatementKind kind_of(const Statement& s);
std::string_view to_string(StatementKind k);
bool is_ddl(StatementKind k);

std::string render(const Expr& e, const FeatureCatalog& cat);
std::string render(const FromItem& f, const FeatureCatalog& cat);
std::string render(const Select& s, const FeatureCatalog& cat);
std::string render(const Statement& s, const FeatureCatalog& cat);

// Structural type of an expression: literal/column types, concrete result
// types, and for generic results the type of the first typed T operand.
DataType infer_type(const Expr& e, const FeatureCatalog& cat);

// True if the operands of this call node violate its signature: a typed
// operand differs from a concrete parameter type, or typed T operands
// disagree. NULL operands never violate.
bool ill_typed_call(const Expr& e, const FeatureCatalog& cat);

// Type recorded in the composite feature of argument `arg` of function call
// `e`: the argument's own type, else the parameter type, else the call's
// resolved T, else Integer.
DataType composite_arg_type(const Expr& e, std::size_t arg, const FeatureCatalog& cat);

// True if a predicate (WHERE/ON) or inserted value of this type is ill-typed for `expected`.
bool ill_typed_slot(DataType actual, DataType expected);

using FeatureSet = std::set<FeatureIndex>;

// Exact feature set of a statement or query fragment, recomputed from the AST.
void collect_features(const Expr& e, const FeatureCatalog& cat, FeatureSet& out);
void collect_features(const FromItem& f, const FeatureCatalog& cat, FeatureSet& out);
void collect_features(const Select& s, const FeatureCatalog& cat, FeatureSet& out);
// Features a WHERE clause with this predicate contributes (WHERE + predicate + root check).
void collect_where_features(const Expr& predicate, const FeatureCatalog& cat, FeatureSet& out);
FeatureSet collect_features(const Statement& s, const FeatureCatalog& cat);

std::vector<std::string> feature_ids(const FeatureSet& s, const FeatureCatalog& cat);

// Visits every expression node, outer before inner, including ON predicates
// and EXISTS subqueries.
template <class F>
void visit_exprs(const Expr& e, F&& f);
template <class F>
void visit_exprs(const Select& s, F&& f);

template <class F>
void visit_exprs(const FromItem& item, F&& f) {
    for (const auto& c : item.children) visit_exprs(c, f);
    if (item.on) visit_exprs(*item.on, f);
}

template <class F>
void visit_exprs(const Expr& e, F&& f) {
    f(e);
    for (const auto& a : e.args) visit_exprs(a, f);
    if (e.subquery) visit_exprs(*e.subquery, f);
}

template <class F>
void visit_exprs(const Select& s, F&& f) {
    for (const auto& it : s.items) visit_exprs(it.expr, f);
    if (s.from) visit_exprs(*s.from, f);
    if (s.where) visit_exprs(*s.where, f);
}

}  // namespace adaquery::sql
