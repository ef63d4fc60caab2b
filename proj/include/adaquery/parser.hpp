#pragma once

#include <string_view>

#include "adaquery/ast.hpp"

namespace adaquery::sql {

// Parses the SQL dialect the renderer emits (plus a few common spellings
// such as bare JOIN and OUTER). Operators and functions are resolved to
// catalog features; column types are left Untyped for the caller to resolve.
// Throws ParseError on malformed input or unknown features.
Statement parse_statement(std::string_view sql, const FeatureCatalog& cat);
Select parse_select(std::string_view sql, const FeatureCatalog& cat);
Expr parse_expression(std::string_view sql, const FeatureCatalog& cat);
FromItem parse_from(std::string_view sql, const FeatureCatalog& cat);

}  // namespace adaquery::sql
