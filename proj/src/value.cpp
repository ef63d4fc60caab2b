#include "adaquery/value.hpp"

#include <cmath>
#include <cstdio>

#include "adaquery/error.hpp"

namespace adaquery {

std::string_view to_string(DataType t) {
    switch (t) {
        case DataType::Integer: return "Integer";
        case DataType::Text: return "Text";
        case DataType::Boolean: return "Boolean";
        case DataType::Untyped: return "Untyped";
    }
    return "?";
}

std::string_view type_token(DataType t) {
    switch (t) {
        case DataType::Integer: return "INT";
        case DataType::Text: return "STRING";
        case DataType::Boolean: return "BOOLEAN";
        case DataType::Untyped: return "UNTYPED";
    }
    return "?";
}

DataType parse_type_token(std::string_view s) {
    if (s == "INT" || s == "INTEGER") return DataType::Integer;
    if (s == "STRING" || s == "TEXT") return DataType::Text;
    if (s == "BOOLEAN" || s == "BOOL") return DataType::Boolean;
    throw Error("unknown type '" + std::string(s) + "'");
}

std::string_view sql_type_name(DataType t) {
    switch (t) {
        case DataType::Integer: return "INTEGER";
        case DataType::Text: return "TEXT";
        case DataType::Boolean: return "BOOLEAN";
        case DataType::Untyped: return "";
    }
    return "";
}

std::string format_real(double d) {
    if (std::isnan(d)) return "NaN";
    if (std::isinf(d)) return d > 0 ? "Inf" : "-Inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", d);
    return buf;
}

std::string Value::sql() const {
    switch (tag()) {
        case Tag::Null: return "NULL";
        case Tag::Int: return std::to_string(as_int());
        case Tag::Bool: return as_bool() ? "TRUE" : "FALSE";
        case Tag::Real: return format_real(as_real());
        case Tag::Text: {
            std::string out = "'";
            for (char c : as_text()) {
                if (c == '\'') out += '\'';
                out += c;
            }
            return out + "'";
        }
    }
    return "";
}

std::string Value::canonical() const {
    switch (tag()) {
        case Tag::Null: return "NULL";
        case Tag::Int: return std::to_string(as_int());
        case Tag::Bool: return as_bool() ? "TRUE" : "FALSE";
        case Tag::Real: return format_real(as_real());
        case Tag::Text: return as_text();
    }
    return "";
}

std::string Value::display() const {
    switch (tag()) {
        case Tag::Null: return "NULL";
        case Tag::Int: return "Int " + std::to_string(as_int());
        case Tag::Bool: return as_bool() ? "Bool TRUE" : "Bool FALSE";
        case Tag::Real: return "Real " + format_real(as_real());
        case Tag::Text: return "Text " + sql();
    }
    return "";
}

}  // namespace adaquery
