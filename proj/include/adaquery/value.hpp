#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace adaquery {

// Operand/column types of the generator. Untyped marks NULL literals and
// expressions whose type cannot be resolved.
enum class DataType { Integer, Text, Boolean, Untyped };

std::string_view to_string(DataType t);
// INT / STRING / BOOLEAN, the spelling used in composite feature ids.
std::string_view type_token(DataType t);
// Parses INT, INTEGER, STRING, TEXT, BOOLEAN; throws Error otherwise.
DataType parse_type_token(std::string_view s);
// SQL type name used in CREATE TABLE.
std::string_view sql_type_name(DataType t);

struct Null {
    bool operator==(const Null&) const = default;
    auto operator<=>(const Null&) const = default;
};

// A result cell. Real only comes back from engines that compute floating
// point results (e.g. SIN on the embedded engine).
class Value {
public:
    using Storage = std::variant<Null, std::int64_t, std::string, bool, double>;
    enum class Tag { Null, Int, Text, Bool, Real };

    Value() = default;
    static Value null() { return Value(); }
    static Value integer(std::int64_t v) { return Value(Storage(v)); }
    static Value text(std::string v) { return Value(Storage(std::move(v))); }
    static Value boolean(bool v) { return Value(Storage(v)); }
    static Value real(double v) { return Value(Storage(v)); }

    Tag tag() const { return static_cast<Tag>(v_.index()); }
    bool is_null() const { return tag() == Tag::Null; }
    std::int64_t as_int() const { return std::get<std::int64_t>(v_); }
    const std::string& as_text() const { return std::get<std::string>(v_); }
    bool as_bool() const { return std::get<bool>(v_); }
    double as_real() const { return std::get<double>(v_); }

    // SQL literal: NULL, 12, -3, 'it''s', TRUE.
    std::string sql() const;
    // Canonical display form; integers and reals print as numbers, text as is.
    std::string canonical() const;
    // Tagged display for reports: Int 1, Text '1', NULL.
    std::string display() const;

    bool operator==(const Value& o) const = default;
    auto operator<=>(const Value& o) const = default;

private:
    explicit Value(Storage v) : v_(std::move(v)) {}
    Storage v_;
};

using Row = std::vector<Value>;

struct ResultSet {
    std::size_t columns = 0;
    std::vector<Row> rows;

    bool operator==(const ResultSet&) const = default;
};

std::string format_real(double d);

}  // namespace adaquery
