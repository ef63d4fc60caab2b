#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <unordered_map>

#include "mock_engine.hpp"

namespace adaquery::mock {

namespace {

constexpr std::size_t kMaxString = 100000;

using Fn = std::function<Value(std::span<const Value>)>;

Value vbool(std::optional<bool> b) { return b ? Value::boolean(*b) : Value::null(); }
Value vint(std::optional<std::int64_t> v) { return v ? Value::integer(*v) : Value::null(); }

std::string checked(std::string s) {
    if (s.size() > kMaxString) throw EvalError("string or blob too big");
    return s;
}

std::optional<bool> and3(std::optional<bool> a, std::optional<bool> b) {
    if ((a && !*a) || (b && !*b)) return false;
    if (a && b) return true;
    return std::nullopt;
}

std::optional<bool> or3(std::optional<bool> a, std::optional<bool> b) {
    if ((a && *a) || (b && *b)) return true;
    if (a && b) return false;
    return std::nullopt;
}

std::optional<bool> not3(std::optional<bool> a) {
    if (!a) return std::nullopt;
    return !*a;
}

std::optional<bool> cmp_is(const Value& a, const Value& b, bool (*pred)(int)) {
    auto c = compare(a, b);
    if (!c) return std::nullopt;
    return pred(*c);
}

Value int_op(std::span<const Value> a, std::optional<std::int64_t> (*op)(std::int64_t, std::int64_t)) {
    auto x = to_int(a[0]), y = to_int(a[1]);
    if (!x || !y) return Value::null();
    return vint(op(*x, *y));
}

Value int_fn(std::span<const Value> a, std::int64_t (*op)(std::int64_t)) {
    auto x = to_int(a[0]);
    if (!x) return Value::null();
    return Value::integer(op(*x));
}

std::int64_t trig(double v) {
    if (!std::isfinite(v) || std::fabs(v) >= 9.2e18) throw EvalError("numeric result out of range");
    return static_cast<std::int64_t>(std::trunc(v));
}

std::int64_t shift_left(std::int64_t a, std::int64_t b) {
    if (b < 0) return b <= -64 ? (a < 0 ? -1 : 0) : a >> -b;
    if (b >= 64) return 0;
    return static_cast<std::int64_t>(static_cast<std::uint64_t>(a) << b);
}

std::int64_t shift_right(std::int64_t a, std::int64_t b) {
    if (b < 0) return b <= -64 ? 0 : static_cast<std::int64_t>(static_cast<std::uint64_t>(a) << -b);
    if (b >= 64) return a < 0 ? -1 : 0;
    return a >> b;
}

std::optional<std::int64_t> divide(std::int64_t a, std::int64_t b) {
    if (b == 0) return std::nullopt;
    if (a == std::numeric_limits<std::int64_t>::min() && b == -1) throw EvalError("integer overflow");
    return a / b;
}

std::optional<std::int64_t> modulo(std::int64_t a, std::int64_t b) {
    if (b == 0) return std::nullopt;
    if (b == -1) return 0;
    return a % b;
}

Value text_fn(std::span<const Value> a, std::string (*op)(std::string)) {
    auto s = to_text(a[0]);
    if (!s) return Value::null();
    return Value::text(op(std::move(*s)));
}

Value pad(std::span<const Value> a, bool left) {
    auto s = to_text(a[0]);
    auto n = to_int(a[1]);
    auto p = to_text(a[2]);
    if (!s || !n || !p || *n < 0) return Value::null();
    if (static_cast<std::uint64_t>(*n) > kMaxString) throw EvalError("string or blob too big");
    const auto len = static_cast<std::size_t>(*n);
    if (s->size() >= len) return Value::text(s->substr(0, len));
    if (p->empty()) return Value::null();
    std::string fill;
    while (fill.size() < len - s->size()) fill += *p;
    fill.resize(len - s->size());
    return Value::text(left ? fill + *s : *s + fill);
}

Value extreme(std::span<const Value> a, bool greatest) {
    for (const auto& v : a)
        if (v.is_null()) return Value::null();
    const Value* best = &a[0];
    for (const auto& v : a.subspan(1)) {
        const int c = *compare(v, *best);
        if (greatest ? c > 0 : c < 0) best = &v;
    }
    return *best;
}

const std::unordered_map<std::string_view, Fn>& builtins() {
    static const std::unordered_map<std::string_view, Fn> table = [] {
        std::unordered_map<std::string_view, Fn> t;
        // Functions
        t["ABS"] = [](auto a) {
            return int_fn(a, [](std::int64_t x) {
                if (x == std::numeric_limits<std::int64_t>::min()) throw EvalError("integer overflow");
                return x < 0 ? -x : x;
            });
        };
        t["SIGN"] = [](auto a) { return int_fn(a, [](std::int64_t x) -> std::int64_t { return (x > 0) - (x < 0); }); };
        t["SIN"] = [](auto a) { return int_fn(a, [](std::int64_t x) { return trig(std::sin(static_cast<double>(x))); }); };
        t["COS"] = [](auto a) { return int_fn(a, [](std::int64_t x) { return trig(std::cos(static_cast<double>(x))); }); };
        t["TAN"] = [](auto a) { return int_fn(a, [](std::int64_t x) { return trig(std::tan(static_cast<double>(x))); }); };
        for (const char* id : {"ROUND", "CEIL", "FLOOR", "TRUNC"})
            t[id] = [](auto a) { return int_fn(a, [](std::int64_t x) { return x; }); };
        t["SQRT"] = [](auto a) {
            auto x = to_int(a[0]);
            if (!x || *x < 0) return Value::null();
            auto r = static_cast<std::int64_t>(std::sqrt(static_cast<double>(*x)));
            while (r > 0 && r > *x / r) --r;
            while ((r + 1) <= *x / (r + 1)) ++r;
            return Value::integer(r);
        };
        t["MOD"] = [](auto a) { return int_op(a, modulo); };
        for (const char* id : {"LENGTH", "CHAR_LENGTH"}) {
            t[id] = [](auto a) {
                auto s = to_text(a[0]);
                return s ? Value::integer(static_cast<std::int64_t>(s->size())) : Value::null();
            };
        }
        for (const char* id : {"ASCII", "UNICODE"}) {
            t[id] = [](auto a) {
                auto s = to_text(a[0]);
                if (!s || s->empty()) return Value::null();
                return Value::integer(static_cast<unsigned char>((*s)[0]));
            };
        }
        t["INSTR"] = [](auto a) {
            auto s = to_text(a[0]), n = to_text(a[1]);
            if (!s || !n) return Value::null();
            auto pos = s->find(*n);
            return Value::integer(pos == std::string::npos ? 0 : static_cast<std::int64_t>(pos) + 1);
        };
        t["UPPER"] = [](auto a) {
            return text_fn(a, [](std::string s) {
                for (auto& c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
                return s;
            });
        };
        t["LOWER"] = [](auto a) {
            return text_fn(a, [](std::string s) {
                for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
                return s;
            });
        };
        t["LTRIM"] = [](auto a) {
            return text_fn(a, [](std::string s) { return s.erase(0, std::min(s.find_first_not_of(' '), s.size())); });
        };
        t["RTRIM"] = [](auto a) {
            return text_fn(a, [](std::string s) {
                auto e = s.find_last_not_of(' ');
                return e == std::string::npos ? std::string() : s.substr(0, e + 1);
            });
        };
        t["TRIM"] = [](auto a) {
            return text_fn(a, [](std::string s) {
                auto b = s.find_first_not_of(' ');
                if (b == std::string::npos) return std::string();
                return s.substr(b, s.find_last_not_of(' ') - b + 1);
            });
        };
        t["REVERSE"] = [](auto a) { return text_fn(a, [](std::string s) { return std::string(s.rbegin(), s.rend()); }); };
        t["HEX"] = [](auto a) {
            return text_fn(a, [](std::string s) {
                static const char* digits = "0123456789ABCDEF";
                std::string out;
                for (unsigned char c : s) {
                    out += digits[c >> 4];
                    out += digits[c & 15];
                }
                return checked(std::move(out));
            });
        };
        t["REPLACE"] = [](auto a) {
            auto s = to_text(a[0]), from = to_text(a[1]), to = to_text(a[2]);
            if (!s || !from || !to) return Value::null();
            if (from->empty()) return Value::text(*s);
            std::string out;
            std::size_t pos = 0;
            while (true) {
                auto hit = s->find(*from, pos);
                if (hit == std::string::npos) break;
                out += s->substr(pos, hit - pos) + *to;
                if (out.size() > kMaxString) throw EvalError("string or blob too big");
                pos = hit + from->size();
            }
            return Value::text(checked(out + s->substr(pos)));
        };
        t["SUBSTR"] = [](auto a) {
            auto s = to_text(a[0]);
            auto start = to_int(a[1]), len = to_int(a[2]);
            if (!s || !start || !len) return Value::null();
            std::int64_t st = *start, ln = *len;
            if (ln < 0) return Value::text("");
            if (st < 1) {
                ln += st - 1;
                st = 1;
            }
            if (ln <= 0 || st > static_cast<std::int64_t>(s->size())) return Value::text("");
            return Value::text(s->substr(static_cast<std::size_t>(st - 1), static_cast<std::size_t>(ln)));
        };
        t["CONCAT"] = [](auto a) {
            auto x = to_text(a[0]), y = to_text(a[1]);
            if (!x || !y) return Value::null();
            return Value::text(checked(*x + *y));
        };
        t["LPAD"] = [](auto a) { return pad(a, true); };
        t["RPAD"] = [](auto a) { return pad(a, false); };
        t["REPEAT"] = [](auto a) {
            auto s = to_text(a[0]);
            auto n = to_int(a[1]);
            if (!s || !n) return Value::null();
            if (*n <= 0 || s->empty()) return Value::text("");
            if (static_cast<std::uint64_t>(*n) > kMaxString / s->size()) throw EvalError("string or blob too big");
            std::string out;
            for (std::int64_t i = 0; i < *n; ++i) out += *s;
            return Value::text(out);
        };
        t["LEFT"] = [](auto a) {
            auto s = to_text(a[0]);
            auto n = to_int(a[1]);
            if (!s || !n) return Value::null();
            if (*n <= 0) return Value::text("");
            return Value::text(s->substr(0, static_cast<std::size_t>(std::min<std::int64_t>(*n, s->size()))));
        };
        t["RIGHT"] = [](auto a) {
            auto s = to_text(a[0]);
            auto n = to_int(a[1]);
            if (!s || !n) return Value::null();
            if (*n <= 0) return Value::text("");
            const auto k = static_cast<std::size_t>(std::min<std::int64_t>(*n, s->size()));
            return Value::text(s->substr(s->size() - k));
        };
        t["NULLIF"] = [](auto a) {
            auto c = compare(a[0], a[1]);
            return c && *c == 0 ? Value::null() : a[0];
        };
        for (const char* id : {"COALESCE", "IFNULL"})
            t[id] = [](auto a) { return a[0].is_null() ? a[1] : a[0]; };
        for (const char* id : {"GREATEST", "MAX"}) t[id] = [](auto a) { return extreme(a, true); };
        for (const char* id : {"LEAST", "MIN"}) t[id] = [](auto a) { return extreme(a, false); };
        t["IIF"] = [](auto a) { return truth(a[0]).value_or(false) ? a[1] : a[2]; };

        // Operators
        t["="] = [](auto a) { return vbool(cmp_is(a[0], a[1], [](int c) { return c == 0; })); };
        t["!="] = [](auto a) { return vbool(cmp_is(a[0], a[1], [](int c) { return c != 0; })); };
        t["<>"] = t["!="];
        t["<"] = [](auto a) { return vbool(cmp_is(a[0], a[1], [](int c) { return c < 0; })); };
        t["<="] = [](auto a) { return vbool(cmp_is(a[0], a[1], [](int c) { return c <= 0; })); };
        t[">"] = [](auto a) { return vbool(cmp_is(a[0], a[1], [](int c) { return c > 0; })); };
        t[">="] = [](auto a) { return vbool(cmp_is(a[0], a[1], [](int c) { return c >= 0; })); };
        t["<=>"] = [](auto a) {
            if (a[0].is_null() || a[1].is_null()) return Value::boolean(a[0].is_null() && a[1].is_null());
            return Value::boolean(*compare(a[0], a[1]) == 0);
        };
        t["IS_NOT_DISTINCT_FROM"] = t["<=>"];
        t["IS_DISTINCT_FROM"] = [](auto a) {
            if (a[0].is_null() || a[1].is_null()) return Value::boolean(!(a[0].is_null() && a[1].is_null()));
            return Value::boolean(*compare(a[0], a[1]) != 0);
        };
        t["AND"] = [](auto a) { return vbool(and3(truth(a[0]), truth(a[1]))); };
        t["OR"] = [](auto a) { return vbool(or3(truth(a[0]), truth(a[1]))); };
        t["NOT"] = [](auto a) { return vbool(not3(truth(a[0]))); };
        t["+"] = [](auto a) {
            return int_op(a, [](std::int64_t x, std::int64_t y) -> std::optional<std::int64_t> {
                std::int64_t r;
                if (__builtin_add_overflow(x, y, &r)) throw EvalError("integer overflow");
                return r;
            });
        };
        t["-"] = [](auto a) {
            return int_op(a, [](std::int64_t x, std::int64_t y) -> std::optional<std::int64_t> {
                std::int64_t r;
                if (__builtin_sub_overflow(x, y, &r)) throw EvalError("integer overflow");
                return r;
            });
        };
        t["*"] = [](auto a) {
            return int_op(a, [](std::int64_t x, std::int64_t y) -> std::optional<std::int64_t> {
                std::int64_t r;
                if (__builtin_mul_overflow(x, y, &r)) throw EvalError("integer overflow");
                return r;
            });
        };
        t["/"] = [](auto a) { return int_op(a, divide); };
        t["%"] = [](auto a) { return int_op(a, modulo); };
        t["BIT_AND"] = [](auto a) {
            return int_op(a, [](std::int64_t x, std::int64_t y) -> std::optional<std::int64_t> { return x & y; });
        };
        t["BIT_OR"] = [](auto a) {
            return int_op(a, [](std::int64_t x, std::int64_t y) -> std::optional<std::int64_t> { return x | y; });
        };
        t["<<"] = [](auto a) {
            return int_op(a, [](std::int64_t x, std::int64_t y) -> std::optional<std::int64_t> { return shift_left(x, y); });
        };
        t[">>"] = [](auto a) {
            return int_op(a, [](std::int64_t x, std::int64_t y) -> std::optional<std::int64_t> { return shift_right(x, y); });
        };
        t["~"] = [](auto a) { return int_fn(a, [](std::int64_t x) { return ~x; }); };
        t["UNARY_PLUS"] = [](auto a) { return int_fn(a, [](std::int64_t x) { return x; }); };
        t["UNARY_MINUS"] = [](auto a) {
            return int_fn(a, [](std::int64_t x) {
                if (x == std::numeric_limits<std::int64_t>::min()) throw EvalError("integer overflow");
                return -x;
            });
        };
        t["STR_CONCAT"] = t["CONCAT"];
        t["LIKE"] = [](auto a) {
            auto s = to_text(a[0]), p = to_text(a[1]);
            if (!s || !p) return Value::null();
            return Value::boolean(like(*s, *p));
        };
        t["NOT_LIKE"] = [](auto a) {
            auto s = to_text(a[0]), p = to_text(a[1]);
            if (!s || !p) return Value::null();
            return Value::boolean(!like(*s, *p));
        };
        for (const char* id : {"IS_NULL", "ISNULL"}) t[id] = [](auto a) { return Value::boolean(a[0].is_null()); };
        for (const char* id : {"IS_NOT_NULL", "NOTNULL"})
            t[id] = [](auto a) { return Value::boolean(!a[0].is_null()); };
        t["IS_TRUE"] = [](auto a) { return Value::boolean(truth(a[0]) == std::optional<bool>(true)); };
        t["IS_FALSE"] = [](auto a) { return Value::boolean(truth(a[0]) == std::optional<bool>(false)); };
        t["IS_NOT_TRUE"] = [](auto a) { return Value::boolean(truth(a[0]) != std::optional<bool>(true)); };
        t["IS_NOT_FALSE"] = [](auto a) { return Value::boolean(truth(a[0]) != std::optional<bool>(false)); };
        t["BETWEEN"] = [](auto a) {
            return vbool(and3(cmp_is(a[0], a[1], [](int c) { return c >= 0; }),
                              cmp_is(a[0], a[2], [](int c) { return c <= 0; })));
        };
        t["NOT_BETWEEN"] = [](auto a) {
            return vbool(not3(and3(cmp_is(a[0], a[1], [](int c) { return c >= 0; }),
                                   cmp_is(a[0], a[2], [](int c) { return c <= 0; }))));
        };
        t["IN"] = [](auto a) {
            return vbool(or3(cmp_is(a[0], a[1], [](int c) { return c == 0; }),
                             cmp_is(a[0], a[2], [](int c) { return c == 0; })));
        };
        t["NOT_IN"] = [](auto a) {
            return vbool(not3(or3(cmp_is(a[0], a[1], [](int c) { return c == 0; }),
                                  cmp_is(a[0], a[2], [](int c) { return c == 0; }))));
        };
        t["CASE"] = [](auto a) { return truth(a[0]).value_or(false) ? a[1] : a[2]; };
        return t;
    }();
    return table;
}

}  // namespace

std::optional<std::int64_t> to_int(const Value& v) {
    switch (v.tag()) {
        case Value::Tag::Null: return std::nullopt;
        case Value::Tag::Int: return v.as_int();
        case Value::Tag::Bool: return v.as_bool() ? 1 : 0;
        case Value::Tag::Real: {
            const double d = v.as_real();
            if (!std::isfinite(d) || std::fabs(d) >= 9.2e18) return 0;
            return static_cast<std::int64_t>(d);
        }
        case Value::Tag::Text: break;
    }
    // Leading-integer conversion: optional spaces, sign, digits; saturating.
    const std::string& s = v.as_text();
    std::size_t i = 0;
    while (i < s.size() && s[i] == ' ') ++i;
    bool neg = false;
    if (i < s.size() && (s[i] == '-' || s[i] == '+')) neg = s[i++] == '-';
    std::int64_t r = 0;
    for (; i < s.size() && s[i] >= '0' && s[i] <= '9'; ++i) {
        const int d = s[i] - '0';
        if (r > (std::numeric_limits<std::int64_t>::max() - d) / 10) {
            return neg ? std::numeric_limits<std::int64_t>::min() : std::numeric_limits<std::int64_t>::max();
        }
        r = r * 10 + d;
    }
    return neg ? -r : r;
}

std::optional<bool> truth(const Value& v) {
    if (v.tag() == Value::Tag::Bool) return v.as_bool();
    auto i = to_int(v);
    if (!i) return std::nullopt;
    return *i != 0;
}

std::optional<std::string> to_text(const Value& v) {
    switch (v.tag()) {
        case Value::Tag::Null: return std::nullopt;
        case Value::Tag::Text: return v.as_text();
        case Value::Tag::Bool: return std::string(v.as_bool() ? "1" : "0");
        default: return v.canonical();
    }
}

std::optional<int> compare(const Value& a, const Value& b) {
    if (a.is_null() || b.is_null()) return std::nullopt;
    if (a.tag() == Value::Tag::Text && b.tag() == Value::Tag::Text) {
        const int c = a.as_text().compare(b.as_text());
        return (c > 0) - (c < 0);
    }
    const std::int64_t x = *to_int(a), y = *to_int(b);
    return (x > y) - (x < y);
}

bool like(std::string_view s, std::string_view p) {
    // Iterative wildcard match with backtracking to the last '%'.
    auto lower = [](char c) { return static_cast<char>(std::tolower(static_cast<unsigned char>(c))); };
    std::size_t si = 0, pi = 0, star = std::string_view::npos, mark = 0;
    while (si < s.size()) {
        if (pi < p.size() && (p[pi] == '_' || (p[pi] != '%' && lower(p[pi]) == lower(s[si])))) {
            ++si;
            ++pi;
        } else if (pi < p.size() && p[pi] == '%') {
            star = pi++;
            mark = si;
        } else if (star != std::string_view::npos) {
            pi = star + 1;
            si = ++mark;
        } else {
            return false;
        }
    }
    while (pi < p.size() && p[pi] == '%') ++pi;
    return pi == p.size();
}

bool implemented(std::string_view feature_id) { return builtins().count(feature_id) > 0; }

Value apply(std::string_view feature_id, std::span<const Value> args) {
    auto it = builtins().find(feature_id);
    if (it == builtins().end()) throw EvalError("no such function: " + std::string(feature_id));
    return it->second(args);
}

Value lookup(const sql::Expr& col, const Env& env) {
    for (const Env* e = &env; e; e = e->parent) {
        if (!e->sources) continue;
        const Value* found = nullptr;
        bool found_any = false;
        static const Value null_value;
        for (std::size_t s = 0; s < e->sources->size(); ++s) {
            const Source& src = (*e->sources)[s];
            if (!col.table.empty() && src.name != col.table) continue;
            for (std::size_t c = 0; c < src.columns.size(); ++c) {
                if (src.columns[c].name != col.column) continue;
                if (found_any) throw EvalError("ambiguous column name: " + col.column);
                found_any = true;
                const Row* row = (*e->row)[s];
                found = row ? &(*row)[c] : &null_value;
            }
        }
        if (found_any) return *found;
    }
    throw EvalError("no such column: " + (col.table.empty() ? col.column : col.table + "." + col.column));
}

ActiveBugs triggered_bugs(const sql::Expr& predicate, const std::vector<BugInjection>& bugs,
                          const FeatureCatalog& cat) {
    ActiveBugs active;
    if (predicate.kind != sql::Expr::Kind::Call) return active;
    std::set<std::string> present;
    sql::visit_exprs(predicate, [&](const sql::Expr& e) {
        if (e.kind == sql::Expr::Kind::Call) present.insert(cat.id(e.feature));
    });
    for (const auto& bug : bugs) {
        if (cat.id(predicate.feature) != bug.trigger.back()) continue;
        bool all = true;
        for (const auto& id : bug.trigger) all &= present.count(id) > 0;
        if (!all) continue;
        active.root = &predicate;
        switch (bug.effect) {
            case BugEffect::FirstArg:
                if (bug.trigger.size() == 1) {
                    active.first_arg.insert(predicate.feature);
                } else {
                    for (std::size_t i = 0; i + 1 < bug.trigger.size(); ++i)
                        active.first_arg.insert(cat.index(bug.trigger[i]));
                }
                break;
            case BugEffect::NullAsTrue: active.null_as_true = true; break;
            case BugEffect::Invert: active.invert = true; break;
        }
    }
    return active;
}

Value Engine::eval(const sql::Expr& e, const Env& env, const ActiveBugs* bugs) {
    switch (e.kind) {
        case sql::Expr::Kind::Constant: return e.value;
        case sql::Expr::Kind::Column: return lookup(e, env);
        case sql::Expr::Kind::Exists: {
            ResultSet r = select(*e.subquery, &env, false);
            return Value::boolean(!r.rows.empty());
        }
        case sql::Expr::Kind::Call: break;
    }
    if (bugs && bugs->first_arg.count(e.feature)) return eval(e.args[0], env, bugs);
    std::vector<Value> args;
    args.reserve(e.args.size());
    for (const auto& a : e.args) args.push_back(eval(a, env, bugs));
    Value v = mock::apply(cat_.id(e.feature), args);
    if (bugs && bugs->root == &e) {
        if (bugs->null_as_true && v.is_null()) v = Value::boolean(true);
        if (bugs->invert && v.tag() == Value::Tag::Bool) v = Value::boolean(!v.as_bool());
    }
    return v;
}

Engine::Relation Engine::from(const sql::FromItem& item, const Env* parent) {
    Relation rel;
    if (!item.is_join) {
        const MockTable* t = db_.find(item.table);
        if (!t) throw EvalError("no such table: " + item.table);
        rel.sources.push_back({t->def.name, t->def.columns});
        const std::vector<Row>* rows = &t->rows;
        if (t->view) {
            ResultSet r = select(*t->view, nullptr, false);
            storage_.push_back(std::move(r.rows));
            rows = &storage_.back();
        }
        for (const auto& row : *rows) rel.rows.push_back({&row});
        return rel;
    }
    Relation l = from(item.children[0], parent);
    Relation r = from(item.children[1], parent);
    rel.sources = l.sources;
    rel.sources.insert(rel.sources.end(), r.sources.begin(), r.sources.end());
    const std::string& kind = cat_.id(item.join);
    const bool keep_left = kind == "LEFT_JOIN" || kind == "FULL_JOIN";
    const bool keep_right = kind == "RIGHT_JOIN" || kind == "FULL_JOIN";
    const bool natural = kind == "NATURAL_JOIN";

    // NATURAL: pairs (left source, left column, right column) with equal names.
    struct Pair {
        std::size_t ls, lc, rc;
    };
    std::vector<Pair> shared;
    if (natural) {
        for (std::size_t rc = 0; rc < r.sources[0].columns.size(); ++rc) {
            bool done = false;
            for (std::size_t ls = 0; ls < l.sources.size() && !done; ++ls)
                for (std::size_t lc = 0; lc < l.sources[ls].columns.size() && !done; ++lc)
                    if (l.sources[ls].columns[lc].name == r.sources[0].columns[rc].name) {
                        shared.push_back({ls, lc, rc});
                        done = true;
                    }
        }
    }

    std::vector<bool> right_matched(r.rows.size(), false);
    for (const auto& lrow : l.rows) {
        bool matched = false;
        for (std::size_t ri = 0; ri < r.rows.size(); ++ri) {
            std::vector<const Row*> combined = lrow;
            combined.insert(combined.end(), r.rows[ri].begin(), r.rows[ri].end());
            bool ok = true;
            if (item.on) {
                Env env{&rel.sources, &combined, parent};
                ok = truth(eval(*item.on, env)).value_or(false);
            } else if (natural) {
                for (const auto& p : shared) {
                    const Row* lr = lrow[p.ls];
                    const Row* rr = r.rows[ri][0];
                    if (!lr || !rr) {
                        ok = false;
                        break;
                    }
                    auto c = compare((*lr)[p.lc], (*rr)[p.rc]);
                    if (!c || *c != 0) {
                        ok = false;
                        break;
                    }
                }
            }
            if (!ok) continue;
            matched = true;
            right_matched[ri] = true;
            rel.rows.push_back(std::move(combined));
        }
        if (!matched && keep_left) {
            std::vector<const Row*> combined = lrow;
            combined.resize(rel.sources.size(), nullptr);
            rel.rows.push_back(std::move(combined));
        }
    }
    if (keep_right) {
        for (std::size_t ri = 0; ri < r.rows.size(); ++ri) {
            if (right_matched[ri]) continue;
            std::vector<const Row*> combined(l.sources.size(), nullptr);
            combined.insert(combined.end(), r.rows[ri].begin(), r.rows[ri].end());
            rel.rows.push_back(std::move(combined));
        }
    }
    return rel;
}

ResultSet Engine::select(const sql::Select& q, const Env* parent, bool outermost) {
    Relation rel;
    if (q.from) {
        rel = from(*q.from, parent);
    } else {
        rel.rows.push_back({});
    }
    ActiveBugs active;
    if (outermost && q.where && !bugs_.empty()) active = triggered_bugs(*q.where, bugs_, cat_);
    ResultSet out;
    if (q.star) {
        for (const auto& s : rel.sources) out.columns += s.columns.size();
    } else {
        out.columns = q.items.size();
    }
    for (const auto& row : rel.rows) {
        Env env{&rel.sources, &row, parent};
        if (q.where && !truth(eval(*q.where, env, active.any() ? &active : nullptr)).value_or(false)) continue;
        Row projected;
        if (q.star) {
            for (std::size_t s = 0; s < rel.sources.size(); ++s)
                for (std::size_t c = 0; c < rel.sources[s].columns.size(); ++c)
                    projected.push_back(row[s] ? (*row[s])[c] : Value::null());
        } else {
            for (const auto& item : q.items) projected.push_back(eval(item.expr, env));
        }
        out.rows.push_back(std::move(projected));
    }
    if (q.distinct) {
        std::vector<Row> unique;
        for (auto& r : out.rows)
            if (std::find(unique.begin(), unique.end(), r) == unique.end()) unique.push_back(std::move(r));
        out.rows = std::move(unique);
    }
    return out;
}

}  // namespace adaquery::mock
