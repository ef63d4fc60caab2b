#include "adaquery/parser.hpp"

#include <cctype>
#include <cstdint>
#include <set>

#include "adaquery/error.hpp"

namespace adaquery::sql {

namespace {

struct Token {
    enum class Kind { Ident, Int, String, Symbol, End };
    Kind kind = Kind::End;
    std::string text;   // identifier as written, symbol, string contents
    std::string upper;  // uppercase identifier
    std::uint64_t number = 0;
    std::size_t pos = 0;
};

std::vector<Token> tokenize(std::string_view s) {
    std::vector<Token> out;
    std::size_t i = 0;
    while (i < s.size()) {
        const char c = s[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
            continue;
        }
        Token t;
        t.pos = i;
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t j = i;
            while (j < s.size() && (std::isalnum(static_cast<unsigned char>(s[j])) || s[j] == '_')) ++j;
            t.kind = Token::Kind::Ident;
            t.text = std::string(s.substr(i, j - i));
            for (char ch : t.text) t.upper += static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
            i = j;
        } else if (std::isdigit(static_cast<unsigned char>(c))) {
            std::size_t j = i;
            std::uint64_t v = 0;
            while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) {
                const std::uint64_t d = static_cast<std::uint64_t>(s[j] - '0');
                if (v > (UINT64_MAX - d) / 10) throw ParseError("integer literal too large", 0);
                v = v * 10 + d;
                ++j;
            }
            t.kind = Token::Kind::Int;
            t.number = v;
            t.text = std::string(s.substr(i, j - i));
            i = j;
        } else if (c == '\'') {
            std::size_t j = i + 1;
            std::string v;
            while (true) {
                if (j >= s.size()) throw ParseError("unterminated string literal", 0);
                if (s[j] == '\'') {
                    if (j + 1 < s.size() && s[j + 1] == '\'') {
                        v += '\'';
                        j += 2;
                        continue;
                    }
                    break;
                }
                v += s[j++];
            }
            t.kind = Token::Kind::String;
            t.text = std::move(v);
            i = j + 1;
        } else {
            static const char* const kSymbols[] = {"<=>", "<>", "<=", ">=", "!=", "==", "<<", ">>", "||",
                                                   "=",   "<",  ">",  "(",  ")",  ",",  ".",  "*",  "+",
                                                   "-",   "/",  "%",  "&",  "|",  "~",  ";"};
            bool found = false;
            for (const char* sym : kSymbols) {
                std::string_view sv(sym);
                if (s.substr(i, sv.size()) == sv) {
                    t.kind = Token::Kind::Symbol;
                    t.text = std::string(sv);
                    i += sv.size();
                    found = true;
                    break;
                }
            }
            if (!found) throw ParseError(std::string("unexpected character '") + c + "'", 0);
        }
        out.push_back(std::move(t));
    }
    Token end;
    end.pos = s.size();
    out.push_back(end);
    return out;
}

class Parser {
public:
    Parser(std::string_view sql, const FeatureCatalog& cat) : cat_(cat), toks_(tokenize(sql)) {}

    Statement statement() {
        Statement st = statement_body();
        accept_symbol(";");
        expect_end();
        return st;
    }

    Select select_only() {
        Select s = select();
        accept_symbol(";");
        expect_end();
        return s;
    }

    Expr expression_only() {
        Expr e = expr();
        expect_end();
        return e;
    }

    FromItem from_only() {
        FromItem f = from_clause();
        expect_end();
        return f;
    }

private:
    const FeatureCatalog& cat_;
    std::vector<Token> toks_;
    std::size_t i_ = 0;

    const Token& peek(std::size_t k = 0) const { return toks_[std::min(i_ + k, toks_.size() - 1)]; }
    const Token& next() { return toks_[i_ < toks_.size() - 1 ? i_++ : i_]; }

    [[noreturn]] void fail(const std::string& what) const {
        throw ParseError(what + " at offset " + std::to_string(peek().pos), 0);
    }

    bool is_kw(const char* kw, std::size_t k = 0) const {
        return peek(k).kind == Token::Kind::Ident && peek(k).upper == kw;
    }
    bool accept_kw(const char* kw) {
        if (!is_kw(kw)) return false;
        ++i_;
        return true;
    }
    void expect_kw(const char* kw) {
        if (!accept_kw(kw)) fail(std::string("expected ") + kw);
    }
    bool is_symbol(const char* s, std::size_t k = 0) const {
        return peek(k).kind == Token::Kind::Symbol && peek(k).text == s;
    }
    bool accept_symbol(const char* s) {
        if (!is_symbol(s)) return false;
        ++i_;
        return true;
    }
    void expect_symbol(const char* s) {
        if (!accept_symbol(s)) fail(std::string("expected '") + s + "'");
    }
    void expect_end() {
        if (peek().kind != Token::Kind::End) fail("unexpected trailing input");
    }
    static bool reserved(const std::string& upper) {
        static const std::set<std::string, std::less<>> words{
            "SELECT", "FROM", "WHERE", "AND", "OR",    "NOT",   "AS",   "ON",      "JOIN",  "INNER",
            "LEFT",   "RIGHT", "FULL", "OUTER", "CROSS", "NATURAL", "DISTINCT", "CASE", "WHEN", "THEN",
            "ELSE",   "END",  "IS",    "IN",  "LIKE",  "BETWEEN", "EXISTS", "VALUES", "CREATE", "INSERT",
            "INTO",   "NULL", "TRUE",  "FALSE"};
        return words.count(upper) > 0;
    }
    std::string identifier() {
        if (peek().kind != Token::Kind::Ident || reserved(peek().upper)) fail("expected identifier");
        return next().text;
    }

    FeatureIndex feature(std::string_view id) const {
        if (auto f = cat_.find(id)) return *f;
        throw ParseError("unknown feature " + std::string(id), 0);
    }

    Expr call(std::string_view id, std::vector<Expr> args) const {
        const FeatureIndex f = feature(id);
        const auto& def = cat_.at(f);
        if (!def.signature) throw ParseError(std::string(id) + " is not an expression feature", 0);
        if (def.signature->params.size() != args.size())
            throw ParseError(std::string(id) + " expects " + std::to_string(def.signature->params.size()) +
                                 " operands, got " + std::to_string(args.size()),
                             0);
        return Expr::call(f, std::move(args));
    }

    Statement statement_body() {
        if (accept_kw("CREATE")) {
            if (accept_kw("TABLE")) {
                CreateTable t;
                t.name = identifier();
                expect_symbol("(");
                do {
                    ColumnSpec c;
                    c.name = identifier();
                    const Token& ty = next();
                    if (ty.kind != Token::Kind::Ident) fail("expected column type");
                    try {
                        c.type = parse_type_token(ty.upper);
                    } catch (const Error&) {
                        throw ParseError("unknown column type " + ty.text, 0);
                    }
                    t.columns.push_back(std::move(c));
                } while (accept_symbol(","));
                expect_symbol(")");
                return t;
            }
            bool unique = accept_kw("UNIQUE");
            if (accept_kw("INDEX")) {
                CreateIndex ix;
                ix.unique = unique;
                ix.name = identifier();
                expect_kw("ON");
                ix.table = identifier();
                expect_symbol("(");
                do {
                    ix.columns.push_back(identifier());
                } while (accept_symbol(","));
                expect_symbol(")");
                return ix;
            }
            if (!unique && accept_kw("VIEW")) {
                CreateView v;
                v.name = identifier();
                expect_kw("AS");
                v.select = select();
                return v;
            }
            fail("unsupported CREATE statement");
        }
        if (accept_kw("INSERT")) {
            expect_kw("INTO");
            Insert ins;
            ins.table = identifier();
            expect_symbol("(");
            do {
                ins.columns.push_back(identifier());
            } while (accept_symbol(","));
            expect_symbol(")");
            expect_kw("VALUES");
            do {
                expect_symbol("(");
                std::vector<Expr> row;
                do {
                    row.push_back(expr());
                } while (accept_symbol(","));
                expect_symbol(")");
                ins.rows.push_back(std::move(row));
            } while (accept_symbol(","));
            return ins;
        }
        if (accept_kw("ANALYZE")) return Analyze{};
        if (is_kw("SELECT")) return select();
        fail("unsupported statement");
    }

    Select select() {
        expect_kw("SELECT");
        Select s;
        s.distinct = accept_kw("DISTINCT");
        if (accept_symbol("*")) {
            s.star = true;
        } else {
            do {
                SelectItem it;
                it.expr = expr();
                if (accept_kw("AS")) it.alias = identifier();
                s.items.push_back(std::move(it));
            } while (accept_symbol(","));
        }
        if (accept_kw("FROM")) s.from = from_clause();
        if (accept_kw("WHERE")) s.where = expr();
        return s;
    }

    FromItem from_clause() {
        FromItem left = FromItem::leaf(identifier());
        while (true) {
            const char* id = nullptr;
            bool has_on = true;
            if (accept_kw("JOIN")) {
                id = "INNER_JOIN";
            } else if (is_kw("INNER") && is_kw("JOIN", 1)) {
                i_ += 2;
                id = "INNER_JOIN";
            } else if (is_kw("LEFT") || is_kw("RIGHT") || is_kw("FULL")) {
                const std::string kw = peek().upper;
                std::size_t k = 1;
                if (is_kw("OUTER", 1)) k = 2;
                if (!is_kw("JOIN", k)) break;
                i_ += k + 1;
                id = kw == "LEFT" ? "LEFT_JOIN" : kw == "RIGHT" ? "RIGHT_JOIN" : "FULL_JOIN";
            } else if (is_kw("CROSS") && is_kw("JOIN", 1)) {
                i_ += 2;
                id = "CROSS_JOIN";
                has_on = false;
            } else if (is_kw("NATURAL") && is_kw("JOIN", 1)) {
                i_ += 2;
                id = "NATURAL_JOIN";
                has_on = false;
            } else {
                break;
            }
            FromItem right = FromItem::leaf(identifier());
            std::optional<Expr> on;
            if (has_on) {
                expect_kw("ON");
                on = expr();
            }
            const FeatureIndex f = feature(id);
            const bool wants_on = cat_.at(f).signature.has_value();
            if (wants_on != on.has_value()) fail(std::string(id) + " ON clause mismatch with catalog");
            left = FromItem::make_join(f, std::move(left), std::move(right), std::move(on));
        }
        return left;
    }

    Expr expr() { return or_expr(); }

    Expr or_expr() {
        Expr e = and_expr();
        while (accept_kw("OR")) e = call("OR", {std::move(e), and_expr()});
        return e;
    }

    Expr and_expr() {
        Expr e = not_expr();
        while (accept_kw("AND")) e = call("AND", {std::move(e), not_expr()});
        return e;
    }

    Expr not_expr() {
        if (accept_kw("NOT")) return call("NOT", {not_expr()});
        return comparison();
    }

    Expr comparison() {
        Expr e = bitwise();
        while (true) {
            static const std::pair<const char*, const char*> kCmp[] = {
                {"=", "="}, {"==", "="}, {"!=", "!="}, {"<>", "<>"}, {"<", "<"},
                {"<=", "<="}, {">", ">"}, {">=", ">="}, {"<=>", "<=>"}};
            bool matched = false;
            for (const auto& [sym, id] : kCmp) {
                if (accept_symbol(sym)) {
                    e = call(id, {std::move(e), bitwise()});
                    matched = true;
                    break;
                }
            }
            if (matched) continue;
            if (accept_kw("ISNULL")) {
                e = call("ISNULL", {std::move(e)});
            } else if (accept_kw("NOTNULL")) {
                e = call("NOTNULL", {std::move(e)});
            } else if (accept_kw("IS")) {
                const bool neg = accept_kw("NOT");
                if (accept_kw("NULL")) {
                    e = call(neg ? "IS_NOT_NULL" : "IS_NULL", {std::move(e)});
                } else if (accept_kw("TRUE")) {
                    e = call(neg ? "IS_NOT_TRUE" : "IS_TRUE", {std::move(e)});
                } else if (accept_kw("FALSE")) {
                    e = call(neg ? "IS_NOT_FALSE" : "IS_FALSE", {std::move(e)});
                } else if (accept_kw("DISTINCT")) {
                    expect_kw("FROM");
                    e = call(neg ? "IS_NOT_DISTINCT_FROM" : "IS_DISTINCT_FROM", {std::move(e), bitwise()});
                } else {
                    fail("unsupported IS form");
                }
            } else if (is_kw("NOT") && (is_kw("LIKE", 1) || is_kw("BETWEEN", 1) || is_kw("IN", 1))) {
                ++i_;
                e = postfix_predicate(std::move(e), true);
            } else if (is_kw("LIKE") || is_kw("BETWEEN") || is_kw("IN")) {
                e = postfix_predicate(std::move(e), false);
            } else {
                return e;
            }
        }
    }

    Expr postfix_predicate(Expr lhs, bool neg) {
        if (accept_kw("LIKE")) return call(neg ? "NOT_LIKE" : "LIKE", {std::move(lhs), bitwise()});
        if (accept_kw("BETWEEN")) {
            Expr lo = bitwise();
            expect_kw("AND");
            Expr hi = bitwise();
            return call(neg ? "NOT_BETWEEN" : "BETWEEN", {std::move(lhs), std::move(lo), std::move(hi)});
        }
        expect_kw("IN");
        expect_symbol("(");
        std::vector<Expr> args{std::move(lhs)};
        do {
            args.push_back(expr());
        } while (accept_symbol(","));
        expect_symbol(")");
        return call(neg ? "NOT_IN" : "IN", std::move(args));
    }

    Expr bitwise() {
        Expr e = additive();
        while (true) {
            const char* id = accept_symbol("&")    ? "BIT_AND"
                             : accept_symbol("|")  ? "BIT_OR"
                             : accept_symbol("<<") ? "<<"
                             : accept_symbol(">>") ? ">>"
                                                   : nullptr;
            if (!id) return e;
            e = call(id, {std::move(e), additive()});
        }
    }

    Expr additive() {
        Expr e = multiplicative();
        while (true) {
            const char* id = accept_symbol("+") ? "+" : accept_symbol("-") ? "-" : nullptr;
            if (!id) return e;
            e = call(id, {std::move(e), multiplicative()});
        }
    }

    Expr multiplicative() {
        Expr e = concat();
        while (true) {
            const char* id = accept_symbol("*") ? "*" : accept_symbol("/") ? "/" : accept_symbol("%") ? "%" : nullptr;
            if (!id) return e;
            e = call(id, {std::move(e), concat()});
        }
    }

    Expr concat() {
        Expr e = unary();
        while (accept_symbol("||")) e = call("STR_CONCAT", {std::move(e), unary()});
        return e;
    }

    Expr unary() {
        if (is_symbol("-") && peek(1).kind == Token::Kind::Int && peek(1).pos == peek().pos + 1) {
            ++i_;
            const std::uint64_t v = next().number;
            if (v > std::uint64_t{1} << 63) fail("integer literal out of range");
            return Expr::constant(Value::integer(static_cast<std::int64_t>(0 - v)));
        }
        if (accept_symbol("-")) return call("UNARY_MINUS", {unary()});
        if (accept_symbol("+")) return call("UNARY_PLUS", {unary()});
        if (accept_symbol("~")) return call("~", {unary()});
        return primary();
    }

    Expr primary() {
        const Token& t = peek();
        if (t.kind == Token::Kind::Int) {
            if (t.number > static_cast<std::uint64_t>(INT64_MAX)) fail("integer literal out of range");
            ++i_;
            return Expr::constant(Value::integer(static_cast<std::int64_t>(t.number)));
        }
        if (t.kind == Token::Kind::String) {
            ++i_;
            return Expr::constant(Value::text(t.text));
        }
        if (accept_symbol("(")) {
            if (is_kw("SELECT")) fail("scalar subqueries are not supported");
            Expr e = expr();
            expect_symbol(")");
            return e;
        }
        if (t.kind != Token::Kind::Ident) fail("expected expression");
        if (accept_kw("NULL")) return Expr::constant(Value::null());
        if (accept_kw("TRUE")) return Expr::constant(Value::boolean(true));
        if (accept_kw("FALSE")) return Expr::constant(Value::boolean(false));
        if (accept_kw("EXISTS")) {
            expect_symbol("(");
            Select sub = select();
            expect_symbol(")");
            return Expr::exists(std::move(sub));
        }
        if (accept_kw("CASE")) {
            expect_kw("WHEN");
            Expr c = expr();
            expect_kw("THEN");
            Expr a = expr();
            expect_kw("ELSE");
            Expr b = expr();
            expect_kw("END");
            return call("CASE", {std::move(c), std::move(a), std::move(b)});
        }
        if (is_symbol("(", 1)) {
            const std::string name = next().upper;
            ++i_;
            std::vector<Expr> args;
            if (!is_symbol(")")) {
                do {
                    args.push_back(expr());
                } while (accept_symbol(","));
            }
            expect_symbol(")");
            const auto f = cat_.find(name);
            if (!f || cat_.at(*f).category != FeatureCategory::Function)
                throw ParseError("unknown function " + name, 0);
            return call(name, std::move(args));
        }
        std::string first = identifier();
        if (accept_symbol(".")) return Expr::column_ref(std::move(first), identifier(), DataType::Untyped);
        return Expr::column_ref("", std::move(first), DataType::Untyped);
    }
};

}  // namespace

Statement parse_statement(std::string_view sql, const FeatureCatalog& cat) { return Parser(sql, cat).statement(); }
Select parse_select(std::string_view sql, const FeatureCatalog& cat) { return Parser(sql, cat).select_only(); }
Expr parse_expression(std::string_view sql, const FeatureCatalog& cat) { return Parser(sql, cat).expression_only(); }
FromItem parse_from(std::string_view sql, const FeatureCatalog& cat) { return Parser(sql, cat).from_only(); }

}  // namespace adaquery::sql
