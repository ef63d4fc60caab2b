#include "adaquery/report.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "adaquery/error.hpp"
#include "adaquery/parser.hpp"

namespace adaquery {

namespace fs = std::filesystem;

std::string record_name(std::uint64_t id) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "bug-%06llu", static_cast<unsigned long long>(id));
    return buf;
}

std::string render_reproducer(const TestCase& tc, const FeatureCatalog& cat) {
    std::string out = "-- oracle: " + std::string(to_string(tc.oracle)) + "\n";
    if (tc.oracle == OracleKind::TLP) {
        out += "-- base: " + sql::render(tc.base, cat) + "\n";
    } else {
        out += "-- from: " + sql::render(*tc.base.from, cat) + "\n";
    }
    out += "-- predicate: " + sql::render(tc.predicate, cat) + "\n";
    for (const auto& s : tc.setup) out += s + ";\n";
    out += "-- check\n";
    for (const auto& q : tc.queries(cat)) out += q.sql + ";\n";
    return out;
}

TestCase parse_reproducer(std::string_view text, const FeatureCatalog& cat) {
    TestCase tc;
    bool have_oracle = false, have_source = false, have_predicate = false, in_check = false;
    std::size_t line_no = 0;
    std::istringstream in{std::string(text)};
    std::string line;
    auto header = [&](std::string_view key) -> std::optional<std::string> {
        const std::string prefix = "-- " + std::string(key) + ": ";
        if (line.rfind(prefix, 0) != 0) return std::nullopt;
        return line.substr(prefix.size());
    };
    while (std::getline(in, line)) {
        ++line_no;
        if (in_check || line.empty()) continue;
        try {
            if (auto v = header("oracle")) {
                tc.oracle = parse_oracle_kind(*v);
                have_oracle = true;
            } else if (auto b = header("base")) {
                tc.base = sql::parse_select(*b, cat);
                have_source = true;
            } else if (auto f = header("from")) {
                tc.base = sql::Select{};
                tc.base.star = true;
                tc.base.from = sql::parse_from(*f, cat);
                have_source = true;
            } else if (auto p = header("predicate")) {
                tc.predicate = sql::parse_expression(*p, cat);
                have_predicate = true;
            } else if (line == "-- check") {
                in_check = true;
            } else if (line.rfind("--", 0) == 0) {
                continue;
            } else {
                if (line.back() != ';') throw ParseError("statement must end with ';'", line_no);
                tc.setup.push_back(line.substr(0, line.size() - 1));
            }
        } catch (const ParseError& e) {
            if (e.line()) throw;
            throw ParseError(e.what(), line_no);
        } catch (const Error& e) {
            throw ParseError(e.what(), line_no);
        }
    }
    if (!have_oracle || !have_source || !have_predicate || !in_check)
        throw ParseError("missing reproducer header or check section", 0);
    return tc;
}

namespace {

void append_rows(std::string& out, const ResultSet& r) {
    for (const auto& row : r.rows) {
        out += " ";
        for (std::size_t i = 0; i < row.size(); ++i) out += (i ? " | " : " ") + row[i].display();
        out += "\n";
    }
}

void write_file(const fs::path& p, const std::string& text) {
    std::ofstream f(p, std::ios::binary);
    f << text;
    if (!f) throw Error("cannot write " + p.string());
}

}  // namespace

std::string render_verdict(const OracleVerdict& v) {
    std::string out = "oracle: " + std::string(to_string(v.oracle)) + "\n";
    out += "status: " + std::string(to_string(v.status)) + "\n";
    if (!v.reason.empty()) out += "reason: " + v.reason + "\n";
    out += "original: " + v.original_query + "\n";
    for (const auto& d : v.derived_queries) out += "derived: " + d + "\n";
    out += "original result (" + std::to_string(v.original_result.rows.size()) + " rows):\n";
    append_rows(out, v.original_result);
    out += "derived result (" + std::to_string(v.derived_result.rows.size()) + " rows):\n";
    append_rows(out, v.derived_result);
    return out;
}

void write_report(const fs::path& dir, const BugRecord& r, const FeatureCatalog& cat) {
    const fs::path d = dir / record_name(r.id);
    fs::create_directories(d);
    write_file(d / "reproduce.sql", render_reproducer(r.test_case, cat));
    write_file(d / "reproduce.orig.sql", render_reproducer(r.original, cat));
    write_file(d / "oracle.txt", render_verdict(r.verdict));
    std::string features;
    for (const auto& f : r.feature_set) features += f + "\n";
    write_file(d / "features.txt", features);
    write_file(d / "classification.txt", to_string(r.classification) + (r.reduced ? "\n" : "\nunreduced\n"));
}

std::string_view to_string(RecheckEntry::Outcome o) {
    switch (o) {
        case RecheckEntry::Outcome::Fail: return "Fail";
        case RecheckEntry::Outcome::Pass: return "Pass";
        case RecheckEntry::Outcome::Skip: return "Skip";
        case RecheckEntry::Outcome::Missing: return "Missing";
    }
    return "?";
}

std::vector<RecheckEntry> recheck(const fs::path& dir, const TargetSpec& target, const FeatureCatalog& cat) {
    std::vector<RecheckEntry> out;
    if (!fs::is_directory(dir)) return out;
    std::vector<fs::path> records;
    for (const auto& e : fs::directory_iterator(dir))
        if (e.is_directory() && e.path().filename().string().rfind("bug-", 0) == 0) records.push_back(e.path());
    std::sort(records.begin(), records.end());
    for (const auto& rec : records) {
        RecheckEntry entry;
        entry.name = rec.filename().string();
        const fs::path file = rec / "reproduce.sql";
        std::ifstream f(file, std::ios::binary);
        if (!f) {
            entry.message = "missing " + file.string();
            out.push_back(std::move(entry));
            continue;
        }
        std::stringstream ss;
        ss << f.rdbuf();
        try {
            const TestCase tc = parse_reproducer(ss.str(), cat);
            const OracleVerdict v = replay(tc, target, cat);
            switch (v.status) {
                case OracleVerdict::Status::Fail: entry.outcome = RecheckEntry::Outcome::Fail; break;
                case OracleVerdict::Status::Pass: entry.outcome = RecheckEntry::Outcome::Pass; break;
                case OracleVerdict::Status::Skip: entry.outcome = RecheckEntry::Outcome::Skip; break;
            }
            entry.message = v.reason;
        } catch (const ParseError& e) {
            entry.message = std::string("malformed reproducer: ") + e.what();
        }
        out.push_back(std::move(entry));
    }
    return out;
}

}  // namespace adaquery
