#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "adaquery/oracles.hpp"
#include "adaquery/prioritizer.hpp"
#include "adaquery/reducer.hpp"

namespace adaquery {

struct BugRecord {
    std::uint64_t id = 0;
    FeatureIdSet feature_set;
    TestCase test_case;
    TestCase original;
    OracleVerdict verdict;
    Classification classification;
    bool reduced = false;
};

// `bug-000001`
std::string record_name(std::uint64_t id);

// Header comments (oracle, base/from, predicate), setup statements, then the
// check queries after `-- check`.
std::string render_reproducer(const TestCase& tc, const FeatureCatalog& cat);
// Throws ParseError on malformed files.
TestCase parse_reproducer(std::string_view text, const FeatureCatalog& cat);

std::string render_verdict(const OracleVerdict& v);

// Writes dir/<record_name>/ with reproduce.sql, reproduce.orig.sql,
// oracle.txt, features.txt, classification.txt.
void write_report(const std::filesystem::path& dir, const BugRecord& r, const FeatureCatalog& cat);

struct RecheckEntry {
    std::string name;
    enum class Outcome { Fail, Pass, Skip, Missing } outcome = Outcome::Missing;
    std::string message;
};

std::string_view to_string(RecheckEntry::Outcome o);

// Replays every <dir>/bug-*/reproduce.sql on a fresh instance of `target`.
std::vector<RecheckEntry> recheck(const std::filesystem::path& dir, const TargetSpec& target,
                                  const FeatureCatalog& cat = FeatureCatalog::builtin());

}  // namespace adaquery
