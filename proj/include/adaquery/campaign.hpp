#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "adaquery/adapter.hpp"
#include "adaquery/feature_model.hpp"
#include "adaquery/generator.hpp"
#include "adaquery/prioritizer.hpp"
#include "adaquery/reducer.hpp"

namespace adaquery {

enum class OracleChoice { TLP, NoREC, Both };

std::string_view to_string(OracleChoice c);
OracleChoice parse_oracle_choice(std::string_view s);

struct CampaignConfig {
    TargetSpec target;
    OracleChoice oracle = OracleChoice::TLP;
    InferenceConfig inference;
    GenConfig gen;
    // Physical statement budget; unlimited when unset (duration must be set).
    std::optional<std::uint64_t> budget;
    std::optional<double> duration_seconds;
    int workers = 1;
    std::filesystem::path out;
    // Loaded if present, persisted on exit. Defaults to <out>/stats.tsv.
    std::optional<std::filesystem::path> stats_file;
    bool feedback = true;
    bool isolate_stats = false;
    bool reduce = true;
    std::uint64_t checks_per_round = 2000;

    // Test hook: every executed statement, its generation features and outcome.
    std::function<void(const std::string& sql, const sql::FeatureSet& features, bool ok)> on_statement;

    // Throws Error on inconsistent settings.
    void validate() const;
};

struct WindowMetrics {
    std::uint64_t window = 0;
    std::uint64_t executed = 0;
    std::uint64_t succeeded = 0;
    double validity = 0.0;
    std::uint64_t bugs_new = 0;
    std::uint64_t bugs_dup = 0;
    std::uint64_t statements = 0;
    int depth = 1;
};

struct RecordSummary {
    std::uint64_t id = 0;
    FeatureIdSet feature_set;
    Classification classification;
    bool reduced = false;
    TestCase test_case;
};

struct CampaignMetrics {
    std::vector<WindowMetrics> windows;
    std::uint64_t statements = 0;
    std::uint64_t executed = 0;
    std::uint64_t succeeded = 0;
    std::uint64_t bugs = 0;
    std::uint64_t bugs_new = 0;
    std::map<FeatureState, std::size_t> features_by_state;
    std::vector<RecordSummary> records;
    StatsTable stats;
    bool fatal = false;
    std::string fatal_message;
};

// Windows of I physical statements; feedback, depth schedule and bug
// processing happen at window boundaries while workers are paused.
CampaignMetrics run_campaign(const CampaignConfig& cfg, const FeatureCatalog& cat = FeatureCatalog::builtin());

std::string metrics_header();
std::string format_window(const WindowMetrics& w);

}  // namespace adaquery
