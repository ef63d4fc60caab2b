#pragma once

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "adaquery/feature_catalog.hpp"

namespace adaquery {

enum class FeatureState { Unknown, Supported, Unsupported };

std::string_view to_string(FeatureState s);
FeatureState parse_state(std::string_view s);

struct FeatureStats {
    std::uint64_t executions = 0;  // N
    std::uint64_t successes = 0;   // y
    FeatureState state = FeatureState::Unknown;

    bool operator==(const FeatureStats&) const = default;
};

struct InferenceConfig {
    double threshold_p = 0.01;
    static constexpr double confidence = 0.95;
    std::uint64_t ddl_fail_limit = 20;
    std::uint64_t update_interval = 100000;

    // Throws Error on out-of-range values.
    void validate() const;
};

// Beta(y+1, N-y+1).
std::pair<std::uint64_t, std::uint64_t> posterior_params(const FeatureStats& s);

// Posterior CDF at p, I_p(y+1, N-y+1), via the exact binomial tail
// sum_{j=y+1}^{N+1} C(N+1,j) p^j (1-p)^(N+1-j).
double prob_below_threshold(const FeatureStats& s, double p);

FeatureState classify_query_feature(const FeatureStats& s, const InferenceConfig& cfg);
FeatureState classify_ddl_feature(const FeatureStats& s, const InferenceConfig& cfg);

struct ChoiceContext {
    std::string rule_name;
    std::vector<FeatureIndex> alternatives;
    std::vector<double> weights;
};

// Uniform initial weights over the alternatives.
ChoiceContext make_context(std::string rule, std::vector<FeatureIndex> alternatives);

// Zero weight for Unsupported alternatives, 1/k for the k others.
// Throws RuleExhaustedError when every alternative is Unsupported.
ChoiceContext redistribute(const ChoiceContext& ctx, const std::vector<FeatureState>& states);

// Plain-data view of the store, keyed by feature id; the persisted form.
using StatsTable = std::map<std::string, FeatureStats>;

std::string serialize_stats(const StatsTable& t);
StatsTable parse_stats(std::string_view text);
void persist_stats(const StatsTable& t, const std::filesystem::path& path);
StatsTable load_stats(const std::filesystem::path& path);

// Shared counters for all workers. (N, y) of a feature live in one 64-bit
// word so a pair update is a single atomic add. States change only in
// reclassify, which the coordinator calls while workers are paused.
class FeatureStore {
public:
    explicit FeatureStore(const FeatureCatalog& catalog);

    const FeatureCatalog& catalog() const { return *catalog_; }

    void record_outcome(const std::vector<FeatureIndex>& features, bool success);
    // Id-based variant; throws CatalogError for unknown ids.
    void record_outcome(const std::vector<std::string>& features, bool success);

    FeatureStats stats(FeatureIndex f) const;
    FeatureState state(FeatureIndex f) const { return states_[f]; }
    const std::vector<FeatureState>& states() const { return states_; }
    void set_state(FeatureIndex f, FeatureState s) { states_[f] = s; }

    // Applies the classification rules. Unsupported is sticky.
    // Returns features that became Unsupported in this call.
    std::vector<FeatureIndex> reclassify(const InferenceConfig& cfg);

    StatsTable table() const;
    // Replaces counters and states with those of `t`; unknown ids throw CatalogError.
    void assign(const StatsTable& t);

private:
    const FeatureCatalog* catalog_;
    std::unique_ptr<std::atomic<std::uint64_t>[]> counters_;
    std::vector<FeatureState> states_;
};

}  // namespace adaquery
