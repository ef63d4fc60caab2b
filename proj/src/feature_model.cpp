#include "adaquery/feature_model.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "adaquery/error.hpp"

namespace adaquery {

std::string_view to_string(FeatureState s) {
    switch (s) {
        case FeatureState::Unknown: return "Unknown";
        case FeatureState::Supported: return "Supported";
        case FeatureState::Unsupported: return "Unsupported";
    }
    return "?";
}

FeatureState parse_state(std::string_view s) {
    if (s == "Unknown") return FeatureState::Unknown;
    if (s == "Supported") return FeatureState::Supported;
    if (s == "Unsupported") return FeatureState::Unsupported;
    throw Error("unknown feature state '" + std::string(s) + "'");
}

void InferenceConfig::validate() const {
    if (!(threshold_p > 0 && threshold_p < 1)) throw Error("threshold_p must lie in (0,1)");
    if (ddl_fail_limit == 0) throw Error("ddl_fail_limit must be positive");
    if (update_interval == 0) throw Error("update interval must be positive");
}

std::pair<std::uint64_t, std::uint64_t> posterior_params(const FeatureStats& s) {
    return {s.successes + 1, s.executions - s.successes + 1};
}

double prob_below_threshold(const FeatureStats& s, double p) {
    if (!(p > 0 && p < 1)) throw Error("threshold must lie in (0,1)");
    if (s.successes > s.executions) throw Error("successes exceed executions");
    // P[X > y] for X ~ Binomial(n = N+1, p).
    const double n = static_cast<double>(s.executions) + 1;
    const double first = static_cast<double>(s.successes) + 1;
    const double q = 1 - p;
    const double lp = std::log(p), lq = std::log1p(-p);
    // Start at the larger of the mode and the first summed index so the
    // starting term is never an underflowed zero.
    const double mode = std::floor((n + 1) * p);
    const double start = std::max(first, std::min(mode, n));
    const double log_start = std::lgamma(n + 1) - std::lgamma(start + 1) - std::lgamma(n - start + 1) +
                             start * lp + (n - start) * lq;
    const double t0 = std::exp(log_start);
    double sum = t0;
    double t = t0;
    for (double j = start; j < n; ++j) {
        t *= (n - j) / (j + 1) * (p / q);
        sum += t;
        if (t < sum * 1e-18) break;
    }
    t = t0;
    for (double j = start; j > first; --j) {
        t *= j / (n - j + 1) * (q / p);
        sum += t;
        if (t < sum * 1e-18) break;
    }
    return std::min(sum, 1.0);
}

FeatureState classify_query_feature(const FeatureStats& s, const InferenceConfig& cfg) {
    if (prob_below_threshold(s, cfg.threshold_p) >= InferenceConfig::confidence) return FeatureState::Unsupported;
    return s.executions > 0 ? FeatureState::Supported : FeatureState::Unknown;
}

FeatureState classify_ddl_feature(const FeatureStats& s, const InferenceConfig& cfg) {
    if (s.successes > 0) return FeatureState::Supported;
    if (s.executions >= cfg.ddl_fail_limit) return FeatureState::Unsupported;
    return FeatureState::Unknown;
}

ChoiceContext make_context(std::string rule, std::vector<FeatureIndex> alternatives) {
    ChoiceContext ctx{std::move(rule), std::move(alternatives), {}};
    ctx.weights.assign(ctx.alternatives.size(), ctx.alternatives.empty() ? 0.0 : 1.0 / ctx.alternatives.size());
    return ctx;
}

ChoiceContext redistribute(const ChoiceContext& ctx, const std::vector<FeatureState>& states) {
    ChoiceContext out{ctx.rule_name, ctx.alternatives, std::vector<double>(ctx.alternatives.size(), 0.0)};
    std::size_t k = 0;
    for (FeatureIndex f : ctx.alternatives) k += states.at(f) != FeatureState::Unsupported;
    if (k == 0) throw RuleExhaustedError("every alternative of rule '" + ctx.rule_name + "' is unsupported");
    const double w = 1.0 / static_cast<double>(k);
    for (std::size_t i = 0; i < ctx.alternatives.size(); ++i)
        if (states.at(ctx.alternatives[i]) != FeatureState::Unsupported) out.weights[i] = w;
    return out;
}

std::string serialize_stats(const StatsTable& t) {
    std::string out = "adaquery-stats v1\n";
    for (const auto& [id, s] : t) {
        out += id;
        out += '\t' + std::to_string(s.executions) + '\t' + std::to_string(s.successes) + '\t';
        out += to_string(s.state);
        out += '\n';
    }
    return out;
}

namespace {

std::uint64_t parse_count(std::string_view s, std::size_t line) {
    if (s.empty() || s.size() > 19) throw ParseError("bad count '" + std::string(s) + "'", line);
    std::uint64_t v = 0;
    for (char c : s) {
        if (c < '0' || c > '9') throw ParseError("bad count '" + std::string(s) + "'", line);
        v = v * 10 + static_cast<std::uint64_t>(c - '0');
    }
    return v;
}

}  // namespace

StatsTable parse_stats(std::string_view text) {
    StatsTable t;
    std::size_t lineno = 0;
    bool header = false;
    while (!text.empty()) {
        ++lineno;
        auto nl = text.find('\n');
        if (nl == std::string_view::npos) throw ParseError("missing final newline", lineno);
        std::string_view line = text.substr(0, nl);
        text.remove_prefix(nl + 1);
        if (!header) {
            if (line != "adaquery-stats v1") throw ParseError("expected header 'adaquery-stats v1'", lineno);
            header = true;
            continue;
        }
        std::vector<std::string_view> fields;
        std::size_t pos = 0;
        while (true) {
            auto tab = line.find('\t', pos);
            fields.push_back(line.substr(pos, tab == std::string_view::npos ? tab : tab - pos));
            if (tab == std::string_view::npos) break;
            pos = tab + 1;
        }
        if (fields.size() != 4) throw ParseError("expected ID<TAB>N<TAB>y<TAB>STATE", lineno);
        if (!valid_feature_id(fields[0])) throw ParseError("invalid feature id", lineno);
        FeatureStats s;
        s.executions = parse_count(fields[1], lineno);
        s.successes = parse_count(fields[2], lineno);
        if (s.successes > s.executions) throw ParseError("y exceeds N", lineno);
        try {
            s.state = parse_state(fields[3]);
        } catch (const Error& e) {
            throw ParseError(e.what(), lineno);
        }
        if (!t.emplace(std::string(fields[0]), s).second) throw ParseError("duplicate feature id", lineno);
    }
    if (!header) throw ParseError("empty stats file", 1);
    return t;
}

void persist_stats(const StatsTable& t, const std::filesystem::path& path) {
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot write " + tmp.string());
        out << serialize_stats(t);
        if (!out) throw Error("write failed: " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

StatsTable load_stats(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot read " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_stats(ss.str());
}

FeatureStore::FeatureStore(const FeatureCatalog& catalog)
    : catalog_(&catalog),
      counters_(new std::atomic<std::uint64_t>[catalog.size()]),
      states_(catalog.size(), FeatureState::Unknown) {
    for (std::size_t i = 0; i < catalog.size(); ++i) counters_[i].store(0, std::memory_order_relaxed);
}

void FeatureStore::record_outcome(const std::vector<FeatureIndex>& features, bool success) {
    const std::uint64_t delta = (std::uint64_t{1} << 32) | (success ? 1u : 0u);
    for (FeatureIndex f : features) {
        if (f >= catalog_->size()) throw CatalogError("feature index out of range");
        counters_[f].fetch_add(delta, std::memory_order_relaxed);
    }
}

void FeatureStore::record_outcome(const std::vector<std::string>& features, bool success) {
    std::vector<FeatureIndex> idx;
    idx.reserve(features.size());
    for (const auto& id : features) idx.push_back(catalog_->index(id));
    record_outcome(idx, success);
}

FeatureStats FeatureStore::stats(FeatureIndex f) const {
    const std::uint64_t w = counters_[f].load(std::memory_order_relaxed);
    return {w >> 32, w & 0xffffffffu, states_[f]};
}

std::vector<FeatureIndex> FeatureStore::reclassify(const InferenceConfig& cfg) {
    std::vector<FeatureIndex> fresh;
    for (FeatureIndex f = 0; f < catalog_->size(); ++f) {
        if (states_[f] == FeatureState::Unsupported) continue;
        const FeatureStats s = stats(f);
        const FeatureState next =
            catalog_->uses_ddl_rule(f) ? classify_ddl_feature(s, cfg) : classify_query_feature(s, cfg);
        if (next == FeatureState::Unsupported) fresh.push_back(f);
        states_[f] = next;
    }
    return fresh;
}

StatsTable FeatureStore::table() const {
    StatsTable t;
    for (FeatureIndex f = 0; f < catalog_->size(); ++f) t.emplace(catalog_->id(f), stats(f));
    return t;
}

void FeatureStore::assign(const StatsTable& t) {
    std::vector<std::pair<FeatureIndex, FeatureStats>> resolved;
    for (const auto& [id, s] : t) {
        if (s.executions >= (std::uint64_t{1} << 32)) throw Error("counter too large for " + id);
        resolved.emplace_back(catalog_->index(id), s);
    }
    for (FeatureIndex f = 0; f < catalog_->size(); ++f) {
        counters_[f].store(0, std::memory_order_relaxed);
        states_[f] = FeatureState::Unknown;
    }
    for (const auto& [f, s] : resolved) {
        counters_[f].store((s.executions << 32) | s.successes, std::memory_order_relaxed);
        states_[f] = s.state;
    }
}

}  // namespace adaquery
