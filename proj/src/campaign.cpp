#include "adaquery/campaign.hpp"

#include <chrono>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <thread>

#include "adaquery/error.hpp"
#include "adaquery/report.hpp"

namespace adaquery {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

std::string_view to_string(OracleChoice c) {
    switch (c) {
        case OracleChoice::TLP: return "tlp";
        case OracleChoice::NoREC: return "norec";
        case OracleChoice::Both: return "both";
    }
    return "?";
}

OracleChoice parse_oracle_choice(std::string_view s) {
    if (s == "tlp") return OracleChoice::TLP;
    if (s == "norec") return OracleChoice::NoREC;
    if (s == "both") return OracleChoice::Both;
    throw Error("unknown oracle '" + std::string(s) + "' (expected tlp, norec or both)");
}

void CampaignConfig::validate() const {
    inference.validate();
    if (workers < 1) throw Error("workers must be at least 1");
    if (!budget && !duration_seconds) throw Error("a statement budget or a duration is required");
    if (duration_seconds && *duration_seconds < 0) throw Error("duration must be non-negative");
    if (inference.update_interval == 0) throw Error("update interval must be positive");
    if (checks_per_round == 0) throw Error("checks per round must be positive");
    if (out.empty()) throw Error("an output directory is required");
}

std::string metrics_header() { return "window\texecuted\tsucceeded\tvalidity\tbugs_new\tbugs_dup\n"; }

std::string format_window(const WindowMetrics& w) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "%llu\t%llu\t%llu\t%.6f\t%llu\t%llu\n", static_cast<unsigned long long>(w.window),
                  static_cast<unsigned long long>(w.executed), static_cast<unsigned long long>(w.succeeded), w.validity,
                  static_cast<unsigned long long>(w.bugs_new), static_cast<unsigned long long>(w.bugs_dup));
    return buf;
}

namespace {

struct Candidate {
    TestCase test_case;
    OracleVerdict verdict;
};

std::vector<FeatureIndex> as_vector(const sql::FeatureSet& s) { return {s.begin(), s.end()}; }

class Worker {
public:
    Worker(int index, const CampaignConfig& cfg, const FeatureCatalog& cat, FeatureStore& store,
           std::mutex& observer_mu)
        : index_(index),
          cfg_(cfg),
          cat_(cat),
          store_(store),
          observer_mu_(observer_mu),
          rng_(derive_seed(cfg.gen.seed, static_cast<std::uint64_t>(index))),
          gen_(cat, cfg.gen) {
        gen_.set_states(store.states());
    }

    Generator& generator() { return gen_; }
    FeatureStore& store() { return store_; }

    // Runs test cases until `quota` statements (minus earlier overshoot) are
    // used or the deadline passes.
    void run_window(std::uint64_t quota, std::optional<Clock::time_point> deadline) {
        executed = succeeded = statements = 0;
        candidates.clear();
        const std::int64_t target = static_cast<std::int64_t>(quota) + credit_;
        std::int64_t used = 0;
        int idle = 0;
        try {
            while (used < target) {
                if (deadline && Clock::now() >= *deadline) {
                    stopped = true;
                    break;
                }
                const std::uint64_t before = statements;
                step();
                const auto delta = static_cast<std::int64_t>(statements - before);
                used += delta;
                idle = delta ? 0 : idle + 1;
                if (idle > 1000) throw GenerationExhaustedError("no statement could be generated");
            }
        } catch (const FatalAdapterError& e) {
            fatal = "fatal adapter error: " + std::string(e.what());
        } catch (const GenerationExhaustedError& e) {
            fatal = e.what();
        }
        credit_ = target - used;
        if (credit_ > 0) credit_ = 0;
    }

    std::uint64_t executed = 0;
    std::uint64_t succeeded = 0;
    std::uint64_t statements = 0;
    std::vector<Candidate> candidates;
    std::string fatal;
    bool stopped = false;

private:
    const int index_;
    const CampaignConfig& cfg_;
    const FeatureCatalog& cat_;
    FeatureStore& store_;
    std::mutex& observer_mu_;
    Rng rng_;
    Generator gen_;
    std::unique_ptr<Adapter> adapter_;
    SchemaModel schema_;
    std::vector<std::string> setup_log_;
    std::vector<sql::StatementKind> plan_;
    std::size_t plan_pos_ = 0;
    int table_retries_ = 0;
    bool in_setup_ = false;
    std::uint64_t checks_ = 0;
    std::int64_t credit_ = 0;
    bool round_open_ = false;

    void observe(const std::string& sql, const sql::FeatureSet& f, bool ok) {
        if (!cfg_.on_statement) return;
        std::lock_guard lock(observer_mu_);
        cfg_.on_statement(sql, f, ok);
    }

    void start_round() {
        using K = sql::StatementKind;
        if (adapter_) adapter_->close();
        adapter_ = open_target(cfg_.target, "w" + std::to_string(index_));
        schema_ = SchemaModel{};
        setup_log_.clear();
        plan_.clear();
        plan_pos_ = 0;
        table_retries_ = 0;
        checks_ = 0;
        const auto tables = rng_.range(1, std::max(1, cfg_.gen.max_tables));
        for (std::int64_t i = 0; i < tables; ++i) plan_.push_back(K::CreateTable);
        for (std::int64_t i = 0; i < tables; ++i) {
            const auto inserts = rng_.range(1, 3);
            for (std::int64_t j = 0; j < inserts; ++j) plan_.push_back(K::Insert);
        }
        const auto indexes = rng_.range(0, 2);
        for (std::int64_t i = 0; i < indexes; ++i) plan_.push_back(K::CreateIndex);
        for (int i = 0; i < cfg_.gen.max_views; ++i)
            if (rng_.chance(0.5)) plan_.push_back(K::CreateView);
        if (rng_.chance(0.3)) plan_.push_back(K::Analyze);
        in_setup_ = true;
        round_open_ = true;
    }

    void setup_step() {
        const sql::StatementKind kind = plan_[plan_pos_++];
        std::optional<GeneratedStatement> st;
        try {
            st = gen_.generate_statement(kind, schema_, rng_);
        } catch (const EmptySchemaError&) {
            return;
        }
        if (!st) return;
        const StagedObject staged = schema_.stage(st->ast);
        const ExecutionStatus status = adapter_->execute(st->sql);
        if (status.fatal()) throw FatalAdapterError(status.message);
        store_.record_outcome(as_vector(st->features), status.ok());
        schema_.commit(staged, status);
        ++statements;
        ++executed;
        if (status.ok()) {
            ++succeeded;
            setup_log_.push_back(st->sql);
        } else if (kind == sql::StatementKind::CreateTable && table_retries_ < 5) {
            ++table_retries_;
            plan_.insert(plan_.begin() + static_cast<std::ptrdiff_t>(plan_pos_), kind);
        }
        observe(st->sql, st->features, status.ok());
    }

    std::optional<OracleKind> pick_oracle() {
        const bool tlp = gen_.should_generate("NOT") && gen_.should_generate("IS_NULL");
        const bool norec = gen_.should_generate("IS_TRUE");
        switch (cfg_.oracle) {
            case OracleChoice::TLP:
                if (tlp) return OracleKind::TLP;
                break;
            case OracleChoice::NoREC:
                if (norec) return OracleKind::NoREC;
                break;
            case OracleChoice::Both: {
                const bool first = rng_.chance(0.5);
                if (tlp && (first || !norec)) return OracleKind::TLP;
                if (norec) return OracleKind::NoREC;
                break;
            }
        }
        return std::nullopt;
    }

    void check_step() {
        ++checks_;
        auto qc = gen_.generate_query(schema_, rng_);
        if (!qc) return;
        auto kind = pick_oracle();
        if (!kind) return;
        TestCase tc{setup_log_, *kind, std::move(qc->base), std::move(qc->predicate)};
        const auto planned = tc.queries(cat_);
        OracleVerdict v = run_check(tc, *adapter_, cat_);
        bool ok = v.statuses.size() == planned.size();
        for (std::size_t i = 0; i < v.statuses.size(); ++i) {
            store_.record_outcome(as_vector(planned[i].features), v.statuses[i].ok());
            ok &= v.statuses[i].ok();
            observe(planned[i].sql, planned[i].features, v.statuses[i].ok());
        }
        statements += v.statuses.size();
        ++executed;
        if (ok) ++succeeded;
        if (v.failed()) candidates.push_back({std::move(tc), std::move(v)});
    }

    void step() {
        if (!round_open_ || checks_ >= cfg_.checks_per_round) start_round();
        if (in_setup_) {
            if (plan_pos_ < plan_.size()) {
                setup_step();
                return;
            }
            in_setup_ = false;
            const ExecutionStatus post = adapter_->post_setup();
            if (post.fatal()) throw FatalAdapterError(post.message);
            if (schema_.empty()) {
                round_open_ = false;
                return;
            }
        }
        check_step();
    }
};

StatsTable merged_stats(const std::vector<std::unique_ptr<FeatureStore>>& stores) {
    StatsTable out = stores[0]->table();
    for (std::size_t i = 1; i < stores.size(); ++i) {
        for (const auto& [id, s] : stores[i]->table()) {
            FeatureStats& m = out[id];
            m.executions += s.executions;
            m.successes += s.successes;
            if (s.state == FeatureState::Unsupported ||
                (s.state == FeatureState::Supported && m.state == FeatureState::Unknown))
                m.state = s.state;
        }
    }
    return out;
}

}  // namespace

CampaignMetrics run_campaign(const CampaignConfig& cfg, const FeatureCatalog& cat) {
    cfg.validate();
    fs::create_directories(cfg.out);
    const fs::path stats_path = cfg.stats_file ? *cfg.stats_file : cfg.out / "stats.tsv";
    const fs::path bug_dir = cfg.out / "bugs";

    std::vector<std::unique_ptr<FeatureStore>> stores;
    const int n_stores = cfg.isolate_stats ? cfg.workers : 1;
    std::optional<StatsTable> warm;
    if (fs::exists(stats_path)) warm = load_stats(stats_path);
    for (int i = 0; i < n_stores; ++i) {
        stores.push_back(std::make_unique<FeatureStore>(cat));
        if (warm) stores.back()->assign(*warm);
    }

    std::mutex observer_mu;
    std::vector<std::unique_ptr<Worker>> workers;
    for (int i = 0; i < cfg.workers; ++i)
        workers.push_back(std::make_unique<Worker>(i, cfg, cat, *stores[cfg.isolate_stats ? i : 0], observer_mu));

    std::ofstream metrics_file(cfg.out / "metrics.tsv", std::ios::binary | std::ios::trunc);
    metrics_file << metrics_header();

    CampaignMetrics m;
    HistoryStore history;
    std::uint64_t next_id = 1;
    const std::uint64_t interval = cfg.inference.update_interval;
    std::optional<Clock::time_point> deadline;
    if (cfg.duration_seconds)
        deadline = Clock::now() + std::chrono::duration_cast<Clock::duration>(
                                      std::chrono::duration<double>(*cfg.duration_seconds));
    std::uint64_t assigned = 0;

    auto process = [&](Candidate& c, WindowMetrics& w) {
        auto fails = [&](const TestCase& t) { return replay(t, cfg.target, cat).failed(); };
        BugRecord r;
        r.id = next_id++;
        r.original = c.test_case;
        r.verdict = c.verdict;
        if (cfg.reduce) {
            ReduceResult rr = reduce(c.test_case, fails, cat);
            r.test_case = rr.test_case;
            r.reduced = rr.deterministic;
            if (rr.deterministic) {
                OracleVerdict v = replay(r.test_case, cfg.target, cat);
                if (v.failed()) r.verdict = std::move(v);
            }
        } else {
            r.test_case = c.test_case;
        }
        for (const auto& id : sql::feature_ids(r.test_case.check_features(cat), cat)) r.feature_set.insert(id);
        r.classification = classify(r.feature_set, history, r.id);
        write_report(bug_dir, r, cat);
        ++m.bugs;
        if (r.classification.is_new) {
            ++m.bugs_new;
            ++w.bugs_new;
        } else {
            ++w.bugs_dup;
        }
        m.records.push_back({r.id, r.feature_set, r.classification, r.reduced, r.test_case});
    };

    for (std::uint64_t window = 0;; ++window) {
        if (cfg.budget && assigned >= *cfg.budget) break;
        if (deadline && Clock::now() >= *deadline) break;
        std::uint64_t quota = interval;
        if (cfg.budget) quota = std::min(quota, *cfg.budget - assigned);
        assigned += quota;

        WindowMetrics w;
        w.window = window;
        w.depth = current_depth(window * interval, cfg.gen);
        for (auto& wk : workers) wk->generator().set_depth(w.depth);

        const auto n = static_cast<std::uint64_t>(workers.size());
        auto share = [&](std::size_t i) { return quota / n + (i < quota % n ? 1 : 0); };
        if (workers.size() == 1) {
            workers[0]->run_window(quota, deadline);
        } else {
            std::vector<std::thread> threads;
            for (std::size_t i = 0; i < workers.size(); ++i)
                threads.emplace_back([&, i] { workers[i]->run_window(share(i), deadline); });
            for (auto& t : threads) t.join();
        }

        bool stopped = false;
        for (auto& wk : workers) {
            w.executed += wk->executed;
            w.succeeded += wk->succeeded;
            w.statements += wk->statements;
            stopped |= wk->stopped;
            if (!wk->fatal.empty() && !m.fatal) {
                m.fatal = true;
                m.fatal_message = wk->fatal;
            }
        }
        if (!m.fatal) {
            try {
                for (auto& wk : workers)
                    for (auto& c : wk->candidates) process(c, w);
            } catch (const FatalAdapterError& e) {
                m.fatal = true;
                m.fatal_message = "fatal adapter error during replay: " + std::string(e.what());
            }
        }
        w.validity = w.executed ? static_cast<double>(w.succeeded) / static_cast<double>(w.executed) : 0.0;
        if (cfg.feedback) {
            for (auto& s : stores) s->reclassify(cfg.inference);
            for (std::size_t i = 0; i < workers.size(); ++i)
                workers[i]->generator().set_states(stores[cfg.isolate_stats ? i : 0]->states());
        }
        m.windows.push_back(w);
        m.statements += w.statements;
        m.executed += w.executed;
        m.succeeded += w.succeeded;
        metrics_file << format_window(w);
        metrics_file.flush();
        if (m.fatal || stopped) break;
    }

    m.stats = merged_stats(stores);
    for (const auto& [id, s] : m.stats) ++m.features_by_state[s.state];
    if (stats_path.has_parent_path()) fs::create_directories(stats_path.parent_path());
    persist_stats(m.stats, stats_path);
    return m;
}

}  // namespace adaquery
