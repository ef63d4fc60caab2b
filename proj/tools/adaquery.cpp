#include <cstdio>
#include <filesystem>
#include <iostream>

#include "CLI11.hpp"
#include "adaquery/campaign.hpp"
#include "adaquery/error.hpp"
#include "adaquery/report.hpp"

using namespace adaquery;

namespace {

int cmd_run(const CampaignConfig& cfg) {
    const CampaignMetrics m = run_campaign(cfg);
    const double validity = m.windows.empty() ? 0.0 : m.windows.back().validity;
    std::printf("statements %llu, test cases %llu, succeeded %llu, final validity %.4f\n",
                static_cast<unsigned long long>(m.statements), static_cast<unsigned long long>(m.executed),
                static_cast<unsigned long long>(m.succeeded), validity);
    std::printf("bugs %llu (new %llu)\n", static_cast<unsigned long long>(m.bugs),
                static_cast<unsigned long long>(m.bugs_new));
    for (const auto& [state, n] : m.features_by_state)
        std::printf("features %s: %zu\n", std::string(to_string(state)).c_str(), n);
    if (m.fatal) {
        std::fprintf(stderr, "aborted: %s\n", m.fatal_message.c_str());
        return 2;
    }
    return m.bugs ? 1 : 0;
}

int cmd_recheck(const std::filesystem::path& out, const std::string& target) {
    std::filesystem::path dir = out / "bugs";
    if (!std::filesystem::is_directory(dir)) dir = out;
    const auto entries = recheck(dir, TargetSpec::parse(target));
    std::size_t failing = 0;
    for (const auto& e : entries) {
        std::printf("%s\t%s", e.name.c_str(), std::string(to_string(e.outcome)).c_str());
        if (!e.message.empty()) std::printf("\t%s", e.message.c_str());
        std::printf("\n");
        failing += e.outcome == RecheckEntry::Outcome::Fail;
    }
    std::printf("%zu of %zu records still fail\n", failing, entries.size());
    return failing ? 1 : 0;
}

int cmd_stats(const std::filesystem::path& file) {
    const StatsTable t = load_stats(file);
    std::printf("%-28s %10s %10s  %s\n", "feature", "N", "y", "state");
    for (const auto& [id, s] : t)
        std::printf("%-28s %10llu %10llu  %s\n", id.c_str(), static_cast<unsigned long long>(s.executions),
                    static_cast<unsigned long long>(s.successes), std::string(to_string(s.state)).c_str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Adaptive SQL dialect testing"};
    app.require_subcommand(1);

    CampaignConfig cfg;
    std::string target, oracle = "tlp", typing = "learn", stats_file;
    std::uint64_t interval = 100000, budget = 0;
    double duration = 0;
    bool no_feedback = false, no_reduce = false;
    auto* run = app.add_subcommand("run", "Run a testing campaign");
    run->add_option("--target", target, "sqlite:<path> or mock:<spec-path>")->required();
    run->add_option("--oracle", oracle, "tlp, norec or both")->check(CLI::IsMember({"tlp", "norec", "both"}));
    run->add_option("--seed", cfg.gen.seed, "Random seed");
    run->add_option("--threshold-p", cfg.inference.threshold_p, "Success-probability threshold p");
    run->add_option("--interval-i", interval, "Update interval I in statements");
    run->add_option("--max-depth", cfg.gen.max_depth, "Maximum expression depth");
    run->add_option("--workers", cfg.workers, "Worker threads");
    auto* budget_opt = run->add_option("--budget", budget, "Statement budget");
    auto* duration_opt = run->add_option("--duration", duration, "Duration in seconds");
    run->add_option("--stats", stats_file, "Feature stats file (loaded and persisted)");
    run->add_option("--out", cfg.out, "Output directory")->required();
    run->add_option("--typing", typing, "static, dynamic or learn")
        ->check(CLI::IsMember({"static", "dynamic", "learn"}));
    run->add_option("--checks-per-round", cfg.checks_per_round, "Oracle checks per database state");
    run->add_flag("--no-feedback", no_feedback, "Record stats but never reclassify");
    run->add_flag("--isolate-stats", cfg.isolate_stats, "One stats table per worker");
    run->add_flag("--no-reduce", no_reduce, "Report bug-inducing cases unreduced");

    std::string recheck_target;
    std::filesystem::path recheck_out;
    auto* rc = app.add_subcommand("recheck", "Replay every reproducer of a report directory");
    rc->add_option("--out", recheck_out, "Campaign output directory")->required();
    rc->add_option("--target", recheck_target, "Target to replay against")->required();

    std::filesystem::path stats_path;
    auto* st = app.add_subcommand("stats", "Print a feature stats table");
    st->add_option("--stats", stats_path, "Stats file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    try {
        if (*run) {
            cfg.target = TargetSpec::parse(target);
            cfg.oracle = parse_oracle_choice(oracle);
            cfg.gen.typing = parse_typing_mode(typing);
            cfg.inference.update_interval = interval;
            cfg.gen.depth_schedule_interval = interval;
            if (*budget_opt) cfg.budget = budget;
            if (*duration_opt) cfg.duration_seconds = duration;
            if (!stats_file.empty()) cfg.stats_file = stats_file;
            cfg.feedback = !no_feedback;
            cfg.reduce = !no_reduce;
            return cmd_run(cfg);
        }
        if (*rc) return cmd_recheck(recheck_out, recheck_target);
        return cmd_stats(stats_path);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
}
