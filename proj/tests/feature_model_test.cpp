#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/beta.hpp>
#include <cmath>
#include <filesystem>
#include <random>
#include <thread>

#include "adaquery/error.hpp"
#include "adaquery/feature_model.hpp"
#include "doctest.h"

using namespace adaquery;

namespace {

FeatureStats st(std::uint64_t n, std::uint64_t y) { return {n, y, FeatureState::Unknown}; }

// Independent oracles for I_p(y+1, N-y+1).
double ibeta_oracle(std::uint64_t n, std::uint64_t y, double p) {
    return boost::math::ibeta(static_cast<double>(y + 1), static_cast<double>(n - y + 1), p);
}

double integral_oracle(std::uint64_t n, std::uint64_t y, double p) {
    const double a = static_cast<double>(y + 1), b = static_cast<double>(n - y + 1);
    const double log_norm = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b);
    auto density = [&](double t) {
        if (t <= 0.0 || t >= 1.0) return 0.0;
        return std::exp(log_norm + (a - 1) * std::log(t) + (b - 1) * std::log1p(-t));
    };
    return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(density, 0.0, p, 15, 1e-13);
}

}  // namespace

TEST_CASE("posterior parameters") {
    CHECK(posterior_params(st(400, 0)) == std::pair<std::uint64_t, std::uint64_t>{1, 401});
    CHECK(posterior_params(st(0, 0)) == std::pair<std::uint64_t, std::uint64_t>{1, 1});
    CHECK(posterior_params(st(100, 50)) == std::pair<std::uint64_t, std::uint64_t>{51, 51});
}

TEST_CASE("prob_below_threshold frozen values") {
    // Each value was first checked against Boost ibeta and quadrature below.
    struct Case {
        std::uint64_t n, y;
        double p, value, tol;
    };
    const Case cases[] = {
        {400, 0, 0.01, 0.98222895225770523, 1e-11},
        {100, 50, 0.01, 1.2206803070165445e-73, 1e-84},
        {100, 0, 0.01, 0.63762798213950278, 1e-11},
        {11, 3, 0.3, 0.50748422656499992, 1e-11},
        {1000, 200, 0.2, 0.48739363667590857, 1e-11},
        {0, 0, 0.5, 0.5, 1e-15},
    };
    for (const auto& c : cases) {
        CAPTURE(c.n);
        CAPTURE(c.y);
        CHECK(std::fabs(ibeta_oracle(c.n, c.y, c.p) - c.value) <= c.tol);
        CHECK(std::fabs(prob_below_threshold(st(c.n, c.y), c.p) - c.value) <= c.tol);
    }
    CHECK(prob_below_threshold(st(400, 0), 0.01) == doctest::Approx(1 - std::pow(0.99, 401)).epsilon(1e-11));
    CHECK(prob_below_threshold(st(100, 50), 0.01) < 1e-6);
}

TEST_CASE("prob_below_threshold agrees with two independent oracles") {
    std::mt19937_64 gen(7);
    std::uniform_int_distribution<std::uint64_t> nd(0, 1000);
    std::uniform_real_distribution<double> pd(0.001, 0.999);
    for (int i = 0; i < 3000; ++i) {
        const std::uint64_t n = nd(gen);
        const std::uint64_t y = std::uniform_int_distribution<std::uint64_t>(0, n)(gen);
        const double p = i % 3 == 0 ? 0.01 : pd(gen);
        const double got = prob_below_threshold(st(n, y), p);
        CAPTURE(n);
        CAPTURE(y);
        CAPTURE(p);
        REQUIRE(std::fabs(got - ibeta_oracle(n, y, p)) <= 1e-9);
        if (i % 10 == 0) REQUIRE(std::fabs(got - integral_oracle(n, y, p)) <= 1e-9);
    }
}

TEST_CASE("prob_below_threshold monotonicity") {
    for (std::uint64_t n = 0; n <= 500; n += 7) {
        double prev = 2.0;
        for (std::uint64_t y = 0; y <= n; ++y) {
            const double v = prob_below_threshold(st(n, y), 0.01);
            if (prev > 1e-300) REQUIRE(v < prev);
            prev = v;
        }
    }
    double prev = -1.0;
    for (std::uint64_t n = 0; n <= 500; ++n) {
        const double v = prob_below_threshold(st(n, 0), 0.01);
        REQUIRE(v > prev);
        prev = v;
    }
}

TEST_CASE("query feature classification") {
    InferenceConfig cfg;
    CHECK(classify_query_feature(st(400, 0), cfg) == FeatureState::Unsupported);
    CHECK(classify_query_feature(st(400, 400), cfg) == FeatureState::Supported);
    CHECK(classify_query_feature(st(100, 0), cfg) == FeatureState::Supported);
    CHECK(classify_query_feature(st(0, 0), cfg) == FeatureState::Unknown);
    // Smallest failure-only exposure that crosses the 0.95 mass at p = 0.01.
    CHECK(classify_query_feature(st(297, 0), cfg) == FeatureState::Supported);
    CHECK(classify_query_feature(st(298, 0), cfg) == FeatureState::Unsupported);
}

TEST_CASE("ddl feature classification") {
    InferenceConfig cfg;
    CHECK(classify_ddl_feature(st(20, 0), cfg) == FeatureState::Unsupported);
    CHECK(classify_ddl_feature(st(19, 0), cfg) == FeatureState::Unknown);
    CHECK(classify_ddl_feature(st(20, 1), cfg) == FeatureState::Supported);
}

TEST_CASE("inference config validation") {
    InferenceConfig cfg;
    CHECK_NOTHROW(cfg.validate());
    cfg.threshold_p = 0;
    CHECK_THROWS_AS(cfg.validate(), Error);
    cfg.threshold_p = 1;
    CHECK_THROWS_AS(cfg.validate(), Error);
}

TEST_CASE("record_outcome counters") {
    const auto& cat = FeatureCatalog::builtin();
    FeatureStore store(cat);
    store.record_outcome(std::vector<std::string>{"SIN"}, true);
    CHECK(store.stats(cat.index("SIN")).executions == 1);
    CHECK(store.stats(cat.index("SIN")).successes == 1);

    for (int i = 0; i < 20; ++i) store.record_outcome(std::vector<std::string>{"INDEX"}, false);
    const auto changed = store.reclassify(InferenceConfig{});
    CHECK(store.state(cat.index("INDEX")) == FeatureState::Unsupported);
    CHECK(std::find(changed.begin(), changed.end(), cat.index("INDEX")) != changed.end());

    store.record_outcome(std::vector<std::string>{"CASE", "!=", "SIN", "SIN1INT"}, true);
    for (const char* id : {"CASE", "!=", "SIN1INT"}) {
        CHECK(store.stats(cat.index(id)).executions == 1);
        CHECK(store.stats(cat.index(id)).successes == 1);
    }
    CHECK(store.stats(cat.index("SIN")).executions == 2);
    CHECK_THROWS_AS(store.record_outcome(std::vector<std::string>{"NOPE"}, true), CatalogError);
}

TEST_CASE("unsupported is sticky") {
    const auto& cat = FeatureCatalog::builtin();
    FeatureStore store(cat);
    const auto f = cat.index("NULLIF");
    for (int i = 0; i < 400; ++i) store.record_outcome(std::vector<FeatureIndex>{f}, false);
    store.reclassify(InferenceConfig{});
    REQUIRE(store.state(f) == FeatureState::Unsupported);
    for (int i = 0; i < 4000; ++i) store.record_outcome(std::vector<FeatureIndex>{f}, true);
    CHECK(store.reclassify(InferenceConfig{}).empty());
    CHECK(store.state(f) == FeatureState::Unsupported);
}

TEST_CASE("concurrent record_outcome keeps pairs consistent") {
    const auto& cat = FeatureCatalog::builtin();
    FeatureStore store(cat);
    const std::vector<FeatureIndex> fs{cat.index("ABS"), cat.index("=")};
    std::vector<std::thread> threads;
    for (int t = 0; t < 4; ++t)
        threads.emplace_back([&, t] {
            for (int i = 0; i < 10000; ++i) store.record_outcome(fs, (i + t) % 3 == 0);
        });
    for (auto& t : threads) t.join();
    std::uint64_t expect_y = 0;
    for (int t = 0; t < 4; ++t)
        for (int i = 0; i < 10000; ++i) expect_y += (i + t) % 3 == 0;
    for (auto f : fs) {
        CHECK(store.stats(f).executions == 40000);
        CHECK(store.stats(f).successes == expect_y);
    }
}

TEST_CASE("redistribute examples") {
    const auto& cat = FeatureCatalog::builtin();
    std::vector<FeatureState> states(cat.size(), FeatureState::Unknown);
    const std::vector<FeatureIndex> cmp{cat.index("="), cat.index("!="), cat.index("<"), cat.index("<=>")};
    states[cat.index("<=>")] = FeatureState::Unsupported;
    const auto r = redistribute(make_context("cmp", cmp), states);
    CHECK(r.weights[0] == doctest::Approx(1.0 / 3));
    CHECK(r.weights[1] == doctest::Approx(1.0 / 3));
    CHECK(r.weights[2] == doctest::Approx(1.0 / 3));
    CHECK(r.weights[3] == 0.0);

    const auto two = redistribute(make_context("two", {cmp[0], cmp[3]}), states);
    CHECK(two.weights == std::vector<double>{1.0, 0.0});
    CHECK_THROWS_AS(redistribute(make_context("one", {cmp[3]}), states), RuleExhaustedError);

    const auto init = make_context("five", {0, 1, 2, 3, 4});
    for (double w : init.weights) CHECK(w == doctest::Approx(0.2));
}

TEST_CASE("redistribute invariants on random contexts") {
    std::mt19937_64 gen(11);
    for (int iter = 0; iter < 10000; ++iter) {
        const std::size_t n = 1 + gen() % 40;
        std::vector<FeatureIndex> alts(n);
        std::vector<FeatureState> states(n);
        for (std::size_t i = 0; i < n; ++i) {
            alts[i] = static_cast<FeatureIndex>(i);
            states[i] = static_cast<FeatureState>(gen() % 3);
        }
        const bool any = std::any_of(states.begin(), states.end(), [](auto s) { return s != FeatureState::Unsupported; });
        if (!any) {
            CHECK_THROWS_AS(redistribute(make_context("r", alts), states), RuleExhaustedError);
            continue;
        }
        const auto r = redistribute(make_context("r", alts), states);
        double sum = 0, nonzero = -1;
        for (std::size_t i = 0; i < n; ++i) {
            sum += r.weights[i];
            if (states[i] == FeatureState::Unsupported) {
                REQUIRE(r.weights[i] == 0.0);
            } else {
                if (nonzero < 0) nonzero = r.weights[i];
                REQUIRE(r.weights[i] == nonzero);
            }
        }
        REQUIRE(std::fabs(sum - 1.0) <= 1e-12);
    }
}

TEST_CASE("stats persistence round trip") {
    const auto dir = std::filesystem::temp_directory_path() / "adaquery_fm_test";
    std::filesystem::create_directories(dir);
    StatsTable empty;
    persist_stats(empty, dir / "empty.tsv");
    CHECK(load_stats(dir / "empty.tsv").empty());

    StatsTable t{{"SIN", {10, 9, FeatureState::Supported}}, {"<=>", {400, 0, FeatureState::Unsupported}}};
    persist_stats(t, dir / "s.tsv");
    CHECK(load_stats(dir / "s.tsv") == t);
    CHECK(serialize_stats(parse_stats(serialize_stats(t))) == serialize_stats(t));

    CHECK_THROWS_AS(parse_stats("adaquery-stats v1\nSIN\t1\t2\tSupported\n"), ParseError);
    try {
        parse_stats("adaquery-stats v1\nSIN\t3\t2\tSupported\nCOS\tx\t1\tSupported\n");
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.line() == 3);
    }
    std::filesystem::remove_all(dir);
}

TEST_CASE("store assign and table agree") {
    const auto& cat = FeatureCatalog::builtin();
    FeatureStore a(cat);
    a.record_outcome(std::vector<std::string>{"ABS", "SIN1INT"}, true);
    a.record_outcome(std::vector<std::string>{"ABS"}, false);
    a.reclassify(InferenceConfig{});
    FeatureStore b(cat);
    b.assign(a.table());
    CHECK(b.table() == a.table());
    CHECK(b.states() == a.states());
}
