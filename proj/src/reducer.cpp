#include "adaquery/reducer.hpp"

#include "adaquery/error.hpp"

namespace adaquery {

std::vector<PlannedQuery> TestCase::queries(const FeatureCatalog& cat) const {
    if (oracle == OracleKind::TLP) return tlp_queries(base, predicate, cat);
    return norec_queries(*base.from, predicate, cat);
}

sql::FeatureSet TestCase::check_features(const FeatureCatalog& cat) const {
    sql::FeatureSet out;
    sql::collect_features(base, cat, out);
    sql::collect_where_features(predicate, cat, out);
    return out;
}

OracleVerdict run_check(const TestCase& tc, Adapter& adapter, const FeatureCatalog& cat) {
    if (tc.oracle == OracleKind::TLP) return tlp_check(tc.base, tc.predicate, adapter, cat);
    return norec_check(*tc.base.from, tc.predicate, adapter, cat);
}

OracleVerdict replay(const TestCase& tc, const TargetSpec& target, const FeatureCatalog& cat) {
    auto adapter = open_target(target, "replay");
    for (const auto& s : tc.setup) {
        const ExecutionStatus st = adapter->execute(s);
        if (st.fatal()) throw FatalAdapterError(st.message);
    }
    const ExecutionStatus post = adapter->post_setup();
    if (post.fatal()) throw FatalAdapterError(post.message);
    OracleVerdict v = run_check(tc, *adapter, cat);
    adapter->close();
    return v;
}

std::vector<std::string> ddmin(const std::vector<std::string>& items,
                               const std::function<bool(const std::vector<std::string>&)>& fails,
                               std::size_t& budget) {
    std::vector<std::string> current = items;
    std::size_t n = 2;
    auto attempt = [&](const std::vector<std::string>& c) {
        if (budget == 0) return false;
        --budget;
        return fails(c);
    };
    while (!current.empty() && budget > 0) {
        if (current.size() == 1) {
            if (attempt({})) current.clear();
            break;
        }
        n = std::min(n, current.size());
        const std::size_t chunk = (current.size() + n - 1) / n;
        bool progressed = false;
        // Subsets first, then complements.
        for (std::size_t start = 0; start < current.size() && !progressed; start += chunk) {
            std::vector<std::string> subset(current.begin() + static_cast<std::ptrdiff_t>(start),
                                            current.begin() + static_cast<std::ptrdiff_t>(std::min(start + chunk, current.size())));
            if (subset.size() < current.size() && attempt(subset)) {
                current = std::move(subset);
                n = 2;
                progressed = true;
            }
        }
        for (std::size_t start = 0; start < current.size() && !progressed; start += chunk) {
            std::vector<std::string> complement;
            for (std::size_t i = 0; i < current.size(); ++i)
                if (i < start || i >= start + chunk) complement.push_back(current[i]);
            if (attempt(complement)) {
                current = std::move(complement);
                n = std::max<std::size_t>(n - 1, 2);
                progressed = true;
            }
        }
        if (progressed) continue;
        if (n >= current.size()) break;
        n = std::min(current.size(), n * 2);
    }
    return current;
}

namespace {

std::vector<sql::Expr> literal_candidates(const sql::Expr& e, const FeatureCatalog& cat) {
    std::vector<sql::Expr> out;
    switch (sql::infer_type(e, cat)) {
        case DataType::Integer:
            for (std::int64_t v : {0, 1, -1}) out.push_back(sql::Expr::constant(Value::integer(v)));
            break;
        case DataType::Text:
            out.push_back(sql::Expr::constant(Value::text("")));
            out.push_back(sql::Expr::constant(Value::text("a")));
            break;
        case DataType::Boolean:
            out.push_back(sql::Expr::constant(Value::boolean(true)));
            out.push_back(sql::Expr::constant(Value::boolean(false)));
            break;
        case DataType::Untyped: break;
    }
    out.push_back(sql::Expr::constant(Value::null()));
    return out;
}

void collect_slots(sql::Expr& e, std::vector<sql::Expr*>& out) {
    out.push_back(&e);
    for (auto& a : e.args) collect_slots(a, out);
}

void collect_slots(sql::FromItem& f, std::vector<sql::Expr*>& out) {
    for (auto& c : f.children) collect_slots(c, out);
    if (f.on) collect_slots(*f.on, out);
}

// Expression slots of the check, predicate first, in preorder.
std::vector<sql::Expr*> slots(TestCase& tc) {
    std::vector<sql::Expr*> out;
    collect_slots(tc.predicate, out);
    if (tc.base.from) collect_slots(*tc.base.from, out);
    return out;
}

std::vector<sql::FromItem*> joins(sql::FromItem& f) {
    std::vector<sql::FromItem*> out;
    if (!f.is_join) return out;
    out.push_back(&f);
    for (auto& c : f.children) {
        auto sub = joins(c);
        out.insert(out.end(), sub.begin(), sub.end());
    }
    return out;
}

}  // namespace

ReduceResult reduce(const TestCase& tc, const FailurePredicate& fails, const FeatureCatalog& cat,
                    std::size_t max_replays) {
    ReduceResult result{tc, true, 0};
    std::size_t budget = max_replays;
    auto attempt = [&](const TestCase& c) {
        if (budget == 0) return false;
        --budget;
        ++result.replays;
        return fails(c);
    };
    if (!attempt(tc) || !attempt(tc)) {
        result.deterministic = false;
        return result;
    }
    TestCase current = tc;

    auto reduce_setup = [&] {
        auto setup_fails = [&](const std::vector<std::string>& setup) {
            TestCase c = current;
            c.setup = setup;
            ++result.replays;
            return fails(c);
        };
        current.setup = ddmin(current.setup, setup_fails, budget);
    };
    reduce_setup();

    bool changed = true;
    while (changed && budget > 0) {
        changed = false;
        // Replace a join by one of its inputs; the projection becomes `*`.
        if (current.base.from) {
            auto js = joins(*current.base.from);
            for (std::size_t j = 0; j < js.size() && !changed; ++j) {
                for (std::size_t side = 0; side < 2 && !changed; ++side) {
                    TestCase c = current;
                    auto target = joins(*c.base.from)[j];
                    sql::FromItem child = target->children[side];
                    *target = std::move(child);
                    c.base.star = true;
                    c.base.items.clear();
                    if (attempt(c)) {
                        current = std::move(c);
                        changed = true;
                    }
                }
            }
        }
        // One pass over expression slots; after a successful replacement the
        // same slot is revisited since it now holds a smaller expression.
        for (std::size_t i = 0; i < slots(current).size() && budget > 0;) {
            const sql::Expr node = *slots(current)[i];
            // A literal may only become NULL, so replacements cannot cycle.
            std::vector<sql::Expr> candidates;
            if (node.kind == sql::Expr::Kind::Constant) {
                candidates.push_back(sql::Expr::constant(Value::null()));
            } else {
                candidates = literal_candidates(node, cat);
            }
            for (const auto& a : node.args) candidates.push_back(a);
            bool replaced = false;
            for (auto& cand : candidates) {
                if (cand == node) continue;
                TestCase c = current;
                *slots(c)[i] = cand;
                if (attempt(c)) {
                    current = std::move(c);
                    changed = replaced = true;
                    break;
                }
            }
            if (!replaced) ++i;
        }
    }
    reduce_setup();
    result.test_case = std::move(current);
    return result;
}

}  // namespace adaquery
