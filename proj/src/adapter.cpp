#include "adaquery/adapter.hpp"

#include <map>
#include <mutex>

#include "adaquery/error.hpp"
#include "adaquery/mock.hpp"

namespace adaquery {

namespace {

struct Registry {
    std::mutex mu;
    std::map<std::string, AdapterFactory> factories;

    Registry() {
        factories["sqlite"] = make_sqlite_adapter;
        factories["mock"] = [] { return std::unique_ptr<Adapter>(new MockAdapter()); };
    }
};

Registry& registry() {
    static Registry r;
    return r;
}

}  // namespace

TargetSpec TargetSpec::parse(const std::string& s) {
    const auto colon = s.find(':');
    if (colon == std::string::npos || colon == 0 || colon + 1 == s.size())
        throw Error("target must look like kind:config, got '" + s + "'");
    return {s.substr(0, colon), s.substr(colon + 1)};
}

void register_adapter(const std::string& kind, AdapterFactory factory) {
    auto& r = registry();
    std::lock_guard lock(r.mu);
    r.factories[kind] = std::move(factory);
}

std::unique_ptr<Adapter> make_adapter(const std::string& kind) {
    auto& r = registry();
    std::lock_guard lock(r.mu);
    auto it = r.factories.find(kind);
    if (it == r.factories.end()) throw Error("unknown target kind '" + kind + "'");
    return it->second();
}

std::unique_ptr<Adapter> open_target(const TargetSpec& target, const std::string& suffix) {
    auto a = make_adapter(target.kind);
    a->open(a->instance_config(target.config, suffix));
    return a;
}

}  // namespace adaquery
