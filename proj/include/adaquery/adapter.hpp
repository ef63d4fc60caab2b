#pragma once

#include <functional>
#include <memory>
#include <string>

#include "adaquery/schema_model.hpp"
#include "adaquery/value.hpp"

namespace adaquery {

// How result cells are compared: Static keeps type tags; Dynamic compares
// integers, reals and text by canonical text (booleans stay booleans).
enum class Normalization { Static, Dynamic };

struct QueryResult {
    ExecutionStatus status;
    ResultSet rows;
};

// A session against one target database. Wire-protocol drivers plug in by
// implementing this interface and registering a factory for their prefix.
class Adapter {
public:
    virtual ~Adapter() = default;

    // Opens a fresh, empty database described by `config`.
    virtual void open(const std::string& config) = 0;
    virtual ExecutionStatus execute(const std::string& sql) = 0;
    virtual QueryResult query(const std::string& sql) = 0;
    virtual void close() = 0;
    // Runs after the setup statements of a round (e.g. COMMIT/REFRESH).
    virtual ExecutionStatus post_setup() { return ExecutionStatus::success(); }
    virtual Normalization normalization() const = 0;
    // Config for an independent instance (per worker, per replay); file-backed
    // targets derive a distinct path from the suffix.
    virtual std::string instance_config(const std::string& config, const std::string& suffix) const {
        (void)suffix;
        return config;
    }
};

// `kind:config`, e.g. `sqlite::memory:` or `mock:data/mock/benchmark.spec`.
struct TargetSpec {
    std::string kind;
    std::string config;

    static TargetSpec parse(const std::string& s);
    std::string str() const { return kind + ":" + config; }
};

using AdapterFactory = std::function<std::unique_ptr<Adapter>()>;

void register_adapter(const std::string& kind, AdapterFactory factory);
std::unique_ptr<Adapter> make_adapter(const std::string& kind);
// make_adapter + open on the instance derived from `suffix`.
std::unique_ptr<Adapter> open_target(const TargetSpec& target, const std::string& suffix);

std::unique_ptr<Adapter> make_sqlite_adapter();

}  // namespace adaquery
