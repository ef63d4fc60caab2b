#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "adaquery/ast.hpp"
#include "adaquery/feature_model.hpp"
#include "adaquery/rng.hpp"
#include "adaquery/schema_model.hpp"

namespace adaquery {

enum class TypingMode { Static, Dynamic, Learn };

std::string_view to_string(TypingMode m);
TypingMode parse_typing_mode(std::string_view s);

struct GenConfig {
    int max_depth = 3;
    std::uint64_t depth_schedule_interval = 100000;
    int max_tables = 2;
    int max_views = 1;
    std::uint64_t seed = 0;
    TypingMode typing = TypingMode::Learn;
};

// min(1 + executed / I, max_depth).
int current_depth(std::uint64_t executed, const GenConfig& cfg);

struct GeneratedStatement {
    std::string sql;
    sql::StatementKind kind = sql::StatementKind::Select;
    sql::FeatureSet features;
    sql::Statement ast;
};

// One oracle test case: a WHERE-less base query and a predicate.
struct QueryCase {
    sql::Select base;
    sql::Expr predicate;
    sql::FeatureSet base_features;
    sql::FeatureSet predicate_features;

    sql::FeatureSet features() const;
};

// Samples an alternative after redistributing ctx over `states`.
// Throws RuleExhaustedError when nothing is left.
FeatureIndex choose_alternative(const ChoiceContext& ctx, const std::vector<FeatureState>& states, Rng& rng);

class Generator {
public:
    Generator(const FeatureCatalog& catalog, GenConfig cfg);

    const FeatureCatalog& catalog() const { return *cat_; }
    const GenConfig& config() const { return cfg_; }

    // Feature states snapshot taken at an update boundary.
    void set_states(const std::vector<FeatureState>& states);
    const std::vector<FeatureState>& states() const { return states_; }
    void set_depth(int depth) { depth_ = std::max(1, std::min(depth, cfg_.max_depth)); }
    int depth() const { return depth_; }
    // Static, or Dynamic; Learn resolves to Static once IMPLICIT_CAST is Unsupported.
    TypingMode effective_typing() const;

    bool should_generate(std::string_view feature_id) const;
    bool should_generate(FeatureIndex f) const;

    // nullopt when the statement kind is suppressed (its feature is Unsupported)
    // or no suppression-respecting statement could be produced.
    // Throws EmptySchemaError for table-dependent kinds on an empty schema.
    std::optional<GeneratedStatement> generate_statement(sql::StatementKind kind, SchemaModel& schema, Rng& rng);
    // nullopt when SELECT or WHERE is suppressed.
    std::optional<QueryCase> generate_query(const SchemaModel& schema, Rng& rng);

    // Expression of (in Static mode) type `target` over columns of `scope`,
    // at most depth_budget nested calls (0 gives a leaf). Features are added to `features`.
    sql::Expr generate_expression(DataType target, int depth_budget, const std::vector<const TableDef*>& scope,
                                  const SchemaModel* schema, Rng& rng, sql::FeatureSet& features);

    // The cached, redistributed context of a production, or nullptr if exhausted.
    const ChoiceContext* context(const std::string& rule) const;

private:
    const FeatureCatalog* cat_;
    GenConfig cfg_;
    int depth_ = 1;
    std::vector<FeatureState> states_;
    std::map<std::string, ChoiceContext> base_contexts_;
    std::map<std::string, ChoiceContext> contexts_;
    // Per function and argument: types whose composite feature is usable.
    std::map<FeatureIndex, std::vector<std::vector<DataType>>> allowed_types_;
    std::optional<FeatureIndex> f_where_, f_select_, f_distinct_, f_subquery_, f_unique_;

    void rebuild();
    bool usable_for(FeatureIndex f, DataType target) const;
    FeatureIndex choose(const std::string& rule, Rng& rng, sql::FeatureSet& features) const;
    sql::Expr leaf(DataType t, const std::vector<const TableDef*>& scope, Rng& rng) const;
    sql::Expr constant(DataType t, Rng& rng) const;
    DataType slot_type(Rng& rng) const;
    sql::Expr predicate(int depth, const std::vector<const TableDef*>& scope, const SchemaModel* schema, Rng& rng,
                        sql::FeatureSet& features);
    bool suppressed(const sql::FeatureSet& s) const;
    std::optional<GeneratedStatement> build_statement(sql::StatementKind kind, SchemaModel& schema, Rng& rng);
};

}  // namespace adaquery
