#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <variant>
#include <vector>

#include "adaquery/value.hpp"

namespace adaquery {

enum class FeatureCategory {
    Statement,
    ClauseKeyword,
    Function,
    Operator,
    DataType,
    CompositeArgType,
    AbstractProperty,
};

std::string_view to_string(FeatureCategory c);
FeatureCategory parse_category(std::string_view s);

// Operand type of a template placeholder. Generic operands of one feature all
// share a single type T; Any accepts every type independently.
enum class ParamType { Int, String, Boolean, Generic, Any };

std::string_view to_string(ParamType p);
// The concrete DataType of Int/String/Boolean, Untyped for Generic/Any.
DataType concrete_type(ParamType p);

struct Signature {
    std::vector<ParamType> params;
    ParamType result = ParamType::Boolean;
};

// A parsed render template: literal text interleaved with operand slots.
// Join templates additionally use {left}/{right}.
struct TemplatePiece {
    enum class Kind { Text, Operand, Left, Right };
    Kind kind = Kind::Text;
    std::string text;
    int operand = 0;
};

using FeatureIndex = std::uint32_t;

struct FeatureDef {
    std::string id;
    FeatureCategory category = FeatureCategory::Statement;
    std::string raw_template;
    std::vector<TemplatePiece> pieces;
    // Functions, operators and joins with an ON predicate.
    std::optional<Signature> signature;
    bool is_join = false;
    // CompositeArgType only: owning function, 0-based argument, argument type.
    FeatureIndex parent = 0;
    int arg_index = 0;
    DataType arg_type = DataType::Untyped;
};

bool valid_feature_id(std::string_view id);

class FeatureCatalog {
public:
    // Parses `CATEGORY<TAB>ID<TAB>template` lines; `#` starts a comment line.
    // Composite features are appended for every function argument.
    static FeatureCatalog parse(std::string_view text);
    static FeatureCatalog load(const std::filesystem::path& path);
    // The default catalog compiled into the library.
    static const FeatureCatalog& builtin();

    std::size_t size() const { return defs_.size(); }
    std::size_t base_size() const { return base_count_; }
    const FeatureDef& at(FeatureIndex i) const { return defs_.at(i); }
    const std::vector<FeatureDef>& all() const { return defs_; }

    std::optional<FeatureIndex> find(std::string_view id) const;
    // Throws CatalogError for an unknown id.
    FeatureIndex index(std::string_view id) const;
    const std::string& id(FeatureIndex i) const { return defs_.at(i).id; }

    // Composite feature `<FUNC><arg+1><TYPE>`; type must be concrete.
    FeatureIndex composite(FeatureIndex function, int arg, DataType type) const;

    // DDL-phase features (statements other than SELECT, data types, UNIQUE)
    // are classified by the repeated-failure rule instead of the posterior.
    bool uses_ddl_rule(FeatureIndex i) const;

    const std::vector<FeatureIndex>& of_category(FeatureCategory c) const;
    const std::vector<FeatureIndex>& joins() const { return joins_; }
    // Functions and operators, the expression productions.
    const std::vector<FeatureIndex>& expression_features() const { return expression_; }

private:
    std::vector<FeatureDef> defs_;
    std::size_t base_count_ = 0;
    std::unordered_map<std::string, FeatureIndex> by_id_;
    std::vector<std::vector<FeatureIndex>> by_category_;
    std::vector<FeatureIndex> joins_;
    std::vector<FeatureIndex> expression_;
    // function index -> first composite index (3 per argument).
    std::unordered_map<FeatureIndex, FeatureIndex> composite_base_;

    void add(FeatureDef def, std::size_t line);
};

namespace detail {
extern const std::string_view kDefaultCatalogText;
}

}  // namespace adaquery
