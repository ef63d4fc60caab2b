#include "adaquery/feature_catalog.hpp"

#include <fstream>
#include <sstream>

#include "adaquery/error.hpp"

namespace adaquery {

namespace {

constexpr DataType kConcreteTypes[] = {DataType::Integer, DataType::Text, DataType::Boolean};

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\r')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

ParamType parse_param(std::string_view s, std::size_t line) {
    if (s == "INT") return ParamType::Int;
    if (s == "STRING") return ParamType::String;
    if (s == "BOOLEAN") return ParamType::Boolean;
    if (s == "T") return ParamType::Generic;
    if (s == "ANY") return ParamType::Any;
    throw ParseError("unknown operand type '" + std::string(s) + "'", line);
}

// Splits "tmpl -> RET" and tokenizes placeholders.
void parse_template(FeatureDef& def, std::size_t line) {
    std::string_view body = def.raw_template;
    std::optional<ParamType> result;
    if (auto arrow = body.rfind(" -> "); arrow != std::string_view::npos) {
        result = parse_param(trim(body.substr(arrow + 4)), line);
        body = body.substr(0, arrow);
    }
    std::vector<ParamType> params;
    std::string text;
    auto flush = [&] {
        if (!text.empty()) def.pieces.push_back({TemplatePiece::Kind::Text, text, 0});
        text.clear();
    };
    for (std::size_t i = 0; i < body.size(); ++i) {
        if (body[i] != '{') {
            text += body[i];
            continue;
        }
        auto close = body.find('}', i);
        if (close == std::string_view::npos) throw ParseError("unterminated placeholder", line);
        std::string_view ph = body.substr(i + 1, close - i - 1);
        i = close;
        flush();
        if (ph == "left" || ph == "right") {
            def.pieces.push_back({ph == "left" ? TemplatePiece::Kind::Left : TemplatePiece::Kind::Right, "", 0});
            def.is_join = true;
            continue;
        }
        auto colon = ph.find(':');
        if (colon == std::string_view::npos) {
            // Statement templates use named placeholders ({name}, {columns}...) for documentation only.
            def.pieces.push_back({TemplatePiece::Kind::Text, "{" + std::string(ph) + "}", 0});
            continue;
        }
        int idx = 0;
        for (char c : ph.substr(0, colon)) {
            if (c < '0' || c > '9') throw ParseError("bad operand index in '" + std::string(ph) + "'", line);
            idx = idx * 10 + (c - '0');
        }
        ParamType type = parse_param(ph.substr(colon + 1), line);
        if (idx != static_cast<int>(params.size()))
            throw ParseError("operands must be numbered 0,1,2.. in order", line);
        params.push_back(type);
        def.pieces.push_back({TemplatePiece::Kind::Operand, "", idx});
    }
    flush();
    const bool expression =
        def.category == FeatureCategory::Function || def.category == FeatureCategory::Operator;
    if (expression) {
        if (!result) throw ParseError("expression template of " + def.id + " lacks ' -> TYPE'", line);
        if (params.empty()) throw ParseError(def.id + " has no operands", line);
        if (*result == ParamType::Any) throw ParseError(def.id + " cannot return ANY", line);
        if (*result == ParamType::Generic) {
            bool has_generic = false;
            for (auto p : params) has_generic |= p == ParamType::Generic;
            if (!has_generic) throw ParseError(def.id + " returns T without T operands", line);
        }
        def.signature = Signature{params, *result};
    } else if (def.is_join) {
        if (params.size() > 1 || (params.size() == 1 && params[0] != ParamType::Boolean))
            throw ParseError("join " + def.id + " takes at most one BOOLEAN ON operand", line);
        if (!params.empty()) def.signature = Signature{params, ParamType::Boolean};
    }
}

}  // namespace

std::string_view to_string(FeatureCategory c) {
    switch (c) {
        case FeatureCategory::Statement: return "Statement";
        case FeatureCategory::ClauseKeyword: return "ClauseKeyword";
        case FeatureCategory::Function: return "Function";
        case FeatureCategory::Operator: return "Operator";
        case FeatureCategory::DataType: return "DataType";
        case FeatureCategory::CompositeArgType: return "CompositeArgType";
        case FeatureCategory::AbstractProperty: return "AbstractProperty";
    }
    return "?";
}

FeatureCategory parse_category(std::string_view s) {
    for (int i = 0; i <= static_cast<int>(FeatureCategory::AbstractProperty); ++i) {
        auto c = static_cast<FeatureCategory>(i);
        if (to_string(c) == s) return c;
    }
    throw CatalogError("unknown feature category '" + std::string(s) + "'");
}

std::string_view to_string(ParamType p) {
    switch (p) {
        case ParamType::Int: return "INT";
        case ParamType::String: return "STRING";
        case ParamType::Boolean: return "BOOLEAN";
        case ParamType::Generic: return "T";
        case ParamType::Any: return "ANY";
    }
    return "?";
}

DataType concrete_type(ParamType p) {
    switch (p) {
        case ParamType::Int: return DataType::Integer;
        case ParamType::String: return DataType::Text;
        case ParamType::Boolean: return DataType::Boolean;
        default: return DataType::Untyped;
    }
}

bool valid_feature_id(std::string_view id) {
    if (id.empty()) return false;
    for (char c : id) {
        bool ok = (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9');
        for (char s : std::string_view("_<>=!+~*/%-")) ok |= c == s;
        if (!ok) return false;
    }
    return true;
}

void FeatureCatalog::add(FeatureDef def, std::size_t line) {
    if (!valid_feature_id(def.id)) throw ParseError("invalid feature id '" + def.id + "'", line);
    if (by_id_.count(def.id)) throw ParseError("duplicate feature id '" + def.id + "'", line);
    auto idx = static_cast<FeatureIndex>(defs_.size());
    by_id_.emplace(def.id, idx);
    by_category_[static_cast<std::size_t>(def.category)].push_back(idx);
    if (def.is_join) joins_.push_back(idx);
    if (def.category == FeatureCategory::Function || def.category == FeatureCategory::Operator)
        expression_.push_back(idx);
    defs_.push_back(std::move(def));
}

FeatureCatalog FeatureCatalog::parse(std::string_view text) {
    FeatureCatalog cat;
    cat.by_category_.resize(static_cast<std::size_t>(FeatureCategory::AbstractProperty) + 1);
    std::size_t lineno = 0;
    while (!text.empty()) {
        ++lineno;
        auto nl = text.find('\n');
        std::string_view line = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        if (trim(line).empty() || trim(line).front() == '#') continue;
        auto t1 = line.find('\t');
        auto t2 = t1 == std::string_view::npos ? t1 : line.find('\t', t1 + 1);
        if (t2 == std::string_view::npos) throw ParseError("expected CATEGORY<TAB>ID<TAB>template", lineno);
        FeatureDef def;
        try {
            def.category = parse_category(trim(line.substr(0, t1)));
        } catch (const CatalogError& e) {
            throw ParseError(e.what(), lineno);
        }
        if (def.category == FeatureCategory::CompositeArgType)
            throw ParseError("composite features are derived, not listed", lineno);
        def.id = std::string(trim(line.substr(t1 + 1, t2 - t1 - 1)));
        def.raw_template = std::string(trim(line.substr(t2 + 1)));
        parse_template(def, lineno);
        cat.add(std::move(def), lineno);
    }
    cat.base_count_ = cat.defs_.size();
    for (FeatureIndex f : std::vector<FeatureIndex>(cat.of_category(FeatureCategory::Function))) {
        cat.composite_base_[f] = static_cast<FeatureIndex>(cat.defs_.size());
        const auto params = cat.defs_[f].signature->params;
        for (std::size_t a = 0; a < params.size(); ++a) {
            for (DataType t : kConcreteTypes) {
                FeatureDef c;
                c.category = FeatureCategory::CompositeArgType;
                c.id = cat.defs_[f].id + std::to_string(a + 1) + std::string(type_token(t));
                c.parent = f;
                c.arg_index = static_cast<int>(a);
                c.arg_type = t;
                cat.add(std::move(c), 0);
            }
        }
    }
    return cat;
}

FeatureCatalog FeatureCatalog::load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw CatalogError("cannot read catalog " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse(ss.str());
}

const FeatureCatalog& FeatureCatalog::builtin() {
    static const FeatureCatalog cat = parse(detail::kDefaultCatalogText);
    return cat;
}

std::optional<FeatureIndex> FeatureCatalog::find(std::string_view id) const {
    auto it = by_id_.find(std::string(id));
    if (it == by_id_.end()) return std::nullopt;
    return it->second;
}

FeatureIndex FeatureCatalog::index(std::string_view id) const {
    if (auto f = find(id)) return *f;
    throw CatalogError("unknown feature '" + std::string(id) + "'");
}

FeatureIndex FeatureCatalog::composite(FeatureIndex function, int arg, DataType type) const {
    auto it = composite_base_.find(function);
    if (it == composite_base_.end()) throw CatalogError(id(function) + " has no composite features");
    int slot = type == DataType::Integer ? 0 : type == DataType::Text ? 1 : type == DataType::Boolean ? 2 : -1;
    if (slot < 0 || arg < 0 || arg >= static_cast<int>(defs_[function].signature->params.size()))
        throw CatalogError("no composite feature for argument " + std::to_string(arg) + " of " + id(function));
    return it->second + static_cast<FeatureIndex>(arg * 3 + slot);
}

bool FeatureCatalog::uses_ddl_rule(FeatureIndex i) const {
    const auto& d = defs_.at(i);
    if (d.category == FeatureCategory::Statement) return d.id != "SELECT";
    if (d.category == FeatureCategory::DataType) return true;
    return d.id == "UNIQUE";
}

const std::vector<FeatureIndex>& FeatureCatalog::of_category(FeatureCategory c) const {
    return by_category_.at(static_cast<std::size_t>(c));
}

}  // namespace adaquery
