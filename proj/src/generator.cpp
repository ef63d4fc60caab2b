#include "adaquery/generator.hpp"

#include <algorithm>

#include "adaquery/error.hpp"

namespace adaquery {

namespace {

constexpr DataType kTypes[] = {DataType::Integer, DataType::Text, DataType::Boolean};

const char* const kStringPool[] = {"", "a", "b", "abc", "A", " x ", "0", "1", "-3", "hello", "%", "_a", "Ab%"};

std::string expr_rule(DataType t) { return "expr:" + std::string(type_token(t)); }

bool contains(const std::vector<DataType>& v, DataType t) { return std::find(v.begin(), v.end(), t) != v.end(); }

}  // namespace

std::string_view to_string(TypingMode m) {
    switch (m) {
        case TypingMode::Static: return "static";
        case TypingMode::Dynamic: return "dynamic";
        case TypingMode::Learn: return "learn";
    }
    return "?";
}

TypingMode parse_typing_mode(std::string_view s) {
    if (s == "static") return TypingMode::Static;
    if (s == "dynamic") return TypingMode::Dynamic;
    if (s == "learn") return TypingMode::Learn;
    throw Error("unknown typing mode '" + std::string(s) + "'");
}

int current_depth(std::uint64_t executed, const GenConfig& cfg) {
    const std::uint64_t interval = std::max<std::uint64_t>(cfg.depth_schedule_interval, 1);
    const std::uint64_t d = 1 + executed / interval;
    return static_cast<int>(std::min<std::uint64_t>(d, static_cast<std::uint64_t>(std::max(cfg.max_depth, 1))));
}

sql::FeatureSet QueryCase::features() const {
    sql::FeatureSet s = base_features;
    s.insert(predicate_features.begin(), predicate_features.end());
    return s;
}

FeatureIndex choose_alternative(const ChoiceContext& ctx, const std::vector<FeatureState>& states, Rng& rng) {
    const ChoiceContext r = redistribute(ctx, states);
    return r.alternatives[rng.weighted(r.weights)];
}

Generator::Generator(const FeatureCatalog& catalog, GenConfig cfg)
    : cat_(&catalog), cfg_(cfg), states_(catalog.size(), FeatureState::Unknown) {
    if (cfg_.max_depth < 1) throw Error("max_depth must be at least 1");
    f_where_ = cat_->find("WHERE");
    f_select_ = cat_->find("SELECT");
    f_distinct_ = cat_->find("DISTINCT");
    f_subquery_ = cat_->find("SUBQUERY");
    f_unique_ = cat_->find("UNIQUE");
    for (DataType t : kTypes) {
        std::vector<FeatureIndex> alts;
        for (FeatureIndex f : cat_->expression_features()) {
            const auto& sig = *cat_->at(f).signature;
            if (sig.result == ParamType::Generic || concrete_type(sig.result) == t) alts.push_back(f);
        }
        if (t == DataType::Boolean && f_subquery_) alts.push_back(*f_subquery_);
        base_contexts_.emplace(expr_rule(t), make_context(expr_rule(t), alts));
    }
    base_contexts_.emplace("join", make_context("join", cat_->joins()));
    std::vector<FeatureIndex> types;
    for (FeatureIndex f : cat_->of_category(FeatureCategory::DataType)) {
        try {
            parse_type_token(cat_->at(f).raw_template);
            types.push_back(f);
        } catch (const Error&) {
        }
    }
    base_contexts_.emplace("datatype", make_context("datatype", types));
    rebuild();
}

void Generator::set_states(const std::vector<FeatureState>& states) {
    if (states.size() != cat_->size()) throw Error("state snapshot does not match catalog");
    states_ = states;
    rebuild();
}

TypingMode Generator::effective_typing() const {
    if (cfg_.typing == TypingMode::Static) return TypingMode::Static;
    auto ic = cat_->find("IMPLICIT_CAST");
    if (!ic || states_[*ic] == FeatureState::Unsupported) return TypingMode::Static;
    return TypingMode::Dynamic;
}

bool Generator::should_generate(FeatureIndex f) const { return states_.at(f) != FeatureState::Unsupported; }

bool Generator::should_generate(std::string_view id) const {
    auto f = cat_->find(id);
    return f && should_generate(*f);
}

void Generator::rebuild() {
    const bool stat = effective_typing() == TypingMode::Static;
    allowed_types_.clear();
    for (FeatureIndex f : cat_->of_category(FeatureCategory::Function)) {
        const auto& params = cat_->at(f).signature->params;
        std::vector<std::vector<DataType>> per_arg;
        for (std::size_t i = 0; i < params.size(); ++i) {
            std::vector<DataType> ok;
            for (DataType t : kTypes) {
                if (stat && concrete_type(params[i]) != DataType::Untyped && concrete_type(params[i]) != t) continue;
                if (should_generate(cat_->composite(f, static_cast<int>(i), t))) ok.push_back(t);
            }
            per_arg.push_back(std::move(ok));
        }
        allowed_types_.emplace(f, std::move(per_arg));
    }
    contexts_.clear();
    for (const auto& [rule, base] : base_contexts_) {
        ChoiceContext filtered{rule, {}, {}};
        for (FeatureIndex f : base.alternatives) {
            if (rule.rfind("expr:", 0) == 0) {
                const DataType target = parse_type_token(rule.substr(5));
                if (!usable_for(f, target)) continue;
            }
            filtered.alternatives.push_back(f);
        }
        try {
            contexts_.emplace(rule, redistribute(filtered, states_));
        } catch (const RuleExhaustedError&) {
        }
    }
}

bool Generator::usable_for(FeatureIndex f, DataType target) const {
    if (f_subquery_ && f == *f_subquery_)
        return f_select_ && f_where_ && should_generate(*f_select_) && should_generate(*f_where_);
    const auto it = allowed_types_.find(f);
    if (it == allowed_types_.end()) return true;  // operators carry no composite features
    const auto& params = cat_->at(f).signature->params;
    const bool stat = effective_typing() == TypingMode::Static;
    std::vector<DataType> generic(std::begin(kTypes), std::end(kTypes));
    for (std::size_t i = 0; i < params.size(); ++i) {
        const auto& ok = it->second[i];
        if (ok.empty()) return false;
        if (stat && params[i] == ParamType::Generic) {
            std::vector<DataType> keep;
            for (DataType t : generic)
                if (contains(ok, t)) keep.push_back(t);
            generic = std::move(keep);
        }
    }
    if (!stat) return true;
    if (cat_->at(f).signature->result == ParamType::Generic) return contains(generic, target);
    return !generic.empty();
}

const ChoiceContext* Generator::context(const std::string& rule) const {
    auto it = contexts_.find(rule);
    return it == contexts_.end() ? nullptr : &it->second;
}

FeatureIndex Generator::choose(const std::string& rule, Rng& rng, sql::FeatureSet& features) const {
    const ChoiceContext* ctx = context(rule);
    if (!ctx) throw RuleExhaustedError("rule '" + rule + "' has no supported alternative");
    const FeatureIndex f = ctx->alternatives[rng.weighted(ctx->weights)];
    features.insert(f);
    return f;
}

DataType Generator::slot_type(Rng& rng) const { return kTypes[rng.below(3)]; }

sql::Expr Generator::constant(DataType t, Rng& rng) const {
    switch (t) {
        case DataType::Integer: {
            static const std::int64_t fixed[] = {-1, 0, 1, 2};
            const auto k = rng.below(6);
            if (k < 4) return sql::Expr::constant(Value::integer(fixed[k]));
            if (k == 4) return sql::Expr::constant(Value::integer(rng.range(-65535, 65535)));
            return sql::Expr::constant(Value::null());
        }
        case DataType::Text: {
            if (rng.below(8) == 0) return sql::Expr::constant(Value::null());
            return sql::Expr::constant(Value::text(kStringPool[rng.below(std::size(kStringPool))]));
        }
        default: {
            const auto k = rng.below(3);
            if (k == 2) return sql::Expr::constant(Value::null());
            return sql::Expr::constant(Value::boolean(k == 0));
        }
    }
}

sql::Expr Generator::leaf(DataType t, const std::vector<const TableDef*>& scope, Rng& rng) const {
    std::vector<std::pair<const TableDef*, const ColumnDef*>> cols;
    for (const TableDef* tab : scope)
        for (const auto& c : tab->columns)
            if (c.dtype == t) cols.emplace_back(tab, &c);
    if (!cols.empty() && rng.chance(0.6)) {
        const auto& [tab, col] = cols[rng.below(cols.size())];
        return sql::Expr::column_ref(tab->name, col->name, col->dtype);
    }
    return constant(t, rng);
}

sql::Expr Generator::generate_expression(DataType target, int depth_budget, const std::vector<const TableDef*>& scope,
                                         const SchemaModel* schema, Rng& rng, sql::FeatureSet& features) {
    if (depth_budget < 0) throw Error("depth budget must be non-negative");
    if (depth_budget == 0 || rng.chance(0.3)) return leaf(target, scope, rng);
    const ChoiceContext* ctx = context(expr_rule(target));
    if (!ctx) return leaf(target, scope, rng);
    const FeatureIndex f = ctx->alternatives[rng.weighted(ctx->weights)];

    if (f_subquery_ && f == *f_subquery_) {
        if (!schema || schema->empty()) return leaf(target, scope, rng);
        const TableDef& inner = schema->random_table(rng);
        sql::Select sub;
        sub.items.push_back({sql::Expr::constant(Value::integer(1)), ""});
        sub.from = sql::FromItem::leaf(inner.name);
        if (f_distinct_ && should_generate(*f_distinct_) && rng.chance(0.25)) {
            sub.distinct = true;
            features.insert(*f_distinct_);
        }
        features.insert(f);
        features.insert(*f_select_);
        sub.where = predicate(depth_budget - 1, {&inner}, schema, rng, features);
        return sql::Expr::exists(std::move(sub));
    }

    const FeatureDef& def = cat_->at(f);
    const auto& sig = *def.signature;
    const bool stat = effective_typing() == TypingMode::Static;
    const auto allowed = allowed_types_.find(f);
    auto pick = [&](std::size_t i) -> DataType {
        if (allowed != allowed_types_.end()) return allowed->second[i][rng.below(allowed->second[i].size())];
        return slot_type(rng);
    };
    std::vector<DataType> arg_types(sig.params.size());
    if (stat) {
        DataType generic = target;
        if (sig.result != ParamType::Generic) {
            std::vector<DataType> options(std::begin(kTypes), std::end(kTypes));
            if (allowed != allowed_types_.end()) {
                for (std::size_t i = 0; i < sig.params.size(); ++i) {
                    if (sig.params[i] != ParamType::Generic) continue;
                    std::vector<DataType> keep;
                    for (DataType t : options)
                        if (contains(allowed->second[i], t)) keep.push_back(t);
                    options = std::move(keep);
                }
            }
            generic = options[rng.below(options.size())];
        }
        for (std::size_t i = 0; i < sig.params.size(); ++i) {
            switch (sig.params[i]) {
                case ParamType::Generic: arg_types[i] = generic; break;
                case ParamType::Any: arg_types[i] = pick(i); break;
                default: arg_types[i] = concrete_type(sig.params[i]);
            }
        }
    } else {
        for (std::size_t i = 0; i < sig.params.size(); ++i) arg_types[i] = pick(i);
    }

    std::vector<sql::Expr> args;
    args.reserve(arg_types.size());
    for (DataType t : arg_types) args.push_back(generate_expression(t, depth_budget - 1, scope, schema, rng, features));
    sql::Expr e = sql::Expr::call(f, std::move(args));
    features.insert(f);
    if (def.category == FeatureCategory::Function) {
        for (std::size_t i = 0; i < e.args.size(); ++i)
            features.insert(cat_->composite(f, static_cast<int>(i), sql::composite_arg_type(e, i, *cat_)));
    }
    if (sql::ill_typed_call(e, *cat_)) {
        if (auto ic = cat_->find("IMPLICIT_CAST")) features.insert(*ic);
    }
    return e;
}

sql::Expr Generator::predicate(int depth, const std::vector<const TableDef*>& scope, const SchemaModel* schema,
                               Rng& rng, sql::FeatureSet& features) {
    if (f_where_) features.insert(*f_where_);
    const DataType target = effective_typing() == TypingMode::Static ? DataType::Boolean : slot_type(rng);
    sql::Expr e = generate_expression(target, depth, scope, schema, rng, features);
    if (sql::ill_typed_slot(sql::infer_type(e, *cat_), DataType::Boolean)) {
        if (auto ic = cat_->find("IMPLICIT_CAST")) features.insert(*ic);
    }
    return e;
}

bool Generator::suppressed(const sql::FeatureSet& s) const {
    return std::any_of(s.begin(), s.end(), [&](FeatureIndex f) { return !should_generate(f); });
}

std::optional<QueryCase> Generator::generate_query(const SchemaModel& schema, Rng& rng) {
    if (!f_select_ || !f_where_ || !should_generate(*f_select_) || !should_generate(*f_where_)) return std::nullopt;
    if (schema.empty()) throw EmptySchemaError("query generation needs a table");
    const bool stat = effective_typing() == TypingMode::Static;
    for (int attempt = 0; attempt < 20; ++attempt) {
        QueryCase qc;
        qc.base_features.insert(*f_select_);
        std::vector<const TableDef*> pool;
        for (const auto& t : schema.tables()) pool.push_back(&t);
        const double r = rng.unit();
        std::size_t n = r < 0.5 ? 1 : r < 0.875 ? 2 : 3;
        n = std::min(n, pool.size());
        std::vector<const TableDef*> sources;
        for (std::size_t i = 0; i < n; ++i) {
            const auto k = rng.below(pool.size());
            sources.push_back(pool[k]);
            pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(k));
        }
        std::vector<const TableDef*> scope{sources[0]};
        sql::FromItem from = sql::FromItem::leaf(sources[0]->name);
        for (std::size_t i = 1; i < sources.size(); ++i) {
            if (!context("join")) break;
            const FeatureIndex j = choose("join", rng, qc.base_features);
            scope.push_back(sources[i]);
            std::optional<sql::Expr> on;
            if (cat_->at(j).signature) {
                const DataType target = stat ? DataType::Boolean : slot_type(rng);
                on = generate_expression(target, depth_, scope, &schema, rng, qc.base_features);
                if (sql::ill_typed_slot(sql::infer_type(*on, *cat_), DataType::Boolean)) {
                    if (auto ic = cat_->find("IMPLICIT_CAST")) qc.base_features.insert(*ic);
                }
            }
            from = sql::FromItem::make_join(j, std::move(from), sql::FromItem::leaf(sources[i]->name), std::move(on));
        }
        qc.base.from = std::move(from);
        for (const TableDef* t : scope)
            for (const auto& c : t->columns)
                qc.base.items.push_back({sql::Expr::column_ref(t->name, c.name, c.dtype), ""});
        qc.predicate = predicate(depth_, scope, &schema, rng, qc.predicate_features);
        if (!suppressed(qc.features())) return qc;
    }
    return std::nullopt;
}

std::optional<GeneratedStatement> Generator::generate_statement(sql::StatementKind kind, SchemaModel& schema,
                                                                Rng& rng) {
    for (int attempt = 0; attempt < 20; ++attempt) {
        auto st = build_statement(kind, schema, rng);
        if (!st) return std::nullopt;
        if (!suppressed(st->features)) {
            st->sql = sql::render(st->ast, *cat_);
            return st;
        }
    }
    return std::nullopt;
}

std::optional<GeneratedStatement> Generator::build_statement(sql::StatementKind kind, SchemaModel& schema, Rng& rng) {
    using K = sql::StatementKind;
    GeneratedStatement out;
    out.kind = kind;
    auto require = [&](const char* id) {
        auto f = cat_->find(id);
        if (!f || !should_generate(*f)) return false;
        out.features.insert(*f);
        return true;
    };
    const bool stat = effective_typing() == TypingMode::Static;
    switch (kind) {
        case K::CreateTable: {
            if (!require("TABLE") || !context("datatype")) return std::nullopt;
            sql::CreateTable ct;
            ct.name = schema.fresh_name(ObjectClass::Table);
            const auto ncols = rng.range(1, 3);
            for (std::int64_t i = 0; i < ncols; ++i) {
                const FeatureIndex t = choose("datatype", rng, out.features);
                ct.columns.push_back({"c" + std::to_string(i), parse_type_token(cat_->at(t).raw_template)});
            }
            out.ast = std::move(ct);
            return out;
        }
        case K::CreateIndex: {
            const TableDef& t = schema.random_base_table(rng);
            if (!require("INDEX")) return std::nullopt;
            sql::CreateIndex ix;
            ix.table = t.name;
            std::vector<std::string> cols;
            for (const auto& c : t.columns) cols.push_back(c.name);
            const auto n = rng.range(1, static_cast<std::int64_t>(cols.size()));
            for (std::int64_t i = 0; i < n; ++i) {
                const auto k = rng.below(cols.size());
                ix.columns.push_back(cols[k]);
                cols.erase(cols.begin() + static_cast<std::ptrdiff_t>(k));
            }
            if (f_unique_ && should_generate(*f_unique_) && rng.chance(0.3)) {
                ix.unique = true;
                out.features.insert(*f_unique_);
            }
            ix.name = schema.fresh_name(ObjectClass::Index);
            out.ast = std::move(ix);
            return out;
        }
        case K::CreateView: {
            const TableDef& t = schema.random_base_table(rng);
            if (!require("VIEW") || !require("SELECT")) return std::nullopt;
            sql::CreateView v;
            for (const auto& c : t.columns)
                v.select.items.push_back({sql::Expr::column_ref(t.name, c.name, c.dtype), c.name});
            v.select.from = sql::FromItem::leaf(t.name);
            if (f_distinct_ && should_generate(*f_distinct_) && rng.chance(0.3)) {
                v.select.distinct = true;
                out.features.insert(*f_distinct_);
            }
            if (f_where_ && should_generate(*f_where_) && rng.chance(0.5))
                v.select.where = predicate(depth_, {&t}, &schema, rng, out.features);
            v.name = schema.fresh_name(ObjectClass::View);
            out.ast = std::move(v);
            return out;
        }
        case K::Insert: {
            const TableDef& t = schema.random_base_table(rng);
            if (!require("INSERT")) return std::nullopt;
            sql::Insert ins;
            ins.table = t.name;
            for (const auto& c : t.columns) {
                ins.columns.push_back(c.name);
                ins.column_types.push_back(c.dtype);
            }
            const auto nrows = rng.range(1, 10);
            bool cast = false;
            for (std::int64_t r = 0; r < nrows; ++r) {
                std::vector<sql::Expr> row;
                for (const auto& c : t.columns) {
                    const DataType vt = stat ? c.dtype : slot_type(rng);
                    row.push_back(constant(vt, rng));
                    cast |= sql::ill_typed_slot(row.back().dtype, c.dtype);
                }
                ins.rows.push_back(std::move(row));
            }
            if (cast) {
                if (auto ic = cat_->find("IMPLICIT_CAST")) out.features.insert(*ic);
            }
            out.ast = std::move(ins);
            return out;
        }
        case K::Analyze: {
            if (!require("ANALYZE")) return std::nullopt;
            out.ast = sql::Analyze{};
            return out;
        }
        case K::Select: {
            auto qc = generate_query(schema, rng);
            if (!qc) return std::nullopt;
            qc->base.where = std::move(qc->predicate);
            out.features = qc->features();
            out.ast = std::move(qc->base);
            return out;
        }
    }
    return std::nullopt;
}

}  // namespace adaquery
