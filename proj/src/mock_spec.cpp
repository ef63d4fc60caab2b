#include <algorithm>
#include <fstream>
#include <sstream>

#include "adaquery/mock.hpp"

namespace adaquery {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

BugEffect parse_effect(std::string_view s, std::size_t line) {
    if (s == "first_arg") return BugEffect::FirstArg;
    if (s == "null_as_true") return BugEffect::NullAsTrue;
    if (s == "invert") return BugEffect::Invert;
    throw ParseError("unknown bug effect '" + std::string(s) + "'", line);
}

}  // namespace

std::string_view to_string(BugEffect e) {
    switch (e) {
        case BugEffect::FirstArg: return "first_arg";
        case BugEffect::NullAsTrue: return "null_as_true";
        case BugEffect::Invert: return "invert";
    }
    return "?";
}

MockDialectSpec MockDialectSpec::parse(std::string_view text) {
    MockDialectSpec spec;
    std::string section;
    std::size_t lineno = 0;
    bool typing_seen = false;
    std::istringstream in{std::string(text)};
    std::string raw;
    while (std::getline(in, raw)) {
        ++lineno;
        std::string_view line = trim(raw);
        if (line.empty() || line.front() == '#') continue;
        if (line.front() == '[') {
            if (line.back() != ']') throw ParseError("malformed section header", lineno);
            section = std::string(line.substr(1, line.size() - 2));
            if (section != "supported" && section != "typing" && section != "bugs" && section != "flaky")
                throw ParseError("unknown section [" + section + "]", lineno);
            continue;
        }
        if (section.empty()) throw ParseError("content before the first section", lineno);
        if (section == "supported") {
            std::istringstream words{std::string(line)};
            std::string w;
            while (words >> w) {
                if (w == "@all") {
                    spec.all_supported = true;
                } else {
                    if (!valid_feature_id(w)) throw ParseError("invalid feature id '" + w + "'", lineno);
                    spec.supported.insert(w);
                }
            }
        } else if (section == "typing") {
            if (typing_seen) throw ParseError("duplicate typing line", lineno);
            typing_seen = true;
            if (line == "static") spec.typing = MockTyping::Static;
            else if (line == "dynamic") spec.typing = MockTyping::Dynamic;
            else throw ParseError("typing must be static or dynamic", lineno);
        } else if (section == "bugs") {
            const auto sp = line.find_first_of(" \t");
            if (sp == std::string_view::npos) throw ParseError("expected 'ID,ID effect'", lineno);
            BugInjection bug;
            bug.effect = parse_effect(trim(line.substr(sp)), lineno);
            std::string_view ids = line.substr(0, sp);
            while (!ids.empty()) {
                const auto comma = ids.find(',');
                std::string id(trim(ids.substr(0, comma)));
                if (!valid_feature_id(id)) throw ParseError("invalid feature id '" + id + "'", lineno);
                bug.trigger.push_back(std::move(id));
                ids = comma == std::string_view::npos ? std::string_view{} : ids.substr(comma + 1);
            }
            spec.bugs.push_back(std::move(bug));
        } else {
            const auto sp = line.find_first_of(" \t");
            if (sp == std::string_view::npos) throw ParseError("expected 'ID probability'", lineno);
            std::string id(line.substr(0, sp));
            std::string prob(trim(line.substr(sp)));
            double p = 0;
            try {
                std::size_t used = 0;
                p = std::stod(prob, &used);
                if (used != prob.size()) throw std::invalid_argument("trailing");
            } catch (const std::exception&) {
                throw ParseError("bad probability '" + prob + "'", lineno);
            }
            if (!(p >= 0 && p <= 1)) throw ParseError("probability must lie in [0,1]", lineno);
            spec.flaky[id] = p;
        }
    }
    return spec;
}

MockDialectSpec MockDialectSpec::load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot read mock spec " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse(ss.str());
}

std::string MockDialectSpec::serialize() const {
    std::string out = "[supported]\n";
    if (all_supported) out += "@all\n";
    for (const auto& id : supported) out += id + "\n";
    out += "[typing]\n";
    out += typing == MockTyping::Static ? "static\n" : "dynamic\n";
    out += "[bugs]\n";
    for (const auto& b : bugs) {
        for (std::size_t i = 0; i < b.trigger.size(); ++i) out += (i ? "," : "") + b.trigger[i];
        out += " " + std::string(to_string(b.effect)) + "\n";
    }
    out += "[flaky]\n";
    for (const auto& [id, p] : flaky) {
        std::ostringstream ps;
        ps << p;
        out += id + " " + ps.str() + "\n";
    }
    return out;
}

void MockDialectSpec::validate(const FeatureCatalog& cat) const {
    for (const auto& id : supported) {
        const FeatureIndex f = cat.index(id);
        const auto& def = cat.at(f);
        if ((def.category == FeatureCategory::Function || def.category == FeatureCategory::Operator) &&
            !mock::implemented(id))
            throw CatalogError("the mock engine does not implement " + id);
    }
    for (const auto& bug : bugs) {
        if (bug.trigger.empty()) throw CatalogError("bug without trigger features");
        for (const auto& id : bug.trigger) {
            if (!supports(cat.index(id), cat))
                throw CatalogError("bug trigger " + id + " is not a supported feature");
        }
        const auto& root = cat.at(cat.index(bug.trigger.back()));
        if (!root.signature || root.is_join)
            throw CatalogError("bug root " + root.id + " must be a function or operator");
    }
    for (const auto& [id, p] : flaky) cat.index(id);
}

bool MockDialectSpec::supports(FeatureIndex f, const FeatureCatalog& cat) const {
    const auto& def = cat.at(f);
    if (def.category == FeatureCategory::CompositeArgType) return supports(def.parent, cat);
    if (def.id == "IMPLICIT_CAST") return typing == MockTyping::Dynamic;
    const bool expression = def.category == FeatureCategory::Function || def.category == FeatureCategory::Operator;
    if (expression && !mock::implemented(def.id)) return false;
    return all_supported || supported.count(def.id) > 0;
}

const MockTable* MockDatabase::find(const std::string& name) const {
    for (const auto& t : tables)
        if (t.def.name == name) return &t;
    return nullptr;
}

MockTable* MockDatabase::find(const std::string& name) {
    for (auto& t : tables)
        if (t.def.name == name) return &t;
    return nullptr;
}

bool MockDatabase::has_object(const std::string& name) const {
    if (find(name)) return true;
    return std::any_of(indexes.begin(), indexes.end(), [&](const IndexDef& i) { return i.name == name; });
}

std::vector<std::string> MockDatabase::describe() const {
    std::vector<std::string> out;
    for (const auto& t : tables) out.push_back(describe_object(t.def));
    for (const auto& i : indexes) out.push_back(describe_object(i));
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace adaquery
