#include "adaquery/prioritizer.hpp"

#include <algorithm>
#include <cstdio>

namespace adaquery {

std::string to_string(const Classification& c) {
    if (c.is_new) return "New";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%06llu", static_cast<unsigned long long>(c.duplicate_of));
    return std::string("PotentialDuplicate of bug-") + buf;
}

void HistoryStore::append(std::uint64_t id, const FeatureIdSet& s) {
    Entry e{id, s, {}};
    for (const auto& f : s) {
        auto [it, inserted] = bit_of_.emplace(f, bit_of_.size());
        const std::size_t bit = it->second;
        if (e.bits.size() <= bit / 64) e.bits.resize(bit / 64 + 1, 0);
        e.bits[bit / 64] |= std::uint64_t{1} << (bit % 64);
    }
    entries_.push_back(std::move(e));
}

const HistoryStore::Entry* HistoryStore::first_subset_of(const FeatureIdSet& s) const {
    std::vector<std::uint64_t> bits((bit_of_.size() + 63) / 64, 0);
    for (const auto& f : s) {
        auto it = bit_of_.find(f);
        if (it != bit_of_.end()) bits[it->second / 64] |= std::uint64_t{1} << (it->second % 64);
    }
    for (const auto& e : entries_) {
        bool subset = true;
        for (std::size_t w = 0; w < e.bits.size() && subset; ++w) subset = (e.bits[w] & ~bits[w]) == 0;
        if (subset) return &e;
    }
    return nullptr;
}

Classification classify(const FeatureIdSet& s_new, HistoryStore& history, std::uint64_t new_id) {
    if (const auto* e = history.first_subset_of(s_new)) return {false, e->id};
    history.append(new_id, s_new);
    return {true, 0};
}

Classification brute_force_classify(const FeatureIdSet& s_new, HistoryStore& history, std::uint64_t new_id) {
    const HistoryStore::Entry* best = nullptr;
    for (const auto& e : history.entries()) {
        if (!std::includes(s_new.begin(), s_new.end(), e.features.begin(), e.features.end())) continue;
        if (!best || e.id < best->id) best = &e;
    }
    if (best) return {false, best->id};
    history.append(new_id, s_new);
    return {true, 0};
}

}  // namespace adaquery
