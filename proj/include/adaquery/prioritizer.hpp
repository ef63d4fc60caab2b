#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace adaquery {

using FeatureIdSet = std::set<std::string>;

struct Classification {
    bool is_new = true;
    // Id of the matched historical record when !is_new.
    std::uint64_t duplicate_of = 0;

    bool operator==(const Classification&) const = default;
};

std::string to_string(const Classification& c);

// Feature sets of records classified New, in insertion order. Each set is
// kept as a bitset over the features seen so far for fast subset scans.
class HistoryStore {
public:
    struct Entry {
        std::uint64_t id;
        FeatureIdSet features;
        std::vector<std::uint64_t> bits;
    };

    void append(std::uint64_t id, const FeatureIdSet& s);
    const std::vector<Entry>& entries() const { return entries_; }
    std::size_t size() const { return entries_.size(); }
    // Lowest-id entry whose set is a subset of s, or nullptr.
    const Entry* first_subset_of(const FeatureIdSet& s) const;

private:
    std::vector<Entry> entries_;
    std::map<std::string, std::size_t> bit_of_;
};

// PotentialDuplicate(first S ⊆ s_new) or New; New appends s_new under `new_id`.
Classification classify(const FeatureIdSet& s_new, HistoryStore& history, std::uint64_t new_id);
// Same contract by a naive std::includes scan.
Classification brute_force_classify(const FeatureIdSet& s_new, HistoryStore& history, std::uint64_t new_id);

}  // namespace adaquery
