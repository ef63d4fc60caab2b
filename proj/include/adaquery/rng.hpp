#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string_view>
#include <vector>

namespace adaquery {

// mt19937_64 with our own bounded sampling, so a seed yields the same stream
// on every standard library (the std distributions are implementation-defined).
class Rng {
public:
    explicit Rng(std::uint64_t seed = 0) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }
    // Uniform in [0, bound); bound > 0.
    std::uint64_t below(std::uint64_t bound);
    // Uniform in [lo, hi].
    std::int64_t range(std::int64_t lo, std::int64_t hi);
    // Uniform in [0, 1) with 53 bits.
    double unit();
    bool chance(double p) { return unit() < p; }
    // Index drawn proportionally to weights; at least one weight must be > 0.
    std::size_t weighted(std::span<const double> weights);

    template <class T>
    const T& pick(const std::vector<T>& v) {
        return v[below(v.size())];
    }

private:
    std::mt19937_64 engine_;
};

std::uint64_t splitmix64(std::uint64_t x);
// Seed for worker `index` of a campaign seeded with `seed`.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index);
std::uint64_t fnv1a(std::string_view text, std::uint64_t h = 0xcbf29ce484222325ULL);

}  // namespace adaquery
