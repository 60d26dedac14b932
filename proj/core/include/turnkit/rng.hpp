#pragma once

#include <cstdint>
#include <random>
#include <utility>
#include <vector>

namespace turnkit {

// std::mt19937_64 output is pinned by the standard; these helpers replace
// std::uniform_int_distribution / std::shuffle, whose draw sequences are
// implementation-defined, so seeded runs are reproducible across toolchains.

/// Uniform draw in [0, bound). bound must be > 0.
inline std::uint64_t uniform_u64(std::mt19937_64& g, std::uint64_t bound) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    std::uint64_t x;
    do {
        x = g();
    } while (x >= limit);
    return x % bound;
}

/// Uniform draw in [lo, hi], inclusive.
inline std::int64_t uniform_i64(std::mt19937_64& g, std::int64_t lo, std::int64_t hi) {
    return lo + static_cast<std::int64_t>(
                    uniform_u64(g, static_cast<std::uint64_t>(hi - lo) + 1));
}

/// In-place Fisher-Yates shuffle.
template <typename T>
void deterministic_shuffle(std::vector<T>& v, std::mt19937_64& g) {
    for (std::size_t i = v.size(); i > 1; --i) {
        const std::size_t j = static_cast<std::size_t>(uniform_u64(g, i));
        std::swap(v[i - 1], v[j]);
    }
}

/// First k elements of a partial Fisher-Yates pass: a uniform sample without
/// replacement. k must be <= v.size().
template <typename T>
std::vector<T> sample_without_replacement(std::vector<T> v, std::size_t k, std::mt19937_64& g) {
    for (std::size_t i = 0; i < k; ++i) {
        const std::size_t j = i + static_cast<std::size_t>(uniform_u64(g, v.size() - i));
        std::swap(v[i], v[j]);
    }
    v.resize(k);
    return v;
}

} // namespace turnkit
