#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace budgetal {

// splitmix64: used to derive decorrelated engine seeds from (seed, stream) pairs.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
    return splitmix64(splitmix64(seed) ^ (0xd1b54a32d192ed03ULL * (stream + 1)));
}

inline std::mt19937_64 make_engine(std::uint64_t seed, std::uint64_t stream = 0) {
    return std::mt19937_64(derive_seed(seed, stream));
}

// First k elements of a seeded random permutation of `items` (partial Fisher-Yates).
template <typename T>
std::vector<T> sample_without_replacement(std::vector<T> items, std::size_t k,
                                          std::mt19937_64& rng) {
    if (k > items.size()) k = items.size();
    for (std::size_t i = 0; i < k; ++i) {
        std::uniform_int_distribution<std::size_t> pick(i, items.size() - 1);
        std::swap(items[i], items[pick(rng)]);
    }
    items.resize(k);
    return items;
}

}  // namespace budgetal
