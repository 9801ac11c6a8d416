#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace pedcc {

// SplitMix64 finalizer; used to derive well-mixed stream seeds from
// small user-facing seeds (0, 1, 2, ...).
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
    return splitmix64(splitmix64(seed) ^ stream);
}

inline std::mt19937_64 make_engine(std::uint64_t seed, std::uint64_t stream = 0) {
    return std::mt19937_64(mix_seed(seed, stream));
}

// In-place Fisher-Yates driven directly by engine output so the
// permutation depends only on the seed.
template <typename T>
void fisher_yates(std::vector<T>& items, std::mt19937_64& engine) {
    for (std::size_t i = items.size(); i > 1; --i) {
        std::size_t j = static_cast<std::size_t>(engine() % i);
        std::swap(items[i - 1], items[j]);
    }
}

}  // namespace pedcc
