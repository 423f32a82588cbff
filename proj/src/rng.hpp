#pragma once

#include <cstdint>
#include <random>

namespace xpay::detail {

// Raw mt19937_64 output with modulo: identical sequences on every platform,
// unlike the standard distributions.

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Independent stream per purpose so adding clock draws never shifts delays.
inline std::mt19937_64 make_stream(std::uint64_t seed, std::uint64_t stream) {
    return std::mt19937_64(splitmix64(seed ^ splitmix64(stream)));
}

inline std::uint64_t pick(std::mt19937_64& rng, std::uint64_t bound) { return rng() % bound; }

}  // namespace xpay::detail
