#pragma once

#include <cstdint>
#include <string_view>

namespace ctsconf::detail {

inline constexpr std::uint64_t fnv1a64(std::string_view s, std::uint64_t h = 0xcbf29ce484222325ULL) {
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Stable per-key seed; independent of scheduling and of std::hash.
inline constexpr std::uint64_t derive_seed(std::uint64_t seed, std::string_view key) {
    return splitmix64(seed ^ fnv1a64(key));
}

/// Uniform integer in [0, bound) from a 64-bit generator, by rejection so the
/// result does not depend on the standard library's distribution code.
template <class Engine>
std::uint64_t uniform_below(Engine& eng, std::uint64_t bound) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    std::uint64_t v;
    do {
        v = eng();
    } while (v >= limit);
    return v % bound;
}

}  // namespace ctsconf::detail
