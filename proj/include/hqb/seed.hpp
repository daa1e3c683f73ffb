#pragma once

#include <cstdint>
#include <string_view>

namespace hqb {

// splitmix64 finalizer; full 64-bit avalanche.
inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::uint64_t hash_tag(std::string_view tag) {
    // FNV-1a
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : tag) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

// Counter-based seed derivation: child streams are keyed by (tag, counter),
// so adding new tags or counters never perturbs existing streams.
inline std::uint64_t derive_seed(std::uint64_t base, std::string_view tag, std::uint64_t counter = 0) {
    return mix64(base ^ hash_tag(tag) ^ mix64(counter));
}

}  // namespace hqb
