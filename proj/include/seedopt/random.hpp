#pragma once

#include <cstdint>
#include <random>

namespace seedopt {

/// SplitMix64 finalizer. Child seeds are derived as mix(parent ^ mix(stream)),
/// so every consumer of randomness gets an independent, reproducible stream.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t stream) {
    return splitmix64(parent ^ splitmix64(stream + 0x632be59bd9b4e019ULL));
}

using Rng = std::mt19937_64;

}  // namespace seedopt
