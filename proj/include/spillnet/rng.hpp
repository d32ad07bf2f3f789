#pragma once

#include <cstdint>
#include <random>

namespace spillnet {

using RngEngine = std::mt19937_64;

/// splitmix64 step; the usual stateless mixer.
inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Counter-based stream derivation: the (stream, substream) pair of a master
/// seed maps to one engine seed, independent of scheduling order.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream,
                                 std::uint64_t substream = 0) {
    return mix64(mix64(mix64(master) ^ stream) ^ (substream * 0xd1342543de82ef95ULL + 1));
}

inline RngEngine make_engine(std::uint64_t master, std::uint64_t stream,
                             std::uint64_t substream = 0) {
    return RngEngine(derive_seed(master, stream, substream));
}

}  // namespace spillnet
