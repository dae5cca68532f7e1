#pragma once

#include <cstdint>

namespace tap {

// SplitMix64 finalizer (Steele/Lea/Flood; Vigna's fixed-increment variant).
// Bijective on 64-bit words with full avalanche.
constexpr std::uint64_t mix64(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ULL;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBULL;
    z ^= z >> 31;
    return z;
}

inline constexpr std::uint64_t kGoldenGamma = 0x9E3779B97F4A7C15ULL;

// Keyed combiner for deriving substream seeds and per-entity hashes.
constexpr std::uint64_t hash_combine(std::uint64_t seed, std::uint64_t value) {
    return mix64(seed ^ (mix64(value + kGoldenGamma) + (seed << 6) + (seed >> 2)));
}

// Counter-based generator: state advances by a fixed gamma, output is the
// finalizer of the counter. Streams derived from distinct tags are
// statistically independent, which keeps parallel sampling reproducible
// regardless of thread schedule.
class SplitMix64 {
public:
    explicit constexpr SplitMix64(std::uint64_t seed) : state_(seed) {}

    constexpr std::uint64_t next() {
        state_ += kGoldenGamma;
        return mix64(state_);
    }

    // Uniform double in [0, 1).
    double next_unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    bool bernoulli(double p) { return next_unit() < p; }

    // Uniform in [0, bound) via multiply-shift.
    std::uint64_t next_below(std::uint64_t bound) {
        return static_cast<std::uint64_t>(
            (static_cast<unsigned __int128>(next()) * bound) >> 64);
    }

private:
    std::uint64_t state_;
};

inline SplitMix64 derive_stream(std::uint64_t master, std::uint64_t tag) {
    return SplitMix64(hash_combine(master, tag));
}

inline SplitMix64 derive_stream(std::uint64_t master, std::uint64_t tag1, std::uint64_t tag2) {
    return SplitMix64(hash_combine(hash_combine(master, tag1), tag2));
}

// Rank of the node-world pair (v, i): uniform on the open interval (0, 1),
// realized lazily from the keyed hash so no n*ell rank matrix is stored.
inline double pair_rank(std::uint64_t rank_seed, std::uint32_t v, std::uint32_t i) {
    const std::uint64_t h = hash_combine(hash_combine(rank_seed, v), i);
    return (static_cast<double>(h >> 11) + 0.5) * 0x1.0p-53;
}

} // namespace tap
