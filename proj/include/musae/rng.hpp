#pragma once

#include <cstdint>
#include <vector>

namespace musae {

inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// Derives an independent stream seed from (seed, ordinal). Used for
// per-walk and per-scale sub-seeds so parallel generation is
// order-independent.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t ordinal) {
    std::uint64_t s = seed ^ (0xA0761D6478BD642FULL * (ordinal + 1));
    splitmix64(s);
    return splitmix64(s);
}

// xoroshiro128+ with splitmix64 seeding. Fixed algorithm so that seeded
// runs are reproducible across compilers and platforms, which the
// standard distributions do not guarantee.
class Rng {
public:
    explicit Rng(std::uint64_t seed) {
        std::uint64_t s = seed;
        state_[0] = splitmix64(s);
        state_[1] = splitmix64(s);
    }

    std::uint64_t u64() {
        const std::uint64_t s0 = state_[0];
        std::uint64_t s1 = state_[1];
        const std::uint64_t result = s0 + s1;
        s1 ^= s0;
        state_[0] = rotl(s0, 55) ^ s1 ^ (s1 << 14);
        state_[1] = rotl(s1, 36);
        return result;
    }

    // Uniform integer in [0, bound). Multiply-shift; bias is O(bound/2^64).
    std::uint64_t uniform(std::uint64_t bound) {
        return static_cast<std::uint64_t>(
            (static_cast<unsigned __int128>(u64()) * bound) >> 64);
    }

    // Uniform double in [0, 1) with 53 random bits.
    double real() { return static_cast<double>(u64() >> 11) * 0x1.0p-53; }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = uniform(i);
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }

    std::uint64_t state_[2];
};

}  // namespace musae
