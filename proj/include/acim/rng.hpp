#pragma once

#include <cstdint>
#include <string_view>

namespace acim {

// All randomness flows from one config seed through named stream derivation,
// so every result is reproducible bit-for-bit and independent of worker
// count. Engines are hand-rolled (splitmix64 seeding, xoshiro256++ stream)
// because std::uniform_real_distribution is not pinned across standard
// library implementations.

inline uint64_t splitmix64(uint64_t& state) {
    state += 0x9e3779b97f4a7c15ULL;
    uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline uint64_t fnv1a64(std::string_view s) {
    uint64_t h = 0xcbf29ce484222325ULL;
    for (char ch : s) {
        h ^= static_cast<unsigned char>(ch);
        h *= 0x100000001b3ULL;
    }
    return h;
}

class Rng {
  public:
    explicit Rng(uint64_t seed) {
        uint64_t sm = seed;
        for (auto& w : s_) w = splitmix64(sm);
    }

    uint64_t next() {
        uint64_t r = rotl(s_[0] + s_[3], 23) + s_[0];
        uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return r;
    }

    // Uniform in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Uniform integer in [0, n).
    uint64_t below(uint64_t n) { return next() % n; }

  private:
    static uint64_t rotl(uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
    uint64_t s_[4];
};

// Independent substream for (seed, task name, index).
inline Rng derive_rng(uint64_t seed, std::string_view task, uint64_t index = 0) {
    uint64_t mix = seed;
    mix ^= fnv1a64(task) + 0x9e3779b97f4a7c15ULL + (mix << 6) + (mix >> 2);
    mix ^= index + 0x9e3779b97f4a7c15ULL + (mix << 6) + (mix >> 2);
    return Rng(mix);
}

}  // namespace acim
