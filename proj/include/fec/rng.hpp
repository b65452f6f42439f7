#pragma once

#include <cstdint>

namespace fec {

// splitmix64; portable and splittable, unlike the std:: distributions.
inline uint64_t splitmix64(uint64_t& state) {
    uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Deterministic stream seeded by an arbitrary number of 64-bit words.
class Rng {
public:
    explicit Rng(uint64_t seed) : state_(seed) { (void)next(); }
    Rng(uint64_t a, uint64_t b) : state_(mix(a, b)) { (void)next(); }
    Rng(uint64_t a, uint64_t b, uint64_t c) : state_(mix(mix(a, b), c)) { (void)next(); }

    uint64_t next() { return splitmix64(state_); }

    // Unbiased integer in [0, bound) via rejection.
    uint64_t below(uint64_t bound) {
        uint64_t threshold = (0 - bound) % bound;
        for (;;) {
            uint64_t r = next();
            if (r >= threshold) return r % bound;
        }
    }

    // Uniform in [0, 1).
    double uniform() { return (next() >> 11) * 0x1.0p-53; }

    bool chance(double p) { return uniform() < p; }

private:
    static uint64_t mix(uint64_t a, uint64_t b) {
        uint64_t s = a;
        uint64_t h = splitmix64(s) ^ b;
        return splitmix64(h);
    }
    uint64_t state_;
};

}  // namespace fec
