#pragma once

// Hand-rolled deterministic RNG. std::uniform_* distributions are not
// reproducible across standard libraries, and every seeded experiment here
// must emit byte-identical reports.

#include <cstdint>

namespace hyreg {

inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {
        // warm up so that small seeds diverge immediately
        splitmix64(state_);
    }

    std::uint64_t next_u64() { return splitmix64(state_); }

    // Derive an independent stream; label keeps substreams apart.
    Rng fork(std::uint64_t label) const {
        std::uint64_t s = state_ ^ (0x632be59bd9b4e019ull * (label + 1));
        return Rng(s);
    }

    // Unbiased uniform draw from [0, bound).
    std::uint64_t below(std::uint64_t bound) {
        if (bound == 0) return 0;
        std::uint64_t threshold = (~bound + 1) % bound;  // 2^64 mod bound
        while (true) {
            std::uint64_t r = next_u64();
            if (r >= threshold) return r % bound;
        }
    }

    // Uniform in [0, 1) with 53 random bits.
    double real() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    bool bernoulli(double p) { return real() < p; }

    int pm_one() { return (next_u64() & 1u) ? 1 : -1; }

private:
    std::uint64_t state_;
};

}  // namespace hyreg
