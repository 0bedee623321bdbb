#pragma once

#include <cstdint>
#include <random>
#include <span>

namespace mc2 {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Deterministic RNG handle. All randomness in the engine flows through
/// explicit Rng values so campaigns replay bit-identically for a given seed.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }

    // Unbiased uniform draw from [0, n) via rejection; avoids the
    // implementation-defined std::uniform_int_distribution.
    std::uint64_t below(std::uint64_t n) {
        if (n <= 1) return 0;
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t v = engine_();
        while (v >= limit) v = engine_();
        return v % n;
    }

    // Inclusive range.
    std::uint64_t between(std::uint64_t lo, std::uint64_t hi) {
        return lo + below(hi - lo + 1);
    }

    double unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    bool bernoulli(double p) { return unit() < p; }

    Rng fork(std::uint64_t salt) { return Rng(splitmix64(engine_() ^ splitmix64(salt))); }

private:
    std::mt19937_64 engine_;
};

inline std::uint64_t hash_bytes(std::uint64_t seed, std::span<const std::uint8_t> bytes) {
    std::uint64_t h = splitmix64(seed ^ 0x6d63320068617368ULL);
    for (std::uint8_t b : bytes) h = splitmix64(h ^ b);
    return h;
}

/// Tracks program executions against a global budget.
struct ExecutionMeter {
    std::uint64_t used = 0;
    std::uint64_t limit = UINT64_MAX;

    bool exhausted() const { return used >= limit; }
    std::uint64_t remaining() const { return exhausted() ? 0 : limit - used; }
    void charge(std::uint64_t n = 1) { used += n; }
};

}  // namespace mc2
