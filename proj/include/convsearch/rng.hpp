#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace convsearch {

// Deterministic random source. Wraps std::mt19937_64 (whose output sequence
// is pinned by the standard) and derives bounded integers and unit doubles
// by hand, because the std::*_distribution classes are free to differ
// between standard library implementations. Artifacts hashed into manifests
// must reproduce bit-for-bit everywhere, so no distribution objects here.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // Unbiased integer in [0, n). n must be > 0.
    std::uint64_t below(std::uint64_t n) {
        const std::uint64_t limit = n * ((~std::uint64_t{0}) / n);
        std::uint64_t x = engine_();
        while (x >= limit) x = engine_();
        return x % n;
    }

    // Double in [0, 1) with 53 random bits.
    double unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    bool bernoulli(double p) { return unit() < p; }

    // Fisher-Yates, consumes one draw per element past the first.
    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            const std::size_t j = static_cast<std::size_t>(below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    std::mt19937_64 engine_;
};

}  // namespace convsearch
