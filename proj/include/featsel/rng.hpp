#pragma once

#include <cassert>
#include <cstdint>
#include <random>
#include <vector>

namespace featsel {

/// Derives an independent stream seed from a master seed and a salt
/// (splitmix64 finalizer). Used to give folds, generations, etc. their own
/// generators without correlated streams.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (salt + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Deterministic random generator: a std::mt19937_64 core (bit-exact by the
/// standard) with hand-rolled draws. std::uniform_*_distribution is
/// implementation-defined, so it is never used here; all results are
/// reproducible across platforms and standard libraries.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform double in [0, 1) with 53 random bits.
    double next_unit() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    /// Uniform index in [0, n). Rejection sampling, no modulo bias.
    std::size_t next_index(std::size_t n) {
        assert(n > 0);
        if (n == 1) return 0;
        const std::uint64_t bound = static_cast<std::uint64_t>(n);
        const std::uint64_t span = UINT64_MAX / bound * bound;
        std::uint64_t x;
        do {
            x = engine_();
        } while (x >= span);
        return static_cast<std::size_t>(x % bound);
    }

    bool bernoulli(double p) { return next_unit() < p; }

    /// Fisher-Yates shuffle driven by next_index.
    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = next_index(i);
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    std::mt19937_64 engine_;
};

}  // namespace featsel
