#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace monas {

// Deterministic random source. std::mt19937_64 raw output is pinned by the
// standard, but the <random> distributions are not, so bounded ints, reals
// and normals are derived here from raw words. Run logs stay byte-identical
// across platforms as long as seeds match.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t next_u64() { return gen_(); }

    // Unbiased draw from [0, bound) via rejection sampling. bound > 0.
    std::uint64_t uniform_u64(std::uint64_t bound) {
        const std::uint64_t threshold = (0 - bound) % bound;  // 2^64 mod bound
        for (;;) {
            const std::uint64_t r = next_u64();
            if (r >= threshold) return r % bound;
        }
    }

    int uniform_int(int bound) { return static_cast<int>(uniform_u64(static_cast<std::uint64_t>(bound))); }

    // Uniform in [0, 1) with 53 random bits.
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Standard normal via Box-Muller; always consumes exactly two words.
    double normal() {
        const double u1 = 1.0 - uniform01();  // (0, 1], keeps log finite
        const double u2 = uniform01();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
    }

    double normal(double sigma) { return sigma * normal(); }

private:
    std::mt19937_64 gen_;
};

// SplitMix64 finalizer; used for stateless per-(epoch, id) noise and for
// deriving independent seed streams from one master seed.
inline std::uint64_t mix_u64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
    return mix_u64(master ^ mix_u64(stream));
}

// Deterministic standard normal from a hash; consumes no generator state.
inline double hash_normal(std::uint64_t a, std::uint64_t b) {
    const std::uint64_t h1 = mix_u64(a ^ mix_u64(b));
    const std::uint64_t h2 = mix_u64(h1 + 0x632be59bd9b4e019ull);
    const double u1 = 1.0 - static_cast<double>(h1 >> 11) * 0x1.0p-53;
    const double u2 = static_cast<double>(h2 >> 11) * 0x1.0p-53;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
}

}  // namespace monas
