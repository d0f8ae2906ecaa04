#ifndef COOL_RNG_HPP
#define COOL_RNG_HPP

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

namespace cool {

// Deterministic generator used for every stochastic choice in the project.
// Implemented directly (splitmix64 seeding + xorshift mixing) so results are
// bit-identical across standard libraries; std::uniform_real_distribution is
// not portable between implementations.
class Rng {
public:
    explicit Rng(uint64_t seed = 0x9e3779b97f4a7c15ull) { reseed(seed); }

    void reseed(uint64_t seed) {
        state_ = seed;
        // warm up through splitmix so nearby seeds diverge
        next_u64();
        next_u64();
    }

    uint64_t next_u64() {
        state_ += 0x9e3779b97f4a7c15ull;
        uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    // uniform in [0,1)
    double uniform() { return double(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // integer in [0, n)
    uint64_t below(uint64_t n) { return n == 0 ? 0 : next_u64() % n; }

    int range(int lo, int hi) { // inclusive bounds
        if (hi <= lo) return lo;
        return lo + int(below(uint64_t(hi - lo + 1)));
    }

    bool chance(double p) { return uniform() < p; }

    double normal() {
        // Box-Muller; deterministic given the stream position
        double u1 = uniform();
        double u2 = uniform();
        if (u1 < 1e-300) u1 = 1e-300;
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    }

    template <class T>
    void shuffle(std::vector<T>& v) {
        for (size_t i = v.size(); i > 1; --i) {
            size_t j = size_t(below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

    // Derive an independent stream (for per-component rngs).
    Rng fork(uint64_t salt) { return Rng(next_u64() ^ (salt * 0x9e3779b97f4a7c15ull)); }

private:
    uint64_t state_ = 0;
};

// FNV-1a, used for stable symbol hashing in the encoder and data keys.
inline uint64_t fnv1a(const std::string& s) {
    uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

inline uint64_t hash_mix(uint64_t h, uint64_t v) {
    h ^= v + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
    return h;
}

// splitmix64 finalizer; use when the result feeds thresholds or buckets.
inline uint64_t mix64(uint64_t z) {
    z += 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

} // namespace cool

#endif
