#pragma once

#include <cstdint>
#include <vector>

namespace gridsa {

// Deterministic RNG used everywhere randomness is needed. std::mt19937_64 is
// fully specified by the standard, but the std:: distributions are not, so the
// uniform draws are implemented here to keep outputs byte-stable across
// toolchains.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(splitmix(seed ? seed : 0x9e3779b97f4a7c15ULL)) {}

    std::uint64_t next_u64() {
        // xorshift64* on a splitmix-initialized state
        std::uint64_t x = state_;
        x ^= x >> 12;
        x ^= x << 25;
        x ^= x >> 27;
        state_ = x;
        return x * 0x2545F4914F6CDD1DULL;
    }

    // uniform in [0, 1) with 53-bit resolution
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // uniform in [lo, hi)
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    // uniform integer in [0, bound), bound >= 1; rejection sampling, no modulo bias
    std::uint64_t below(std::uint64_t bound) {
        std::uint64_t threshold = (0 - bound) % bound;
        for (;;) {
            std::uint64_t r = next_u64();
            if (r >= threshold) return r % bound;
        }
    }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

    // k distinct indices from [0, n), in shuffled order
    std::vector<int> sample_indices(int n, int k);

    // independent child stream, stable under evaluation order
    Rng spawn(std::uint64_t tag) const { return Rng(splitmix(state_ ^ splitmix(tag))); }

private:
    static std::uint64_t splitmix(std::uint64_t x) {
        x += 0x9e3779b97f4a7c15ULL;
        x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
        x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
        return x ^ (x >> 31);
    }

    std::uint64_t state_;
};

inline std::vector<int> Rng::sample_indices(int n, int k) {
    std::vector<int> idx(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) idx[static_cast<std::size_t>(i)] = i;
    shuffle(idx);
    idx.resize(static_cast<std::size_t>(k < n ? k : n));
    return idx;
}

}  // namespace gridsa
