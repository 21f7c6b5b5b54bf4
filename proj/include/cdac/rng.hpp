#pragma once

#include <Eigen/Core>
#include <cstdint>

namespace cdac {

// Deterministic 64-bit stream (splitmix64). Self-contained so that seeded
// runs are bit-identical across platforms and standard-library versions.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    // Uniform in [0, 1) with 53 random bits.
    double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Uniform integer in [0, bound) by rejection.
    std::uint64_t next_below(std::uint64_t bound) {
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
        std::uint64_t v;
        do {
            v = next_u64();
        } while (v >= limit);
        return v % bound;
    }

private:
    std::uint64_t state_;
};

// Decorrelated child seed for worker/trial streams.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
    Rng mix(master ^ (0x632be59bd9b4e019ull * (index + 1)));
    mix.next_u64();
    return mix.next_u64();
}

// Flat Dirichlet draw (uniform on the simplex) via normalized exponentials.
inline Eigen::VectorXd sample_uniform_simplex(int k, Rng& rng) {
    Eigen::VectorXd v(k);
    for (int i = 0; i < k; ++i) {
        double u;
        do {
            u = rng.next_unit();
        } while (u <= 0.0);
        v[i] = -std::log(u);
    }
    return v / v.sum();
}

} // namespace cdac
