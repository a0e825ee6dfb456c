#pragma once

// Self-contained deterministic RNG (xoshiro256++ with splitmix64 seeding).
// All randomness in the library flows through this engine so that runs are
// reproducible for a fixed master seed regardless of the platform's
// <random> distribution implementations.

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace covertsem {

inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// Derives an independent stream seed from a master seed. Stream ids are
// fixed constants per subsystem (see config.hpp) so a single master seed
// reproduces every module's draws.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
    std::uint64_t s = master ^ (0xA0761D6478BD642FULL * (stream + 1));
    splitmix64(s);
    return splitmix64(s);
}

class Rng {
public:
    explicit Rng(std::uint64_t seed = 0) { reseed(seed); }

    void reseed(std::uint64_t seed) {
        std::uint64_t sm = seed;
        for (auto& word : state_) word = splitmix64(sm);
        has_cached_normal_ = false;
        cached_normal_ = 0.0;
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    // Uniform on [0, 1) with 53 bits of mantissa.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Index uniform on {0, ..., n-1}.
    std::size_t choice(std::size_t n) {
        if (n == 0) throw std::invalid_argument("Rng::choice: n must be positive");
        std::size_t idx = static_cast<std::size_t>(uniform() * static_cast<double>(n));
        return idx < n ? idx : n - 1;
    }

    // Standard normal via Box-Muller; caches the second variate.
    double normal() {
        if (has_cached_normal_) {
            has_cached_normal_ = false;
            return cached_normal_;
        }
        const double u1 = 1.0 - uniform();  // (0, 1]
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 6.283185307179586476925286766559 * u2;
        cached_normal_ = r * std::sin(a);
        has_cached_normal_ = true;
        return r * std::cos(a);
    }

    std::vector<double> normal_vec(std::size_t n) {
        std::vector<double> out(n);
        for (auto& x : out) x = normal();
        return out;
    }

    double exponential() { return -std::log(1.0 - uniform()); }

    // Symmetric Dirichlet(1,...,1): normalized unit-rate exponentials.
    std::vector<double> dirichlet(std::size_t k) {
        if (k == 0) throw std::invalid_argument("Rng::dirichlet: k must be positive");
        std::vector<double> out(k);
        double sum = 0.0;
        for (auto& x : out) {
            x = exponential();
            sum += x;
        }
        for (auto& x : out) x /= sum;
        return out;
    }

    // First k of a Fisher-Yates shuffle over {0,...,n-1}: a uniform sample
    // of k distinct indices.
    std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t k) {
        if (k > n) throw std::invalid_argument("sample_without_replacement: k > n");
        std::vector<std::size_t> idx(n);
        for (std::size_t i = 0; i < n; ++i) idx[i] = i;
        for (std::size_t i = 0; i < k; ++i) {
            std::size_t j = i + choice(n - i);
            std::swap(idx[i], idx[j]);
        }
        idx.resize(k);
        return idx;
    }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }

    std::uint64_t state_[4] = {};
    bool has_cached_normal_ = false;
    double cached_normal_ = 0.0;
};

}  // namespace covertsem
