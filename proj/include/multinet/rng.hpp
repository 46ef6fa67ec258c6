#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace multinet {

/// splitmix64 step; used both as a generator seeder and as a seed mixer.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Derive an independent stream seed from (seed, tag, index...).
/// Used to give parallel workers (nodes, replications, classes) their own
/// deterministic streams regardless of scheduling order.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag) {
    std::uint64_t s = seed ^ (tag * 0xd1342543de82ef95ULL);
    return splitmix64(s);
}
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag, std::uint64_t idx) {
    return derive_seed(derive_seed(seed, tag), idx + 1);
}
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag, std::uint64_t i, std::uint64_t j) {
    return derive_seed(derive_seed(seed, tag, i), j + 1);
}

/// Deterministic RNG with portable draw algorithms. std::*_distribution is
/// implementation-defined, so normal/laplace draws are hand-rolled here to keep
/// results identical across standard libraries.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    /// Uniform on (0,1]; 53-bit resolution, never exactly 0.
    double uniform01() {
        return static_cast<double>((eng_() >> 11) + 1) * 0x1.0p-53;
    }

    /// Standard normal via Box-Muller (second draw cached).
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u1 = uniform01();
        const double u2 = uniform01();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

    /// Laplace(0, scale) via inverse CDF.
    double laplace(double scale) {
        const double u = uniform01() - 0.5;
        const double mag = 1.0 - 2.0 * std::abs(u);
        return (u < 0 ? scale : -scale) * std::log(mag);
    }

    /// Uniform on [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * (uniform01() - 0x1.0p-53); }

    /// Uniform integer on {0, ..., n-1}.
    std::uint64_t below(std::uint64_t n) { return eng_() % n; }

private:
    std::mt19937_64 eng_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

} // namespace multinet
