#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace oofa {

//! Seeded random stream with portable draw semantics.
//!
//! std::mt19937_64 output is pinned by the standard, but the standard
//! distributions are not; the helpers below implement the distributions by
//! hand so that a seed reproduces the same stream on every platform.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    std::uint64_t next_u64() { return eng_(); }

    //! Uniform on [0,1) with 53 random bits.
    double uniform01() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    //! Uniform index in [0, n). n must be positive. Lemire multiply-shift
    //! rejection, unbiased.
    std::size_t uniform_index(std::size_t n) {
        using u128 = unsigned __int128;
        std::uint64_t range = n;
        u128 m = static_cast<u128>(next_u64()) * range;
        auto lo = static_cast<std::uint64_t>(m);
        if (lo < range) {
            std::uint64_t t = (0 - range) % range;
            while (lo < t) {
                m = static_cast<u128>(next_u64()) * range;
                lo = static_cast<std::uint64_t>(m);
            }
        }
        return static_cast<std::size_t>(m >> 64);
    }

    //! Uniform integer in [lo, hi], inclusive.
    int uniform_int(int lo, int hi) {
        return lo + static_cast<int>(uniform_index(static_cast<std::size_t>(hi - lo + 1)));
    }

    //! Standard normal via Box-Muller (two uniforms per draw).
    double normal() {
        double u1 = uniform01();
        while (u1 <= 0.0) u1 = uniform01();
        const double u2 = uniform01();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
    }

private:
    std::mt19937_64 eng_;
};

//! splitmix64 step; used to hash values into derived seeds.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9e3779b97f4a7c15ull;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

} // namespace oofa
