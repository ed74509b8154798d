#pragma once

#include <cmath>
#include <cstdint>

#include "levyapprox/common.hpp"

namespace levyapprox {

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

}  // namespace detail

// Per-path random stream keyed by (seed, path index). Draw sequences are
// fixed by the implementation, so results are bit-identical regardless of
// how paths are distributed over workers. xoshiro256** core, explicit
// Box-Muller normals and Knuth-style Poisson counts (no use of
// implementation-defined standard-library distributions).
class PathRng {
public:
    PathRng(std::uint64_t seed, std::uint64_t path_index) {
        std::uint64_t sm = seed * 0x9e3779b97f4a7c15ULL + path_index + 1;
        for (auto& w : s_) w = detail::splitmix64(sm);
        have_spare_ = false;
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    // Uniform on (0,1): never returns 0, so log() below is safe.
    double uniform() {
        const double u = static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
        return u > 0.0 ? u : 0x1.0p-53;
    }

    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

    // Poisson count by multiplication in the log domain; O(mean) uniforms.
    std::uint32_t poisson(double mean) {
        if (mean <= 0.0) return 0;
        std::uint32_t k = 0;
        double acc = 0.0;
        for (;;) {
            acc -= std::log(uniform());
            if (acc > mean) return k;
            ++k;
        }
    }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }

    std::uint64_t s_[4];
    double spare_ = 0.0;
    bool have_spare_;
};

}  // namespace levyapprox
