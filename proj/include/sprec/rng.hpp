#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

#include "sprec/core.hpp"

namespace sprec {

// Self-contained splitmix64-based stream: identical output on every platform
// and compiler (std::normal_distribution is implementation-defined, so the
// Gaussian transform is done by hand).
class RngStream {
public:
    explicit RngStream(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Uniform in [0, 1)
    double uniform() { return double(next_u64() >> 11) * 0x1.0p-53; }

    // Standard normal via Box-Muller (spare value cached).
    double gaussian() {
        if (has_spare_) { has_spare_ = false; return spare_; }
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 2.0 * std::numbers::pi * u2;
        spare_ = r * std::sin(a);
        has_spare_ = true;
        return r * std::cos(a);
    }

    // Circularly-symmetric complex Gaussian with E|z|^2 = var.
    cplx cn(double var) {
        const double s = std::sqrt(var / 2.0);
        return cplx(s * gaussian(), s * gaussian());
    }

    bool bit() { return (next_u64() >> 63) != 0; }

    // Unit-amplitude QPSK symbol, +/-1 +/- j.
    cplx qpsk() {
        const std::uint64_t u = next_u64();
        return cplx((u & 1) ? 1.0 : -1.0, (u & 2) ? 1.0 : -1.0);
    }

private:
    std::uint64_t state_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

// Derive an independent substream seed from (seed, a, b), so trials can run
// in any order without correlating.
inline std::uint64_t split_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
    auto mix = [](std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    };
    std::uint64_t h = mix(seed + 0x9e3779b97f4a7c15ULL);
    h = mix(h ^ (a + 0xbf58476d1ce4e5b9ULL));
    h = mix(h ^ (b + 0x94d049bb133111ebULL));
    return h;
}

} // namespace sprec
