#pragma once

#include <cmath>
#include <map>
#include <numbers>
#include <vector>

#include <unsupported/Eigen/FFT>

#include "sprec/core.hpp"

namespace sprec {

enum class Scheme { OFDM, SCFDMA };

struct BlockModSpec {
    int m = 128;          // data symbols per block
    Scheme scheme = Scheme::SCFDMA;
    // oversampling is fixed at 2: every block spans 2m output samples

    void validate() const {
        if (m < 2 || m % 4 != 0)
            throw std::invalid_argument("BlockModSpec: M must be >= 2 and divisible by 4");
    }
};

using TimeBlock = std::vector<cplx>;

// Cyclic pulse-shaping impulse response on 0 <= n < 2M:
//   p[0] = 1,  p[n] = sin(pi n / 2) / (M sin(pi n / 2M))  otherwise
// (zero at even n != 0, alternating-sign taps at odd n).
inline double sc_pulse(int n, int M) {
    if (M < 2) throw std::invalid_argument("sc_pulse: M must be >= 2");
    if (n < 0 || n >= 2 * M) throw std::out_of_range("sc_pulse: n out of [0, 2M)");
    if (n == 0) return 1.0;
    if (n % 2 == 0) return 0.0;
    const double x = std::numbers::pi * n / (2.0 * M);
    return std::sin(std::numbers::pi * n / 2.0) / (M * std::sin(x));
}

// The occupied band: a centered M-bin rectangular window with half-amplitude
// edge bins, in DFT index order (in-band 1/sqrt(M), edges 1/(2 sqrt(M))).
// Equals the 2M-point DFT of cos(pi n / 2M) p[n] scaled by 1/(2 sqrt(M)).
inline std::vector<double> freq_window(int M) {
    if (M < 2 || M % 4 != 0)
        throw std::invalid_argument("freq_window: M must be >= 2 and divisible by 4");
    std::vector<double> w(2 * M, 0.0);
    const double in_band = 1.0 / std::sqrt(double(M));
    for (int k = 0; k < M / 2; ++k) w[k] = in_band;
    for (int k = 3 * M / 2 + 1; k < 2 * M; ++k) w[k] = in_band;
    w[M / 2] = 0.5 * in_band;
    w[3 * M / 2] = 0.5 * in_band;
    return w;
}

// Coherent peak power of the all-ones SC-FDMA block, attained at the
// intermediate (odd) sample instants: ( sum_n 1 / (M sin(pi (2n+1) / 2M)) )^2.
inline double sc_peak_power_exact(int M) {
    if (M < 2) throw std::invalid_argument("sc_peak_power_exact: M must be >= 2");
    double s = 0.0;
    for (int n = 0; n < M; ++n)
        s += 1.0 / (M * std::sin(std::numbers::pi * (2 * n + 1) / (2.0 * M)));
    return s * s;
}

// Large-M logarithmic approximation of the same peak: (4/pi^2) ln^2(pi / 8M).
inline double sc_peak_power_bound(int M) {
    if (M < 2) throw std::invalid_argument("sc_peak_power_bound: M must be >= 2");
    const double l = std::log(std::numbers::pi / (8.0 * M));
    return 4.0 / (std::numbers::pi * std::numbers::pi) * l * l;
}

namespace detail {

// Modulation uses the phase-aligned pulse q[n] = e^{j pi n / 2} p[n]
// (1 at n=0, 0 at even n, j|p[n]| at odd n).  The phase twist keeps the even
// samples equal to the input symbols, makes sum_n |q[n]|^2 = 2 exactly (unit
// mean output power), and aligns the odd taps so the all-ones block reaches
// the coherent peak.
inline const std::vector<cplx>& q_spectrum(int M) {
    thread_local std::map<int, std::vector<cplx>> cache;
    auto it = cache.find(M);
    if (it != cache.end()) return it->second;
    std::vector<cplx> q(2 * M, cplx(0.0, 0.0));
    q[0] = cplx(1.0, 0.0);
    for (int n = 1; n < 2 * M; n += 2)
        q[n] = cplx(0.0, 1.0 / (M * std::sin(std::numbers::pi * n / (2.0 * M))));
    thread_local Eigen::FFT<double> fft;
    std::vector<cplx> Q;
    fft.fwd(Q, q);
    return cache.emplace(M, std::move(Q)).first->second;
}

} // namespace detail

// Block modulation at oversampling 2.  SC-FDMA cyclically convolves the
// 2x-upsampled symbol stream with q; OFDM first applies a unitary M-point
// inverse DFT to the symbols.  Mean output power equals mean input power.
inline TimeBlock modulate(const std::vector<cplx>& symbols, const BlockModSpec& spec) {
    spec.validate();
    const int M = spec.m;
    if ((int)symbols.size() != M)
        throw DimensionError("modulate: expected exactly M symbols");
    thread_local Eigen::FFT<double> fft;

    std::vector<cplx> u = symbols;
    if (spec.scheme == Scheme::OFDM) {
        std::vector<cplx> tmp;
        fft.inv(tmp, symbols);          // (1/M) sum convention
        const double s = std::sqrt(double(M));
        for (auto& v : tmp) v *= s;     // unitary inverse DFT
        u = std::move(tmp);
    }

    // x = IDFT_2M( Q[k] * U[k mod M] ), the cyclic convolution of the
    // upsampled block with q.
    std::vector<cplx> U;
    fft.fwd(U, u);
    const auto& Q = detail::q_spectrum(M);
    std::vector<cplx> X(2 * M);
    for (int k = 0; k < 2 * M; ++k) X[k] = Q[k] * U[k % M];
    TimeBlock x;
    fft.inv(x, X);
    return x;
}

// Exact inverse of modulate on its range: the even samples carry the
// (OFDM-transformed) symbols unchanged.
inline std::vector<cplx> demodulate(const TimeBlock& block, const BlockModSpec& spec) {
    spec.validate();
    const int M = spec.m;
    if ((int)block.size() != 2 * M)
        throw DimensionError("demodulate: expected 2M samples");
    std::vector<cplx> u(M);
    for (int l = 0; l < M; ++l) u[l] = block[2 * l];
    if (spec.scheme == Scheme::SCFDMA) return u;
    thread_local Eigen::FFT<double> fft;
    std::vector<cplx> s;
    fft.fwd(s, u);                      // unnormalized forward DFT
    const double inv = 1.0 / std::sqrt(double(M));
    for (auto& v : s) v *= inv;
    return s;
}

} // namespace sprec
