#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "sprec/core.hpp"
#include "sprec/frontend.hpp"
#include "sprec/precoders.hpp"
#include "sprec/rng.hpp"
#include "sprec/waveforms.hpp"

namespace sprec {

enum class Modulation { QPSK, QAM16Superposition };
enum class WaveformKind { SymbolRate, OFDM, SCFDMA };
enum class PrecoderKind { None, ZF, L12, ElasticNet, Superposition };

struct ExperimentConfig {
    int n_antennas = 0;                 // N
    int n_users = 0;                    // K
    Modulation modulation = Modulation::QPSK;
    WaveformKind waveform = WaveformKind::SymbolRate;
    int block_m = 128;                  // M, for OFDM / SC-FDMA waveforms
    NonlinearitySpec nonlinearity;
    PrecoderKind precoder = PrecoderKind::ZF;
    double lambda = 0.0;
    double mu = 0.01;
    int max_iters = 5000;
    double rel_tol = 1e-7;
    std::vector<double> snr_grid_db;    // -10 log10 sigma_eta^2
    std::vector<double> eta_grid;       // CCDF thresholds (linear power)
    int n_channel_draws = 1;
    int n_symbols_per_draw = 1;
    std::uint64_t seed = 1;

    void validate_ber() const {
        validate_common();
        if (snr_grid_db.empty()) throw ConfigError("config: snr_grid must be non-empty");
        if (waveform != WaveformKind::SymbolRate)
            throw ConfigError("config: BER runs are symbol-rate only");
        if (modulation == Modulation::QAM16Superposition &&
            precoder != PrecoderKind::Superposition && precoder != PrecoderKind::ZF)
            throw ConfigError("config: 16QAM requires superposition or ZF-with-Pi precoding");
        if (modulation == Modulation::QPSK && precoder == PrecoderKind::Superposition)
            throw ConfigError("config: superposition precoding requires 16QAM modulation");
    }

    void validate_ccdf() const {
        validate_common();
        if (eta_grid.empty()) throw ConfigError("config: eta_grid must be non-empty");
        if (waveform != WaveformKind::SymbolRate && n_symbols_per_draw % block_m != 0)
            throw ConfigError("config: n_symbols_per_draw must be a multiple of M");
    }

    void validate_common() const {
        if (n_users < 1 || n_antennas < 1)
            throw DimensionError("config: n_users and n_antennas must be >= 1");
        if (n_users > n_antennas)
            throw DimensionError("config: requires K <= N");
        if (modulation == Modulation::QAM16Superposition && 2 * n_users > n_antennas)
            throw DimensionError("config: superposition requires N >= 2K");
        if (n_channel_draws < 1 || n_symbols_per_draw < 1)
            throw ConfigError("config: counts must be >= 1");
        if (waveform != WaveformKind::SymbolRate)
            BlockModSpec{block_m, Scheme::SCFDMA}.validate();
    }
};

struct MetricSeries {
    std::string kind;                    // "BER" or "CCDF"
    std::vector<double> x;
    std::vector<double> y;
    std::vector<std::uint64_t> numerator;
    std::vector<std::uint64_t> denominator;
    int n_design_failures = 0;
};

inline CMat draw_channel(int K, int N, RngStream& rng) {
    if (K > N) throw DimensionError("draw_channel: requires K <= N");
    CMat H(K, N);
    for (int i = 0; i < K; ++i)
        for (int j = 0; j < N; ++j)
            H(i, j) = rng.cn(1.0);
    return H;
}

// One channel use of s_hat = H Q(P s) + eta for a block of T symbol vectors
// (columns).  Noise is CN(0, sigma_eta^2) per user per use.  An antenna whose
// precoder row is identically zero is switched off (its RF chain is disabled,
// it radiates nothing); the zero-input policies of the nonlinearity apply only
// to sample-level zeros on active antennas.
inline CMat transmit(const CMat& S, const CMat& P, const CMat& H,
                     const NonlinearitySpec& nl, double sigma_eta, RngStream& rng) {
    if (P.cols() != S.rows() || H.cols() != P.rows())
        throw DimensionError("transmit: shape mismatch");
    if (sigma_eta < 0.0) throw std::invalid_argument("transmit: sigma_eta must be >= 0");
    CMat X = apply_nonlinearity(P * S, nl);
    for (Eigen::Index i = 0; i < P.rows(); ++i)
        if (P.row(i).isZero(0.0)) X.row(i).setZero();
    CMat Y = H * X;
    if (sigma_eta > 0.0) {
        const double var = sigma_eta * sigma_eta;
        for (Eigen::Index t = 0; t < Y.cols(); ++t)
            for (Eigen::Index k = 0; k < Y.rows(); ++k)
                Y(k, t) += rng.cn(var);
    }
    return Y;
}

enum class Constellation { QPSK, QAM16 };

// Blind per-user amplitude estimate: f = T E[|Re s|+|Im s|] / sum_t(|Re|+|Im|).
// The constellation constant is 2 for unit QPSK and 4 for the {+-1,+-3}^2 grid.
inline double blind_scale(const std::vector<cplx>& shat, Constellation c) {
    if (shat.empty()) throw DimensionError("blind_scale: empty sequence");
    double denom = 0.0;
    for (cplx z : shat) denom += std::abs(z.real()) + std::abs(z.imag());
    if (denom <= 0.0) throw std::invalid_argument("blind_scale: all-zero received sequence");
    const double num = c == Constellation::QPSK ? 2.0 : 4.0;
    return double(shat.size()) * num / denom;
}

namespace detail {

inline double nearest_pam4(double x) {
    if (x < -2.0) return -3.0;
    if (x < 0.0) return -1.0;
    if (x < 2.0) return 1.0;
    return 3.0;
}

// Unique layer decomposition of a {+-1,+-3} amplitude: g = 2 msb + lsb.
inline void pam4_layers(double g, double& msb, double& lsb) {
    msb = g > 0.0 ? 1.0 : -1.0;
    lsb = g - 2.0 * msb;
}

} // namespace detail

// QPSK decision: componentwise sign, two Gray bits.
inline std::array<bool, 2> detect_qpsk(cplx z) {
    return {z.real() > 0.0, z.imag() > 0.0};
}

// 16-QAM decision: nearest grid point, then inversion to (LSB, MSB) QPSK
// layers.  Bits ordered (lsb_re, lsb_im, msb_re, msb_im).
inline std::array<bool, 4> detect_16qam(cplx z, cplx& lsb, cplx& msb) {
    const double gr = detail::nearest_pam4(z.real());
    const double gi = detail::nearest_pam4(z.imag());
    double mr, lr, mi, li;
    detail::pam4_layers(gr, mr, lr);
    detail::pam4_layers(gi, mi, li);
    lsb = cplx(lr, li);
    msb = cplx(mr, mi);
    return {lr > 0.0, li > 0.0, mr > 0.0, mi > 0.0};
}

namespace detail {

// Design the configured precoder for one channel draw.  sigma2 is the
// receiver noise variance of the current SNR point (used by the elastic-net
// and superposition designs).
inline CMat design_for(const ExperimentConfig& cfg, const CMat& H, double sigma2) {
    const bool qam = cfg.modulation == Modulation::QAM16Superposition;
    const AbsVariant v = cfg.nonlinearity.kind == Nonlinearity::OneBit
                             ? AbsVariant::SplitOneBit
                             : AbsVariant::ComplexModulus;
    IstaConfig ic;
    ic.mu = cfg.mu;
    ic.lambda = cfg.lambda;
    ic.n_users = cfg.n_users;
    ic.n_antennas = cfg.n_antennas;
    ic.abs_variant = v;
    ic.max_iters = cfg.max_iters;
    ic.rel_tol = cfg.rel_tol;
    switch (cfg.precoder) {
    case PrecoderKind::None:
        return CMat::Identity(cfg.n_antennas, cfg.n_antennas);
    case PrecoderKind::ZF: {
        CMat P = pseudo_inverse_fat(H);
        if (qam) P *= SuperpositionSpec{cfg.n_users}.expansion();
        return P;
    }
    case PrecoderKind::L12:
        // pure l_{1,2} design: no ridge term
        ic.sigma_eta_sq = 0.0;
        return design_ista(H, ic, CMat::Identity(cfg.n_users, cfg.n_users)).precoder;
    case PrecoderKind::ElasticNet:
        ic.sigma_eta_sq = sigma2;
        return design_ista(H, ic, CMat::Identity(cfg.n_users, cfg.n_users)).precoder;
    case PrecoderKind::Superposition: {
        ic.sigma_eta_sq = sigma2;
        return design_superposition(H, ic, SuperpositionSpec{cfg.n_users}).precoder;
    }
    }
    throw ConfigError("design_for: unknown precoder kind");
}

} // namespace detail

// Monte-Carlo BER curve: average over n_channel_draws channels with one
// precoder design per (channel, SNR point) and n_symbols_per_draw symbol
// vectors per channel.  Each draw's channel, symbols and unit-variance noise
// come from per-draw substreams and are shared across the whole SNR grid
// (noise scaled by sigma per point), so curves are directly comparable point
// to point and error floors are measured on a common channel ensemble.
inline MetricSeries run_ber(const ExperimentConfig& cfg) {
    cfg.validate_ber();
    const bool qam = cfg.modulation == Modulation::QAM16Superposition;
    const int K = cfg.n_users;
    const int L = qam ? 2 * K : K;
    const int T = cfg.n_symbols_per_draw;
    const size_t S_n = cfg.snr_grid_db.size();

    // substream tags for the per-draw channel and data streams (SNR-independent)
    constexpr std::uint64_t kChannelTag = 0x6368616e6e656cull;
    constexpr std::uint64_t kDataTag = 0x64617461ull;

    MetricSeries out;
    out.kind = "BER";
    std::vector<std::uint64_t> errs(S_n, 0), bits(S_n, 0);
    for (int d = 0; d < cfg.n_channel_draws; ++d) {
        RngStream chan_rng(split_seed(cfg.seed, d, kChannelTag));
        const CMat H = draw_channel(K, cfg.n_antennas, chan_rng);
        // layer symbols (columns are channel uses) and unit-variance noise
        RngStream data_rng(split_seed(cfg.seed, d, kDataTag));
        CMat S(L, T);
        for (int t = 0; t < T; ++t)
            for (int l = 0; l < L; ++l)
                S(l, t) = data_rng.qpsk();
        CMat W(K, T);
        for (int t = 0; t < T; ++t)
            for (int k = 0; k < K; ++k) W(k, t) = data_rng.cn(1.0);

        // ZF / l12-only / unprecoded designs do not depend on the noise level;
        // design them once per draw and reuse across the grid
        const bool sigma_free = cfg.precoder == PrecoderKind::None ||
                                cfg.precoder == PrecoderKind::ZF ||
                                cfg.precoder == PrecoderKind::L12;
        CMat P_cached;
        bool have_cached = false;
        for (size_t si = 0; si < S_n; ++si) {
            const double sigma2 = std::pow(10.0, -cfg.snr_grid_db[si] / 10.0);
            CMat P;
            if (sigma_free && have_cached) {
                P = P_cached;
            } else {
                try {
                    P = detail::design_for(cfg, H, sigma2);
                } catch (const DivergenceError&) {
                    ++out.n_design_failures;
                    continue;
                } catch (const RankDeficiencyError&) {
                    ++out.n_design_failures;
                    continue;
                }
                if (sigma_free) {
                    P_cached = P;
                    have_cached = true;
                }
            }
            RngStream null_rng(0); // transmit adds no noise itself here
            CMat Y = transmit(S, P, H, cfg.nonlinearity, 0.0, null_rng);
            Y += std::sqrt(sigma2) * W;
            for (int k = 0; k < K; ++k) {
                std::vector<cplx> row(T);
                for (int t = 0; t < T; ++t) row[t] = Y(k, t);
                if (qam) {
                    const double f = blind_scale(row, Constellation::QAM16);
                    for (int t = 0; t < T; ++t) {
                        cplx lsb, msb;
                        const auto b = detect_16qam(f * row[t], lsb, msb);
                        const cplx tl = S(2 * k, t), tm = S(2 * k + 1, t);
                        errs[si] += (b[0] != (tl.real() > 0)) + (b[1] != (tl.imag() > 0)) +
                                    (b[2] != (tm.real() > 0)) + (b[3] != (tm.imag() > 0));
                        bits[si] += 4;
                    }
                } else {
                    // sign detection is scale-invariant, no blind scaling needed
                    for (int t = 0; t < T; ++t) {
                        const auto b = detect_qpsk(row[t]);
                        errs[si] +=
                            (b[0] != (S(k, t).real() > 0)) + (b[1] != (S(k, t).imag() > 0));
                        bits[si] += 2;
                    }
                }
            }
        }
    }
    for (size_t si = 0; si < S_n; ++si) {
        out.x.push_back(cfg.snr_grid_db[si]);
        out.numerator.push_back(errs[si]);
        out.denominator.push_back(bits[si]);
        out.y.push_back(bits[si] ? double(errs[si]) / double(bits[si]) : 0.0);
    }
    return out;
}

// Empirical CCDF of instantaneous output power over all antennas, samples and
// channel draws.  Each antenna stream is normalized to its own mean power
// within a draw (all-zero antennas transmit nothing and are skipped).
inline MetricSeries run_ccdf(const ExperimentConfig& cfg) {
    cfg.validate_ccdf();
    const int K = cfg.n_users, N = cfg.n_antennas, T = cfg.n_symbols_per_draw;

    MetricSeries out;
    out.kind = "CCDF";
    // count threshold crossings against the sorted grid, then map back
    std::vector<size_t> order(cfg.eta_grid.size());
    for (size_t e = 0; e < order.size(); ++e) order[e] = e;
    std::sort(order.begin(), order.end(),
              [&](size_t a, size_t b) { return cfg.eta_grid[a] < cfg.eta_grid[b]; });
    std::vector<double> sorted_eta(order.size());
    for (size_t e = 0; e < order.size(); ++e) sorted_eta[e] = cfg.eta_grid[order[e]];
    std::vector<std::uint64_t> pos_hist(order.size() + 1, 0);
    std::uint64_t total = 0;

    for (int d = 0; d < cfg.n_channel_draws; ++d) {
        RngStream rng(split_seed(cfg.seed, d, 0));
        const CMat H = draw_channel(K, N, rng);
        CMat P;
        try {
            P = detail::design_for(cfg, H, 0.0);
        } catch (const DivergenceError&) {
            ++out.n_design_failures;
            continue;
        } catch (const RankDeficiencyError&) {
            ++out.n_design_failures;
            continue;
        }
        const int Lin = int(P.cols());
        CMat S(Lin, T);
        for (int t = 0; t < T; ++t)
            for (int l = 0; l < Lin; ++l)
                S(l, t) = rng.qpsk();
        const CMat X0 = P * S; // per-antenna symbol streams
        for (int i = 0; i < int(X0.rows()); ++i) {
            std::vector<double> pw;
            pw.reserve(2 * T);
            if (cfg.waveform == WaveformKind::SymbolRate) {
                for (int t = 0; t < T; ++t)
                    pw.push_back(std::norm(apply_nonlinearity(X0(i, t), cfg.nonlinearity)));
            } else {
                const BlockModSpec bm{cfg.block_m, cfg.waveform == WaveformKind::OFDM
                                                       ? Scheme::OFDM
                                                       : Scheme::SCFDMA};
                for (int b = 0; b < T / cfg.block_m; ++b) {
                    std::vector<cplx> sym(cfg.block_m);
                    for (int t = 0; t < cfg.block_m; ++t) sym[t] = X0(i, b * cfg.block_m + t);
                    for (cplx v : modulate(sym, bm))
                        pw.push_back(std::norm(apply_nonlinearity(v, cfg.nonlinearity)));
                }
            }
            double mean = 0.0;
            for (double p : pw) mean += p;
            mean /= double(pw.size());
            if (mean <= 0.0) continue; // silent antenna
            for (double p : pw) {
                const double pn = p / mean;
                // number of sorted thresholds strictly below pn; the relative
                // slack absorbs roundoff so unit-power outputs sit exactly at
                // threshold 1 instead of straddling it
                const size_t cnt =
                    std::lower_bound(sorted_eta.begin(), sorted_eta.end(), pn,
                                     [](double eta, double v) {
                                         return eta * (1.0 + 1e-12) < v;
                                     }) -
                    sorted_eta.begin();
                ++pos_hist[cnt];
                ++total;
            }
        }
    }
    // exceed(sorted e) = # samples with cnt > e
    std::vector<std::uint64_t> exceed(order.size(), 0);
    std::uint64_t acc = 0;
    for (size_t e = order.size(); e-- > 0;) {
        acc += pos_hist[e + 1];
        exceed[order[e]] = acc;
    }
    for (size_t e = 0; e < cfg.eta_grid.size(); ++e) {
        out.x.push_back(cfg.eta_grid[e]);
        out.numerator.push_back(exceed[e]);
        out.denominator.push_back(total);
        out.y.push_back(total ? double(exceed[e]) / double(total) : 0.0);
    }
    return out;
}

} // namespace sprec
