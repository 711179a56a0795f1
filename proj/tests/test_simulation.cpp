#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "sprec/simulation.hpp"

using namespace sprec;

TEST_CASE("draw_channel: determinism and moments") {
    RngStream a(5), b(5);
    const CMat H1 = draw_channel(5, 30, a), H2 = draw_channel(5, 30, b);
    CHECK((H1 - H2).norm() == 0.0);
    CHECK_THROWS_AS(draw_channel(5, 3, a), DimensionError);

    RngStream rng(6);
    double p = 0.0, cross = 0.0, re = 0.0, im = 0.0;
    const int n = 1000000;
    for (int i = 0; i < n; ++i) {
        const cplx h = rng.cn(1.0);
        p += std::norm(h);
        cross += h.real() * h.imag();
        re += h.real();
        im += h.imag();
    }
    CHECK(p / n == doctest::Approx(1.0).epsilon(0.005));
    CHECK(std::abs(cross / n) < 0.01);
    CHECK(std::abs(re / n) < 0.005);
    CHECK(std::abs(im / n) < 0.005);
}

TEST_CASE("transmit: zero-forcing identity and power") {
    RngStream rng(7);
    const CMat H = draw_channel(5, 30, rng);
    const CMat P = pseudo_inverse_fat(H);
    CMat S(5, 100);
    for (int t = 0; t < 100; ++t)
        for (int k = 0; k < 5; ++k) S(k, t) = rng.qpsk();

    const CMat Y = transmit(S, P, H, NonlinearitySpec{Nonlinearity::Ideal}, 0.0, rng);
    CHECK((Y - S).cwiseAbs().maxCoeff() <= 1e-10);

    const CMat X = apply_nonlinearity(P * S, NonlinearitySpec{Nonlinearity::OneBit});
    for (Eigen::Index j = 0; j < X.cols(); ++j)
        for (Eigen::Index i = 0; i < X.rows(); ++i)
            CHECK(std::norm(X(i, j)) == doctest::Approx(1.0).epsilon(1e-12));

    CHECK_THROWS_AS(transmit(S, P, draw_channel(5, 29, rng),
                             NonlinearitySpec{Nonlinearity::Ideal}, 0.0, rng),
                    DimensionError);
}

TEST_CASE("transmit: AWGN statistics") {
    RngStream rng(8);
    const CMat H = draw_channel(5, 30, rng);
    const CMat P = pseudo_inverse_fat(H);
    const int T = 20000; // 10^5 user-uses
    CMat S(5, T);
    for (int t = 0; t < T; ++t)
        for (int k = 0; k < 5; ++k) S(k, t) = rng.qpsk();
    const double sigma = 0.3;
    const CMat Y = transmit(S, P, H, NonlinearitySpec{Nonlinearity::Ideal}, sigma, rng);
    CHECK((Y - S).squaredNorm() / double(Y.size()) ==
          doctest::Approx(sigma * sigma).epsilon(0.03));
}

TEST_CASE("blind_scale") {
    RngStream rng(9);
    std::vector<cplx> s(5000);
    for (auto& v : s) v = rng.qpsk();
    CHECK(blind_scale(s, Constellation::QPSK) == doctest::Approx(1.0));
    std::vector<cplx> s2 = s;
    for (auto& v : s2) v *= 2.0;
    CHECK(blind_scale(s2, Constellation::QPSK) == doctest::Approx(0.5));

    // noisy estimate within 2% at T = 10^4
    std::vector<cplx> sn(10000);
    for (auto& v : sn) v = rng.qpsk() + rng.cn(0.01);
    CHECK(blind_scale(sn, Constellation::QPSK) == doctest::Approx(1.0).epsilon(0.02));

    // 16-QAM constant is 4
    SuperpositionSpec sp{1};
    std::vector<cplx> q(20000);
    for (auto& v : q) v = expand_superposition({rng.qpsk(), rng.qpsk()}, sp)[0];
    CHECK(blind_scale(q, Constellation::QAM16) == doctest::Approx(1.0).epsilon(0.02));

    CHECK_THROWS_AS(blind_scale({}, Constellation::QPSK), DimensionError);
    CHECK_THROWS_AS(blind_scale({cplx(0, 0)}, Constellation::QPSK), std::invalid_argument);
}

TEST_CASE("detect examples") {
    const auto b = detect_qpsk(cplx(0.2, -3.0));
    CHECK(b[0]);
    CHECK_FALSE(b[1]);

    cplx lsb, msb;
    const auto q = detect_16qam(cplx(2.7, 0.4), lsb, msb);
    CHECK(msb == cplx(1, 1));
    CHECK(lsb == cplx(1, -1));
    CHECK(q[0]);       // lsb re
    CHECK_FALSE(q[1]); // lsb im
    CHECK(q[2]);       // msb re
    CHECK(q[3]);       // msb im

    // all 16 grid points round-trip losslessly
    SuperpositionSpec sp{1};
    for (int a = 0; a < 4; ++a)
        for (int c = 0; c < 4; ++c) {
            const cplx l((a & 1) ? 1 : -1, (a & 2) ? 1 : -1);
            const cplx m((c & 1) ? 1 : -1, (c & 2) ? 1 : -1);
            const cplx g = expand_superposition({l, m}, sp)[0];
            cplx dl, dm;
            detect_16qam(g, dl, dm);
            CHECK(dl == l);
            CHECK(dm == m);
        }
}

namespace {

ExperimentConfig small_qpsk() {
    ExperimentConfig cfg;
    cfg.n_antennas = 30;
    cfg.n_users = 5;
    cfg.precoder = PrecoderKind::ZF;
    cfg.n_channel_draws = 10;
    cfg.n_symbols_per_draw = 200;
    cfg.seed = 99;
    return cfg;
}

} // namespace

TEST_CASE("run_ber: near-noiseless ZF sanity bound") {
    auto cfg = small_qpsk();
    cfg.snr_grid_db = {40.0};
    cfg.n_channel_draws = 100;
    cfg.n_symbols_per_draw = 1000; // 10^6 bits
    const auto m = run_ber(cfg);
    CHECK(m.denominator[0] == 1000000);
    CHECK(m.y[0] < 1e-4);
    CHECK(m.n_design_failures == 0);
}

TEST_CASE("run_ber: pure-noise limit is half") {
    auto cfg = small_qpsk();
    cfg.snr_grid_db = {-60.0};
    const auto m = run_ber(cfg);
    CHECK(m.y[0] == doctest::Approx(0.5).epsilon(0.04));
}

TEST_CASE("run_ber: monotone in SNR for ideal ZF") {
    auto cfg = small_qpsk();
    cfg.snr_grid_db = {-5, 0, 5, 10};
    cfg.n_channel_draws = 20;
    cfg.n_symbols_per_draw = 600; // >= 10^5 bits per point
    const auto m = run_ber(cfg);
    for (size_t i = 1; i < m.y.size(); ++i) {
        const double p = m.y[i - 1];
        const double se = std::sqrt(std::max(p * (1 - p), 1e-12) / double(m.denominator[i - 1]));
        CHECK(m.y[i] <= p + 2.0 * se);
    }
}

TEST_CASE("run_ber: reproducibility") {
    auto cfg = small_qpsk();
    cfg.snr_grid_db = {5.0, 10.0};
    cfg.precoder = PrecoderKind::ElasticNet;
    cfg.lambda = 0.01;
    cfg.nonlinearity.kind = Nonlinearity::OneBit;
    cfg.max_iters = 300;
    const auto a = run_ber(cfg), b = run_ber(cfg);
    CHECK(a.numerator == b.numerator);
    CHECK(a.denominator == b.denominator);
    CHECK(a.y == b.y);
}

TEST_CASE("run_ber: design failures are counted, not silently skipped") {
    auto cfg = small_qpsk();
    cfg.snr_grid_db = {10.0};
    cfg.precoder = PrecoderKind::L12;
    cfg.lambda = 0.01;
    cfg.mu = 1.0; // violates the step bound, every design diverges
    cfg.n_channel_draws = 3;
    const auto m = run_ber(cfg);
    CHECK(m.n_design_failures == 3);
    CHECK(m.denominator[0] == 0);
}

TEST_CASE("run_ber: config validation") {
    auto cfg = small_qpsk();
    CHECK_THROWS_AS(run_ber(cfg), ConfigError); // empty snr grid
    cfg.snr_grid_db = {10.0};
    cfg.modulation = Modulation::QAM16Superposition;
    cfg.precoder = PrecoderKind::L12;
    CHECK_THROWS_AS(run_ber(cfg), ConfigError);
    cfg.modulation = Modulation::QPSK;
    cfg.n_users = 31;
    CHECK_THROWS_AS(run_ber(cfg), DimensionError);
}

TEST_CASE("run_ccdf: constant envelope gives a step CCDF") {
    ExperimentConfig cfg;
    cfg.n_antennas = 8;
    cfg.n_users = 2;
    cfg.precoder = PrecoderKind::ZF;
    cfg.nonlinearity.kind = Nonlinearity::ConstantEnvelope;
    cfg.eta_grid = {0.0, 0.5, 0.99, 1.0, 1.5};
    cfg.n_channel_draws = 3;
    cfg.n_symbols_per_draw = 256;
    cfg.seed = 17;
    const auto m = run_ccdf(cfg);
    CHECK(m.y[0] == 1.0);
    CHECK(m.y[1] == 1.0);
    CHECK(m.y[2] == 1.0);
    CHECK(m.y[3] == 0.0); // power is exactly 1, never > 1
    CHECK(m.y[4] == 0.0);
}

TEST_CASE("run_ccdf: unprecoded SC-FDMA beats OFDM in the tail") {
    ExperimentConfig cfg;
    cfg.n_antennas = 4;
    cfg.n_users = 4;
    cfg.precoder = PrecoderKind::None;
    cfg.block_m = 128;
    cfg.eta_grid = {0.0, 1.0, 2.0, 4.0, 6.0};
    cfg.n_channel_draws = 40;
    cfg.n_symbols_per_draw = 1024;
    cfg.seed = 18;

    cfg.waveform = WaveformKind::OFDM;
    const auto ofdm = run_ccdf(cfg);
    cfg.waveform = WaveformKind::SCFDMA;
    const auto sc = run_ccdf(cfg);

    // validity; exact-zero time samples occur with tiny probability (a QPSK
    // block can sum to exactly zero), so y(0) is only almost surely 1
    CHECK(ofdm.y[0] >= 0.9999);
    for (size_t i = 1; i < ofdm.y.size(); ++i) {
        CHECK(ofdm.y[i] <= ofdm.y[i - 1]);
        CHECK(sc.y[i] <= sc.y[i - 1]);
    }
    // tail ordering at eta = 6 (linear power)
    CHECK(sc.y.back() < ofdm.y.back());
}

TEST_CASE("run_ccdf: block size must divide the draw length") {
    ExperimentConfig cfg;
    cfg.n_antennas = 4;
    cfg.n_users = 2;
    cfg.waveform = WaveformKind::OFDM;
    cfg.block_m = 128;
    cfg.eta_grid = {0.0};
    cfg.n_symbols_per_draw = 100;
    CHECK_THROWS_AS(run_ccdf(cfg), ConfigError);
}
