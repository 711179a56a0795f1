#pragma once

#include <cstdio>
#include <optional>
#include <sstream>
#include <vector>

#include "sprec/core.hpp"
#include "sprec/linalg.hpp"
#include "sprec/norms.hpp"

namespace sprec {

struct IstaConfig {
    double mu = 0.01;          // step size
    double lambda = 0.0;       // l_{1,2} weight
    double sigma_eta_sq = 0.0; // receiver noise variance
    int n_users = 0;           // K
    int n_antennas = 0;        // N
    AbsVariant abs_variant = AbsVariant::ComplexModulus;
    int max_iters = 5000;
    double rel_tol = 1e-7;     // on ||P+ - P||_F / ||P||_F
    enum class Init { Zero, PseudoInverse, Ridge } init = Init::Zero;

    void validate() const {
        if (!(mu > 0.0)) throw std::invalid_argument("IstaConfig: mu must be > 0");
        if (lambda < 0.0) throw std::invalid_argument("IstaConfig: lambda must be >= 0");
        if (sigma_eta_sq < 0.0) throw std::invalid_argument("IstaConfig: sigma_eta_sq must be >= 0");
        if (n_users < 1 || n_antennas < 1)
            throw std::invalid_argument("IstaConfig: n_users and n_antennas must be >= 1");
        if (max_iters < 1 || !(rel_tol > 0.0))
            throw std::invalid_argument("IstaConfig: bad iteration controls");
    }
};

// Two-layer superposition coding of 16-QAM: each user's symbol is the channel
// combination LSB + 2*MSB of two independently precoded QPSK layers.
struct SuperpositionSpec {
    int n_users = 0;

    // Pi = I_K (x) [1, 2], the K x 2K layer-combining matrix.
    CMat expansion() const {
        CMat pi = CMat::Zero(n_users, 2 * n_users);
        for (int i = 0; i < n_users; ++i) {
            pi(i, 2 * i) = 1.0;
            pi(i, 2 * i + 1) = 2.0;
        }
        return pi;
    }

    // J = I_K (x) (11^T - I_2): swaps the columns of each layer pair.
    CMat perturbation() const {
        CMat j = CMat::Zero(2 * n_users, 2 * n_users);
        for (int i = 0; i < n_users; ++i) {
            j(2 * i, 2 * i + 1) = 1.0;
            j(2 * i + 1, 2 * i) = 1.0;
        }
        return j;
    }
};

struct DesignReport {
    CMat precoder;
    int iterations_used = 0;
    std::vector<double> objective_trace;
    std::vector<double> row_l1_norms;
    double sparsity_fraction = 0.0;
    std::vector<double> pair_asymmetry; // superposition designs only
    bool step_size_warning = false;
};

namespace detail {

inline double sparsity_fraction_of(const CMat& P) {
    const double m = P.cwiseAbs().maxCoeff();
    if (m == 0.0) return 1.0;
    const double eps = 1e-6 * m;
    int n = 0;
    for (Eigen::Index j = 0; j < P.cols(); ++j)
        for (Eigen::Index i = 0; i < P.rows(); ++i)
            if (std::abs(P(i, j)) <= eps) ++n;
    return double(n) / double(P.size());
}

inline void fill_report_stats(DesignReport& rep, AbsVariant v) {
    const RVec r = row_l1_norms(rep.precoder, v);
    rep.row_l1_norms.assign(r.data(), r.data() + r.size());
    rep.sparsity_fraction = sparsity_fraction_of(rep.precoder);
}

} // namespace detail

// Minimum-Frobenius zero-forcing design, P = H^H (H H^H)^{-1}.
inline DesignReport design_zf(const CMat& H) {
    DesignReport rep;
    rep.precoder = pseudo_inverse_fat(H);
    rep.iterations_used = 0;
    detail::fill_report_stats(rep, AbsVariant::ComplexModulus);
    return rep;
}

// Elastic-net design objective:
//   ||H P - target||_F^2 + (1/2) ( (K sigma^2 / N) ||P||_F^2
//                                  + lambda ||P^T||_{1,2}^2 )
// plus, when a superposition spec is present, the symmetry-breaking term
// (lambda/2) tr(P J P^H).  The l_{1,2} term uses the configured abs variant;
// the Frobenius terms always use the complex modulus.
inline double objective(const CMat& H, const CMat& P, const IstaConfig& cfg,
                        const CMat& target,
                        const std::optional<SuperpositionSpec>& spec = std::nullopt) {
    if (H.cols() != P.rows() || H.rows() != target.rows() || P.cols() != target.cols())
        throw DimensionError("objective: shape mismatch");
    const double fit = (H * P - target).squaredNorm();
    const double ridge = double(cfg.n_users) * cfg.sigma_eta_sq / double(cfg.n_antennas)
                         * P.squaredNorm();
    const double group = cfg.lambda * l12_sq_rows(P, cfg.abs_variant);
    double pert = 0.0;
    if (spec) {
        const CMat j = spec->perturbation();
        pert = cfg.lambda * (j * (P.adjoint() * P)).trace().real();
    }
    return fit + 0.5 * (ridge + group + pert);
}

// Proximal-gradient (ISTA) solver for the elastic-net design.  Each sweep
// takes the gradient step
//   Delta = H^H (H P - target) + (K sigma^2 / 2N) P  [+ (lambda/2) P J]
// then shrinks entrywise with thresholds mu (lambda/2) r_i, where r_i is the
// row l1 norm of the current iterate (the shrinkage scale of ||P^T||_{1,2}^2).
inline DesignReport design_ista(const CMat& H, const IstaConfig& cfg, const CMat& target,
                                const std::optional<SuperpositionSpec>& spec = std::nullopt) {
    cfg.validate();
    const Eigen::Index K = H.rows(), N = H.cols();
    if (K != cfg.n_users || N != cfg.n_antennas)
        throw DimensionError("design_ista: H shape disagrees with config");
    if (target.rows() != K)
        throw DimensionError("design_ista: target row count must equal K");
    const Eigen::Index L = target.cols();
    if (spec && (spec->n_users != K || L != 2 * K))
        throw DimensionError("design_ista: superposition spec disagrees with target");

    const double c = double(cfg.n_users) * cfg.sigma_eta_sq / (2.0 * cfg.n_antennas);

    DesignReport rep;
    rep.objective_trace.reserve(cfg.max_iters);

    // Step bound: mu * (lmax(H^H H) + c) < 2, otherwise descent may fail.
    {
        Eigen::SelfAdjointEigenSolver<CMat> es(H * H.adjoint(), Eigen::EigenvaluesOnly);
        const double lmax = es.eigenvalues().maxCoeff();
        if (cfg.mu * (lmax + c) >= 2.0) {
            rep.step_size_warning = true;
            std::fprintf(stderr,
                         "design_ista: warning: mu=%g violates the step bound "
                         "(mu*(lmax+c)=%g >= 2); descent may fail\n",
                         cfg.mu, cfg.mu * (lmax + c));
        }
    }

    CMat P;
    switch (cfg.init) {
    case IstaConfig::Init::Zero:          P = CMat::Zero(N, L); break;
    case IstaConfig::Init::PseudoInverse: P = pseudo_inverse_fat(H) * target; break;
    case IstaConfig::Init::Ridge:         P = ridge_right_inverse(H, c, target); break;
    }

    const CMat J = spec ? spec->perturbation() : CMat();
    const CMat HhT = H.adjoint() * target;
    double prev_obj = std::numeric_limits<double>::infinity();
    int growth_streak = 0;
    int iters = 0;

    for (; iters < cfg.max_iters; ++iters) {
        CMat delta = H.adjoint() * (H * P) - HhT + c * P;
        if (spec) delta += 0.5 * cfg.lambda * (P * J);
        const CMat V = P - cfg.mu * delta;
        CMat next;
        if (cfg.lambda > 0.0) {
            const RVec r = row_l1_norms(P, cfg.abs_variant);
            const RMat T = (cfg.mu * 0.5 * cfg.lambda * r) * RVec::Ones(L).transpose();
            next = soft_threshold(V, T, cfg.abs_variant);
        } else {
            next = V;
        }

        const double obj = objective(H, next, cfg, target, spec);
        rep.objective_trace.push_back(obj);
        if (!std::isfinite(obj))
            throw DivergenceError("design_ista: objective became non-finite; reduce mu");
        growth_streak = obj > prev_obj * (1.0 + 1e-12) ? growth_streak + 1 : 0;
        if (growth_streak >= 10)
            throw DivergenceError(
                "design_ista: objective grew for 10 consecutive iterations; reduce mu");
        prev_obj = obj;

        const double denom = std::max(P.norm(), 1e-30);
        const double rel = (next - P).norm() / denom;
        P = std::move(next);
        if (rel < cfg.rel_tol) { ++iters; break; }
    }

    rep.precoder = std::move(P);
    rep.iterations_used = iters;
    detail::fill_report_stats(rep, cfg.abs_variant);
    if (spec) {
        for (int i = 0; i < spec->n_users; ++i) {
            const CVec lsb = rep.precoder.col(2 * i), msb = rep.precoder.col(2 * i + 1);
            rep.pair_asymmetry.push_back((msb - 2.0 * lsb).norm() / std::max(lsb.norm(), 1e-30));
        }
    }
    return rep;
}

// Map 2K QPSK layer symbols (LSB at even positions, MSB at odd) onto the
// K-user 16-QAM grid: out_i = s_{2i} + 2 s_{2i+1}.
inline std::vector<cplx> expand_superposition(const std::vector<cplx>& s_qpsk,
                                              const SuperpositionSpec& spec) {
    if ((int)s_qpsk.size() != 2 * spec.n_users)
        throw DimensionError("expand_superposition: expected 2K symbols");
    for (cplx s : s_qpsk)
        if (std::abs(std::abs(s.real()) - 1.0) > 1e-12 || std::abs(std::abs(s.imag()) - 1.0) > 1e-12)
            throw std::invalid_argument("expand_superposition: input not QPSK (+/-1 +/- j)");
    std::vector<cplx> out(spec.n_users);
    for (int i = 0; i < spec.n_users; ++i)
        out[i] = s_qpsk[2 * i] + 2.0 * s_qpsk[2 * i + 1];
    return out;
}

// Superposition design: ISTA against target Pi with the J perturbation active.
inline DesignReport design_superposition(const CMat& H, const IstaConfig& cfg,
                                         const SuperpositionSpec& spec) {
    if (H.cols() < 2 * H.rows())
        throw DimensionError("design_superposition: requires N >= 2K");
    return design_ista(H, cfg, spec.expansion(), spec);
}

// Columnar serialization: header then one row per precoder row, with
// re/im column pairs.
inline std::string precoder_to_csv(const CMat& P) {
    std::ostringstream os;
    os.precision(17);
    for (Eigen::Index j = 0; j < P.cols(); ++j)
        os << (j ? "," : "") << "re" << j << ",im" << j;
    os << "\n";
    for (Eigen::Index i = 0; i < P.rows(); ++i) {
        for (Eigen::Index j = 0; j < P.cols(); ++j)
            os << (j ? "," : "") << P(i, j).real() << "," << P(i, j).imag();
        os << "\n";
    }
    return os.str();
}

inline CMat precoder_from_csv(const std::string& text) {
    std::istringstream is(text);
    std::string line;
    if (!std::getline(is, line)) throw ConfigError("precoder_from_csv: empty input");
    std::vector<std::vector<double>> rows;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::vector<double> vals;
        std::istringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) vals.push_back(std::stod(cell));
        if (vals.size() % 2 != 0)
            throw ConfigError("precoder_from_csv: odd number of columns");
        if (!rows.empty() && vals.size() != rows.front().size())
            throw ConfigError("precoder_from_csv: ragged rows");
        rows.push_back(std::move(vals));
    }
    if (rows.empty()) throw ConfigError("precoder_from_csv: no data rows");
    CMat P(rows.size(), rows.front().size() / 2);
    for (size_t i = 0; i < rows.size(); ++i)
        for (Eigen::Index j = 0; j < P.cols(); ++j)
            P(i, j) = cplx(rows[i][2 * j], rows[i][2 * j + 1]);
    return P;
}

} // namespace sprec
