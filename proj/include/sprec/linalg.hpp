#pragma once

#include <algorithm>
#include <cmath>

#include "sprec/core.hpp"
#include "sprec/norms.hpp"

namespace sprec {

inline constexpr double kConditionThreshold = 1e12;

namespace detail {

// Condition number of a Hermitian PSD matrix via its eigenvalues.
inline double hermitian_condition(const CMat& G) {
    Eigen::SelfAdjointEigenSolver<CMat> es(G, Eigen::EigenvaluesOnly);
    const double lo = es.eigenvalues().minCoeff();
    const double hi = es.eigenvalues().maxCoeff();
    if (lo <= 0.0) return std::numeric_limits<double>::infinity();
    return hi / lo;
}

} // namespace detail

// Minimum-Frobenius right inverse of a fat full-row-rank H:
//   P = H^H (H H^H)^{-1}
// The K x K Gram system is the cheap path since K << N.
inline CMat pseudo_inverse_fat(const CMat& H) {
    const Eigen::Index K = H.rows(), N = H.cols();
    if (K < 1 || N < 1) throw DimensionError("pseudo_inverse_fat: empty matrix");
    if (K > N) throw DimensionError("pseudo_inverse_fat: expected rows <= cols");
    const CMat G = H * H.adjoint();
    if (!(detail::hermitian_condition(G) < kConditionThreshold))
        throw RankDeficiencyError("pseudo_inverse_fat: H H^H is singular or ill-conditioned");
    Eigen::LLT<CMat> llt(G);
    if (llt.info() != Eigen::Success)
        throw RankDeficiencyError("pseudo_inverse_fat: Cholesky factorization failed");
    return H.adjoint() * llt.solve(CMat::Identity(K, K));
}

// Unique minimizer of ||H P - target||_F^2 + c ||P||_F^2 for c > 0:
//   P = (H^H H + c I)^{-1} H^H target = H^H (H H^H + c I)^{-1} target.
// The second form keeps the solve at K x K.  c = 0 falls back to the
// pseudo-inverse composed with the target.
inline CMat ridge_right_inverse(const CMat& H, double c, const CMat& target) {
    if (H.rows() != target.rows())
        throw DimensionError("ridge_right_inverse: H and target row counts differ");
    if (c < 0.0) throw std::invalid_argument("ridge_right_inverse: c must be >= 0");
    if (c == 0.0) return pseudo_inverse_fat(H) * target;
    CMat G = H * H.adjoint();
    G.diagonal().array() += c;
    return H.adjoint() * Eigen::LLT<CMat>(G).solve(target);
}

// Elementwise proximal operator of the (weighted) l1-type penalties.
//   ComplexModulus: exp(j*arg m) * max(|m| - t, 0)
//   SplitOneBit:    real soft threshold applied to Re and Im independently,
//                   same threshold t on each rail.
inline CMat soft_threshold(const CMat& M, const RMat& T, AbsVariant v) {
    if (M.rows() != T.rows() || M.cols() != T.cols())
        throw DimensionError("soft_threshold: shape mismatch");
    if ((T.array() < 0.0).any())
        throw std::invalid_argument("soft_threshold: negative threshold");
    CMat out(M.rows(), M.cols());
    auto shrink = [](double x, double t) {
        return x > t ? x - t : (x < -t ? x + t : 0.0);
    };
    for (Eigen::Index j = 0; j < M.cols(); ++j)
        for (Eigen::Index i = 0; i < M.rows(); ++i) {
            const cplx m = M(i, j);
            const double t = T(i, j);
            if (v == AbsVariant::SplitOneBit) {
                out(i, j) = cplx(shrink(m.real(), t), shrink(m.imag(), t));
            } else {
                const double a = std::abs(m);
                out(i, j) = a > t ? m * ((a - t) / a) : cplx(0.0, 0.0);
            }
        }
    return out;
}

} // namespace sprec
