#pragma once

#include <cmath>

#include "sprec/core.hpp"

namespace sprec {

struct NormSpec {
    double p = 2.0;
    double q = 2.0;
    AbsVariant abs_variant = AbsVariant::ComplexModulus;
};

inline double entry_abs(cplx z, AbsVariant v) {
    return v == AbsVariant::SplitOneBit ? std::abs(z.real()) + std::abs(z.imag())
                                        : std::abs(z);
}

// ||A||_{p,q}^q = sum_j ( sum_i |a_ij|^p )^{q/p}, inner sum over the rows of
// each column.  Returns the q-th power, not the norm itself.
inline double lpq_norm_q(const CMat& A, const NormSpec& spec) {
    if (A.rows() == 0 || A.cols() == 0)
        throw DimensionError("lpq_norm_q: empty matrix");
    if (!(spec.p > 0.0) || !(spec.q > 0.0))
        throw std::invalid_argument("lpq_norm_q: p and q must be positive");
    double acc = 0.0;
    for (Eigen::Index j = 0; j < A.cols(); ++j) {
        double col = 0.0;
        for (Eigen::Index i = 0; i < A.rows(); ++i)
            col += std::pow(entry_abs(A(i, j), spec.abs_variant), spec.p);
        acc += std::pow(col, spec.q / spec.p);
    }
    return acc;
}

// Row-wise l1 norms of P (i.e. the column-l1 norms of P^T).  This is the
// shrinkage scale vector of the l_{1,2} penalty on P^T.
inline RVec row_l1_norms(const CMat& P, AbsVariant v) {
    RVec r = RVec::Zero(P.rows());
    for (Eigen::Index i = 0; i < P.rows(); ++i)
        for (Eigen::Index j = 0; j < P.cols(); ++j)
            r(i) += entry_abs(P(i, j), v);
    return r;
}

// ||P^T||_{1,2}^2 = sum_i ( sum_j |p_ij| )^2
inline double l12_sq_rows(const CMat& P, AbsVariant v) {
    return row_l1_norms(P, v).squaredNorm();
}

} // namespace sprec
