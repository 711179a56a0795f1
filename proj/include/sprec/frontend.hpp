#pragma once

#include <cmath>

#include "sprec/core.hpp"

namespace sprec {

enum class Nonlinearity { Ideal, OneBit, ConstantEnvelope };

struct NonlinearitySpec {
    Nonlinearity kind = Nonlinearity::Ideal;
    // Value emitted by the constant-envelope map for an exact-zero input.
    cplx zero_phase_policy{1.0, 0.0};
    // Sign assigned to an exact-zero rail by the one-bit quantizer.
    double sign_zero_policy = +1.0;
};

inline cplx apply_nonlinearity(cplx y, const NonlinearitySpec& spec) {
    switch (spec.kind) {
    case Nonlinearity::Ideal:
        return y;
    case Nonlinearity::OneBit: {
        constexpr double inv_sqrt2 = 0.7071067811865475244;
        const double re = y.real() == 0.0 ? spec.sign_zero_policy : (y.real() > 0.0 ? 1.0 : -1.0);
        const double im = y.imag() == 0.0 ? spec.sign_zero_policy : (y.imag() > 0.0 ? 1.0 : -1.0);
        return cplx(re * inv_sqrt2, im * inv_sqrt2);
    }
    case Nonlinearity::ConstantEnvelope: {
        const double a = std::abs(y);
        if (a == 0.0) return spec.zero_phase_policy;
        return y / a;
    }
    }
    return y; // unreachable
}

template <typename Derived>
auto apply_nonlinearity(const Eigen::MatrixBase<Derived>& x, const NonlinearitySpec& spec) {
    return x.unaryExpr([&spec](cplx y) { return apply_nonlinearity(y, spec); }).eval();
}

} // namespace sprec
