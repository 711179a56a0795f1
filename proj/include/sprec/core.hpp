#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace sprec {

using cplx = std::complex<double>;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;
using RMat = Eigen::MatrixXd;
using RVec = Eigen::VectorXd;

// How |z| is evaluated inside norms and proximal operators.
// SplitOneBit treats real and imaginary rails independently: |x+yj| = |x|+|y|.
enum class AbsVariant { ComplexModulus, SplitOneBit };

struct DimensionError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct RankDeficiencyError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DivergenceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace sprec
