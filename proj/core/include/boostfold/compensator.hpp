#pragma once

#include <complex>

#include <Eigen/Core>

#include "boostfold/converter.hpp"

namespace boostfold {

/// Single-input single-output realization x' = A x + B e, out = C x + D e.
struct StateSpace {
    Eigen::MatrixXd A;
    Eigen::VectorXd B;
    Eigen::RowVectorXd C;
    double D = 0.0;

    std::complex<double> response(std::complex<double> s) const;
};

/// Three-state realization of the type-III compensator: an integrator followed by
/// two lead-lag sections. Each section state is a first-order low-pass copy of its
/// input, so every state carries volts and has unit DC gain from the integrator.
StateSpace realize_type3(const VmcType3& comp);

}  // namespace boostfold
