#include "boostfold/compensator.hpp"

#include <Eigen/LU>

namespace boostfold {

std::complex<double> StateSpace::response(std::complex<double> s) const {
    const Eigen::Index n = A.rows();
    const Eigen::MatrixXcd M = s * Eigen::MatrixXcd::Identity(n, n) - A.cast<std::complex<double>>();
    const Eigen::VectorXcd v = M.partialPivLu().solve(B.cast<std::complex<double>>());
    return (C.cast<std::complex<double>>() * v)(0) + D;
}

StateSpace realize_type3(const VmcType3& comp) {
    const double a1 = comp.p1 / comp.z1;
    const double a2 = comp.p2 / comp.z2;

    // x1' = K_c e
    // x2' = p1 (x1 - x2),          out1 = a1 x1 + (1 - a1) x2
    // x3' = p2 (out1 - x3),        out  = a2 out1 + (1 - a2) x3
    StateSpace ss;
    ss.A = Eigen::MatrixXd::Zero(3, 3);
    ss.A(1, 0) = comp.p1;
    ss.A(1, 1) = -comp.p1;
    ss.A(2, 0) = comp.p2 * a1;
    ss.A(2, 1) = comp.p2 * (1.0 - a1);
    ss.A(2, 2) = -comp.p2;
    ss.B = Eigen::Vector3d(comp.K_c, 0.0, 0.0);
    ss.C = Eigen::RowVector3d(a2 * a1, a2 * (1.0 - a1), 1.0 - a2);
    ss.D = 0.0;
    return ss;
}

}  // namespace boostfold
