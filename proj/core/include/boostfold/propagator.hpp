#pragma once

#include <Eigen/Core>

#include "boostfold/converter.hpp"

namespace boostfold {

/// x(t0 + dt) = Phi x(t0) + Gamma u for one LTI stage.
struct Transition {
    Eigen::MatrixXd Phi;
    Eigen::MatrixXd Gamma;

    Eigen::VectorXd apply(const Eigen::VectorXd& x, const Eigen::Vector2d& u) const { return Phi * x + Gamma * u; }
};

/// Exact propagation of x' = A x + B u with constant u through the exponential of
///   [A  B]
///   [0  0]
class StagePropagator {
public:
    StagePropagator() = default;
    StagePropagator(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B);

    Transition transition(double dt) const;
    Eigen::VectorXd advance(const Eigen::VectorXd& x, const Eigen::Vector2d& u, double dt) const;

    int dimension() const { return n_; }

private:
    Eigen::MatrixXd augmented_;
    int n_ = 0;
};

/// Propagates x through stage `stage` of `model` for dt >= 0 seconds at reference v_r.
Eigen::VectorXd stage_advance(const SwitchedModel& model, Stage stage, const Eigen::VectorXd& x, double v_r, double dt);

}  // namespace boostfold
