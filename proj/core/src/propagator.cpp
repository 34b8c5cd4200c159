#include "boostfold/propagator.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include "boostfold/errors.hpp"

namespace boostfold {

StagePropagator::StagePropagator(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B) : n_(static_cast<int>(A.rows())) {
    augmented_ = Eigen::MatrixXd::Zero(n_ + 2, n_ + 2);
    augmented_.topLeftCorner(n_, n_) = A;
    augmented_.topRightCorner(n_, 2) = B;
}

Transition StagePropagator::transition(double dt) const {
    if (dt == 0.0) {
        return Transition{Eigen::MatrixXd::Identity(n_, n_), Eigen::MatrixXd::Zero(n_, 2)};
    }
    const Eigen::MatrixXd M = (augmented_ * dt).exp();
    return Transition{M.topLeftCorner(n_, n_), M.topRightCorner(n_, 2)};
}

Eigen::VectorXd StagePropagator::advance(const Eigen::VectorXd& x, const Eigen::Vector2d& u, double dt) const {
    if (dt == 0.0) return x;
    return transition(dt).apply(x, u);
}

Eigen::VectorXd stage_advance(const SwitchedModel& model, Stage stage, const Eigen::VectorXd& x, double v_r, double dt) {
    if (!(dt >= 0.0)) throw DomainError("stage_advance: dt must be >= 0");
    const StagePropagator prop(model.A(stage), model.B(stage));
    return prop.advance(x, model.input(v_r), dt);
}

}  // namespace boostfold
