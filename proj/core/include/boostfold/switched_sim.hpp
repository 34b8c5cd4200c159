#pragma once

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "boostfold/converter.hpp"
#include "boostfold/propagator.hpp"

namespace boostfold {

struct CycleOutcome {
    Eigen::VectorXd x_end;
    Eigen::VectorXd x_switch;   ///< state at the switching instant (x_end when saturated high)
    double t_switch = 0.0;      ///< seconds from the clock edge
    double duty = 0.0;
    bool saturated_high = false;///< no crossing: the whole cycle in S1
    bool saturated_low = false; ///< comparator already tripped at the clock edge
};

/// One clock period of the switched model with precomputed stage transitions.
/// Immutable once built; safe to share between threads.
class CycleMap {
public:
    explicit CycleMap(SwitchedModel model, int samples_per_cycle = 64);

    const SwitchedModel& model() const { return model_; }
    int samples_per_cycle() const { return samples_; }

    /// y(t) - h(t) for a state observed t seconds into the cycle.
    double comparator(const Eigen::VectorXd& x, double v_r, double t) const;

    /// Earliest switching instant in [0, T): 0 when the comparator has already
    /// tripped at the clock edge, nullopt when it never trips (D = 1).
    std::optional<double> switching_instant(const Eigen::VectorXd& x_start, double v_r) const;

    CycleOutcome cycle(const Eigen::VectorXd& x, double v_r) const;

    Eigen::VectorXd advance(Stage stage, const Eigen::VectorXd& x, double v_r, double dt) const;
    const StagePropagator& propagator(Stage stage) const { return stage == Stage::S1 ? s1_ : s2_; }

private:
    struct Crossing {
        double t = 0.0;
        Eigen::VectorXd x;
    };
    std::optional<Crossing> find_crossing(const Eigen::VectorXd& x_start, const Eigen::Vector2d& u, double v_r) const;

    SwitchedModel model_;
    int samples_;
    StagePropagator s1_, s2_;
    Transition sample_step_;
    Transition full_s1_, full_s2_;
};

std::optional<double> switching_instant(const SwitchedModel& model, const Eigen::VectorXd& x_start, double v_r);

struct TrajectorySample {
    double t = 0.0;
    Eigen::VectorXd x;
    double y = 0.0;
    double h = 0.0;
    Stage stage = Stage::S1;
    int cycle = 0;
    double duty = 0.0;
};

struct Trajectory {
    std::vector<TrajectorySample> samples;
    std::vector<double> cycle_duties;
    std::vector<bool> saturated_high;
    std::vector<bool> saturated_low;
    /// State at every clock edge, n_cycles + 1 entries.
    std::vector<Eigen::VectorXd> clock_states;
    /// Power-stage D = 1 operating point (v_s/r, 0), present when r > 0.
    std::optional<Eigen::Vector2d> dc_target;
    std::vector<std::string> state_labels;
};

struct SimulationOptions {
    int samples_per_cycle = 64;
    /// Extra uniformly spaced output samples per cycle (0: clock edges and switching instants only).
    int output_points_per_cycle = 0;
};

Trajectory simulate_cycles(const SwitchedModel& model, const Eigen::VectorXd& x0, double v_r, int n_cycles,
                           const SimulationOptions& options = {});

/// True iff the last `window` cycles are all stuck in S1 and the power-stage state
/// moves monotonically toward (v_s/r, 0) over them.
bool detect_dc_saturation(const Trajectory& traj, int window);

/// Period p in {1, 2, ...} of the terminal duty pattern over `window` cycles, or nullopt.
std::optional<int> terminal_duty_period(const Trajectory& traj, int window = 20, int max_period = 4, double tol = 1e-4);

/// Columns: t, <state labels>, y, h, stage, cycle_index, duty.
void write_trajectory_csv(std::ostream& os, const Trajectory& traj);
void write_trajectory_csv(const std::filesystem::path& path, const Trajectory& traj);

/// Averaged operating point at the lowest steady duty for v_r, lifted to the full
/// model state and scaled by (1 + kick). Falls back to the zero state when no
/// steady duty exists.
Eigen::VectorXd default_initial_state(const SwitchedModel& model, double v_r, double kick = 1e-3);

}  // namespace boostfold
