#pragma once

#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "boostfold/periodic_orbit.hpp"

namespace boostfold {

enum class CriticalKind {
    Snb,       ///< fold: real multiplier through +1, two orbits annihilate
    Neimark,   ///< complex pair through the unit circle
    Pdb,       ///< real multiplier through -1
    Boundary,  ///< orbit stops being admissible (comparator trips at a second instant)
};

const char* to_string(CriticalKind k);

struct BranchPoint {
    double v_r = 0.0;
    Orbit orbit;
    int grid_index = 0;
};

struct Branch {
    int id = 0;
    std::string origin;  ///< lower, upper, main, dc, period-2
    int period_mult = 1;
    std::vector<BranchPoint> points;
};

struct CriticalPoint {
    CriticalKind kind = CriticalKind::Snb;
    double v_r = 0.0;
    double duty = 0.0;
    Eigen::VectorXd state;
    int branch_id = -1;
    int other_branch_id = -1;
};

struct BifurcationDiagram {
    std::vector<Branch> branches;
    std::vector<CriticalPoint> critical_points;
    std::vector<double> sweep_grid;
    std::vector<std::string> state_labels;
};

struct SweepOptions {
    OrbitOptions orbit;
    double branch_jump = 0.05;
    double dedupe_tol = 1e-6;
    int duty_curve_points = 400;
    bool track_period_two = true;
    int period_two_transient = 2000;
    unsigned jobs = 0;  ///< 0: hardware concurrency
    bool locate = true;
};

/// Sampled v_r(duty) for T-periodic orbits switching once per cycle, NaN where the
/// periodicity system is singular.
struct DutyCurve {
    std::vector<double> duty;
    std::vector<double> v_r;
};
DutyCurve duty_curve(const CycleMap& map, int points, double lo = 0.002, double hi = 0.998);

/// Admissible interior extrema of v_r(duty), each refined by golden section.
std::vector<CriticalPoint> switched_folds(const CycleMap& map, const DutyCurve& curve, const OrbitOptions& options = {});

/// Every duty with periodic_state_at_duty(duty).v_r = v_r on the sampled curve, ascending.
std::vector<double> duty_roots(const CycleMap& map, const DutyCurve& curve, double v_r);

BifurcationDiagram sweep(const SwitchedModel& model, double v_r_min, double v_r_max, int n_points,
                         const SweepOptions& options = {});

/// Brackets the first crossing of `kind` along the branch and bisects it. Throws
/// NoBracketError when the branch has no such crossing.
CriticalPoint locate_bifurcation(const SwitchedModel& model, const Branch& branch, CriticalKind kind,
                                 const SweepOptions& options = {});

/// Columns: branch_id, origin, period, v_r, duty, duty_2, <state labels>, classification,
/// unstable_count, max_abs, lambda<i>_re, lambda<i>_im.
void write_branches_csv(std::ostream& os, const BifurcationDiagram& diagram);

/// Columns: kind, v_r, duty, branch_id, other_branch_id, <state labels>.
void write_critical_csv(std::ostream& os, const BifurcationDiagram& diagram);

/// Writes <dir>/<run_id>_branches.csv and <dir>/<run_id>_critical.csv.
void export_diagram(const BifurcationDiagram& diagram, const std::filesystem::path& dir, const std::string& run_id);

}  // namespace boostfold
