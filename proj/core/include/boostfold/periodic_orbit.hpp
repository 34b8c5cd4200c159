#pragma once

#include <complex>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "boostfold/switched_sim.hpp"

namespace boostfold {

enum class OrbitClass { Stable, Unstable, SaturatedDc, Degenerate };

enum class BifurcationTag { None, SnbProximal, PdbProximal, NeimarkProximal };

const char* to_string(OrbitClass c);
const char* to_string(BifurcationTag t);

struct StabilityInfo {
    OrbitClass classification = OrbitClass::Stable;
    int unstable_count = 0;
    BifurcationTag tag = BifurcationTag::None;
};

/// Stable iff every |lambda| < 1 - margin. Tags a real multiplier within delta of +1 or -1,
/// or a complex pair within delta of the unit circle.
StabilityInfo classify_stability(const std::vector<std::complex<double>>& multipliers, double margin = 0.0,
                                 double delta = 0.02);

struct OrbitOptions {
    double newton_tol = 1e-10;
    int max_iterations = 50;
    int max_halvings = 8;
    int samples_per_cycle = 64;
    /// Relative size of the Jacobian perturbation used inside Newton.
    double newton_fd_step = 1e-7;
    /// Switching fractions closer than this to 0 or 1 are treated as grazing.
    double grazing_tol = 1e-6;
};

struct Orbit {
    int period_mult = 1;
    double v_r = 0.0;
    Eigen::VectorXd x_star;
    std::vector<double> duties;
    std::vector<std::complex<double>> multipliers;  ///< descending magnitude
    Eigen::MatrixXd monodromy;
    double residual = 0.0;  ///< normalized ||P^k(x*) - x*||
    StabilityInfo stability;
    bool converged = false;
    int iterations = 0;
    std::vector<double> residual_history;
    std::string failure;

    bool is_stable() const { return stability.classification == OrbitClass::Stable; }
    double max_abs_multiplier() const;
};

/// One clock period of the switched dynamics.
Eigen::VectorXd stroboscopic_map(const CycleMap& map, double v_r, const Eigen::VectorXd& x);
Eigen::VectorXd stroboscopic_map(const SwitchedModel& model, double v_r, const Eigen::VectorXd& x);

/// k clock periods; duties of the visited cycles are appended to `duties` when given.
Eigen::VectorXd iterate_map(const CycleMap& map, double v_r, const Eigen::VectorXd& x, int k,
                            std::vector<double>* duties = nullptr);

/// The T-periodic state and reference that switch exactly at fraction `duty` of the cycle.
/// Solves the periodicity and comparator conditions jointly for (x0, v_r); the resulting
/// orbit is admissible only if the comparator does not trip earlier in the cycle.
struct DutyOrbit {
    Eigen::VectorXd x;
    double v_r = 0.0;
};
DutyOrbit periodic_state_at_duty(const CycleMap& map, double duty);

struct OrbitSeed {
    Eigen::VectorXd x;
    /// Switching fractions per cycle; derived from the map when empty.
    std::vector<double> duties;
};

/// Newton iteration for a fixed point of P^k on the augmented unknowns (x, duty_1..duty_k),
/// followed by a check that the true map switches at the solved instants.
Orbit find_periodic_orbit(const CycleMap& map, double v_r, const OrbitSeed& seed, int period_mult = 1,
                          const OrbitOptions& options = {});
Orbit find_periodic_orbit(const SwitchedModel& model, double v_r, const Eigen::VectorXd& x_guess, int period_mult = 1,
                          const OrbitOptions& options = {});

/// Central-difference Jacobian of P^k at x with per-coordinate step
/// h = step_scale * max(1e-6, 1e-6 ||x||).
Eigen::MatrixXd map_jacobian(const CycleMap& map, double v_r, const Eigen::VectorXd& x, int k,
                             double step_scale = 1.0);

/// Throws GrazingError when a switching fraction lies within grazing_tol of 0 or 1.
std::vector<std::complex<double>> floquet_multipliers(const CycleMap& map, const Orbit& orbit,
                                                      double step_scale = 1.0, double grazing_tol = 1e-6);
std::vector<std::complex<double>> floquet_multipliers(const SwitchedModel& model, const Orbit& orbit,
                                                      double step_scale = 1.0);

/// Eigenvalues sorted by descending magnitude, ties broken by real then imaginary part.
std::vector<std::complex<double>> sorted_eigenvalues(const Eigen::MatrixXd& M);

/// The D = 1 fixed point when the comparator never trips there; nullopt otherwise.
std::optional<Orbit> dc_orbit(const CycleMap& map, double v_r);

/// T-periodic orbit switching at `duty`, with admissibility and stability evaluated.
/// converged is false when the comparator trips elsewhere in the cycle.
Orbit orbit_at_duty(const CycleMap& map, double duty, const OrbitOptions& options = {});

/// Columns: period, v_r, classification, unstable_count, tag, residual, <state labels>,
/// duties (';'-joined), lambda<i>_re, lambda<i>_im.
void write_orbits_csv(std::ostream& os, const std::vector<Orbit>& orbits, const std::vector<std::string>& labels);
void write_orbits_csv(const std::filesystem::path& path, const std::vector<Orbit>& orbits,
                      const std::vector<std::string>& labels);

}  // namespace boostfold
