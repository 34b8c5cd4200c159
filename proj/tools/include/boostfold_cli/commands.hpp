#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "boostfold_cli/config.hpp"

namespace boostfold::cli {

struct CommandResult {
    std::string report;
    std::vector<std::filesystem::path> files;
};

/// Closed-form critical conditions; writes <run_id>_analyze.csv.
CommandResult cmd_analyze(const RunConfig& config);

/// Averaged operating points at v_r with their poles, plus the switched T-periodic orbits;
/// writes <run_id>_steady.csv and <run_id>_orbits.csv.
CommandResult cmd_steady(const RunConfig& config, double v_r);

/// Cycle-by-cycle simulation; writes <run_id>_trajectory.csv.
CommandResult cmd_simulate(const RunConfig& config, double v_r, const std::vector<double>& x0, int cycles);

/// Bifurcation sweep over [from, to]; writes <run_id>_branches.csv and <run_id>_critical.csv.
CommandResult cmd_sweep(const RunConfig& config, unsigned jobs);

/// Averaged c0, c1 and poles over a duty grid (PVMC only); writes <run_id>_poles.csv.
CommandResult cmd_poles(const RunConfig& config);

/// Process exit status for an exception escaping a command.
int exit_code_for(const std::exception& e);

}  // namespace boostfold::cli
