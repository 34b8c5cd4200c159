#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <boostfold/converter.hpp>

namespace boostfold::cli {

struct SweepSettings {
    std::optional<double> from;
    std::optional<double> to;
    int points = 101;
    bool track_period_two = true;
    int duty_curve_points = 400;
    double branch_jump = 0.05;
};

struct SimulateSettings {
    std::optional<double> v_r;
    int cycles = 1000;
    std::vector<double> x0;
    double kick = 1e-3;
    int output_points = 0;
    int saturation_window = 50;
};

struct SteadySettings {
    std::optional<double> v_r;
};

struct PolesSettings {
    double d_from = 0.0;
    double d_to = 0.95;
    int points = 96;
};

struct SolverSettings {
    double newton_tol = 1e-10;
    int max_iterations = 50;
    int samples_per_cycle = 64;
    double grazing_tol = 1e-6;
};

struct OutputSettings {
    std::filesystem::path dir = ".";
    std::string run_id = "run";
};

struct RunConfig {
    ConverterParams params;
    SweepSettings sweep;
    SimulateSettings simulate;
    SteadySettings steady;
    PolesSettings poles;
    SolverSettings solver;
    OutputSettings output;
};

/// Parses the `key = value` / `[section]` format. Throws ParseError for malformed
/// lines and unknown keys, ValidationError for missing or out-of-range values.
RunConfig parse_config(std::string_view text);

RunConfig load_config(const std::filesystem::path& path);

/// Range and consistency checks on the command settings; converter parameters are
/// checked by ConverterParams::validate.
void validate(const RunConfig& config);

}  // namespace boostfold::cli
