#include <iostream>
#include <optional>
#include <string>
#include <thread>

#include <CLI11.hpp>

#include <boostfold/errors.hpp>

#include "boostfold_cli/commands.hpp"
#include "boostfold_cli/config.hpp"

namespace {

std::vector<double> parse_list(const std::string& text) {
    std::vector<double> out;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t comma = text.find(',', pos);
        const std::string item = text.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
        try {
            std::size_t used = 0;
            out.push_back(std::stod(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw boostfold::ValidationError("--x0", "expected comma-separated numbers, got '" + text + "'");
        }
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    namespace cli = boostfold::cli;

    CLI::App app{"Bifurcation analysis of PWM boost converters"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    std::string run_id;
    unsigned jobs = std::max(1u, std::thread::hardware_concurrency());
    app.add_option("--config", config_path, "Configuration file")->required()->check(CLI::ExistingFile);
    app.add_option("--out", out_dir, "Output directory (overrides output.dir)");
    app.add_option("--run-id", run_id, "Prefix of output files (overrides output.run_id)");
    app.add_option("--jobs", jobs, "Worker threads for sweeps")->check(CLI::PositiveNumber);

    auto* analyze = app.add_subcommand("analyze", "Closed-form SNB/Hopf critical conditions");

    std::optional<double> steady_vr;
    auto* steady = app.add_subcommand("steady", "Coexisting operating points at one reference");
    steady->add_option("--vr", steady_vr, "Reference voltage");

    std::optional<double> sim_vr;
    std::optional<int> sim_cycles;
    std::string sim_x0;
    auto* simulate = app.add_subcommand("simulate", "Cycle-accurate simulation");
    simulate->add_option("--vr", sim_vr, "Reference voltage");
    simulate->add_option("--cycles", sim_cycles, "Number of clock cycles");
    simulate->add_option("--x0", sim_x0, "Initial state, comma separated (i_L,v_C,...)");

    std::optional<double> sweep_from, sweep_to;
    std::optional<int> sweep_points;
    auto* sweep = app.add_subcommand("sweep", "Bifurcation diagram over a reference range");
    sweep->add_option("--from", sweep_from, "Lower end of the v_r range");
    sweep->add_option("--to", sweep_to, "Upper end of the v_r range");
    sweep->add_option("--points", sweep_points, "Grid points");

    std::optional<double> d_from, d_to;
    std::optional<int> d_points;
    auto* poles = app.add_subcommand("poles", "Averaged coefficients and poles over a duty grid");
    poles->add_option("--d-from", d_from, "Lowest duty");
    poles->add_option("--d-to", d_to, "Highest duty");
    poles->add_option("--points", d_points, "Grid points");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    try {
        cli::RunConfig cfg = cli::load_config(config_path);
        if (!out_dir.empty()) cfg.output.dir = out_dir;
        if (!run_id.empty()) cfg.output.run_id = run_id;
        if (sweep_from) cfg.sweep.from = sweep_from;
        if (sweep_to) cfg.sweep.to = sweep_to;
        if (sweep_points) cfg.sweep.points = *sweep_points;
        if (d_from) cfg.poles.d_from = *d_from;
        if (d_to) cfg.poles.d_to = *d_to;
        if (d_points) cfg.poles.points = *d_points;
        if (sim_cycles) cfg.simulate.cycles = *sim_cycles;
        if (!sim_x0.empty()) cfg.simulate.x0 = parse_list(sim_x0);
        if (steady_vr) cfg.steady.v_r = steady_vr;
        if (sim_vr) cfg.simulate.v_r = sim_vr;
        cli::validate(cfg);

        cli::CommandResult result;
        if (analyze->parsed()) {
            result = cli::cmd_analyze(cfg);
        } else if (steady->parsed()) {
            if (!cfg.steady.v_r) throw boostfold::ValidationError("steady.v_r", "required (--vr)");
            result = cli::cmd_steady(cfg, *cfg.steady.v_r);
        } else if (simulate->parsed()) {
            if (!cfg.simulate.v_r) throw boostfold::ValidationError("simulate.v_r", "required (--vr)");
            result = cli::cmd_simulate(cfg, *cfg.simulate.v_r, cfg.simulate.x0, cfg.simulate.cycles);
        } else if (sweep->parsed()) {
            result = cli::cmd_sweep(cfg, jobs);
        } else if (poles->parsed()) {
            result = cli::cmd_poles(cfg);
        }
        std::cout << result.report;
        for (const auto& f : result.files) std::cout << "wrote " << f.string() << '\n';
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return cli::exit_code_for(e);
    }
}
