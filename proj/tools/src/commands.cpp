#include "boostfold_cli/commands.hpp"

#include <cmath>
#include <sstream>

#include <fmt/format.h>

#include <boostfold/averaged.hpp>
#include <boostfold/bifurcation.hpp>
#include <boostfold/csv.hpp>
#include <boostfold/errors.hpp>

namespace boostfold::cli {

namespace {

namespace fs = std::filesystem;

fs::path output_path(const RunConfig& c, const std::string& suffix) {
    std::error_code ec;
    fs::create_directories(c.output.dir, ec);
    if (ec) throw IoError("cannot create output directory " + c.output.dir.string() + ": " + ec.message());
    return c.output.dir / (c.output.run_id + "_" + suffix + ".csv");
}

std::string s4(double x) { return format_short(x); }

std::string complex4(std::complex<double> z) {
    if (z.imag() == 0.0) return s4(z.real());
    return fmt::format("{} {} {}j", s4(z.real()), z.imag() < 0 ? "-" : "+", s4(std::abs(z.imag())));
}

OrbitOptions orbit_options(const RunConfig& c) {
    OrbitOptions o;
    o.newton_tol = c.solver.newton_tol;
    o.max_iterations = c.solver.max_iterations;
    o.samples_per_cycle = c.solver.samples_per_cycle;
    o.grazing_tol = c.solver.grazing_tol;
    return o;
}

class CsvRows {
public:
    void row(const std::string& key, double value) { os_ << key << ',' << format_number(value) << '\n'; }
    void row(const std::string& key, const std::string& value) { os_ << key << ',' << value << '\n'; }
    std::string str() const { return "quantity,value\n" + os_.str(); }

private:
    std::ostringstream os_;
};

}  // namespace

CommandResult cmd_analyze(const RunConfig& config) {
    const ConverterParams& p = config.params;
    const averaged::CriticalReport rep = averaged::critical_report(p);
    std::ostringstream out;
    CsvRows csv;

    out << fmt::format("scheme              {}\n", scheme_name(p.scheme));
    out << fmt::format("eta                 {}\n", s4(rep.eta));
    csv.row("scheme", std::string(scheme_name(p.scheme)));
    csv.row("eta", rep.eta);
    if (rep.kappa) {
        out << fmt::format("kappa               {}\n", s4(*rep.kappa));
        csv.row("kappa", *rep.kappa);
    }

    if (rep.D_S) {
        out << fmt::format("D_S                 {}\n", s4(*rep.D_S));
        out << fmt::format("v_r*                {}\n", s4(*rep.v_r_star));
        out << fmt::format("v_r(D_S)            {}\n", s4(*rep.v_r_at_snb_duty));
        csv.row("D_S", *rep.D_S);
        csv.row("v_r_star", *rep.v_r_star);
        csv.row("v_r_at_D_S", *rep.v_r_at_snb_duty);
    } else {
        out << "SNB                 none (r = 0 or open voltage loop)\n";
        csv.row("snb", "none");
    }

    if (rep.hopf_exclusion_threshold) {
        if (rep.D_H) {
            out << fmt::format("D_H                 {}\n", s4(*rep.D_H));
            out << fmt::format("v_r(D_H)            {}\n", s4(*rep.v_r_hopf));
            csv.row("D_H", *rep.D_H);
            csv.row("v_r_at_D_H", *rep.v_r_hopf);
        } else {
            out << "D_H                 no Hopf\n";
            csv.row("D_H", "none");
        }
        const bool excluded = *rep.kappa > *rep.hopf_exclusion_threshold;
        out << fmt::format("no Hopf for kappa > {}: {}\n", s4(*rep.hopf_exclusion_threshold),
                           excluded ? "true" : "false");
        csv.row("hopf_exclusion_threshold", *rep.hopf_exclusion_threshold);
        csv.row("hopf_excluded", excluded ? "true" : "false");
        const auto& ord = *rep.ordering;
        out << fmt::format("Hopf before SNB     {}\n", ord.precedes ? "true" : "false");
        out << fmt::format("kappa > {} (sufficient): {}\n", s4(ord.threshold),
                           ord.sufficient_condition ? "true" : "false");
        csv.row("hopf_precedes_snb", ord.precedes ? "true" : "false");
        csv.row("hopf_sufficient_threshold", ord.threshold);
        csv.row("hopf_sufficient_condition", ord.sufficient_condition ? "true" : "false");
    }

    if (rep.critical_mode) {
        const auto& cm = *rep.critical_mode;
        out << fmt::format("critical mode at D_S: K = {}, K_crit = {}, K* = {}, SNB in DCM excluded: {}\n", s4(cm.K),
                           s4(cm.K_crit), s4(cm.K_star), cm.snb_excluded ? "true" : "false");
        csv.row("K", cm.K);
        csv.row("K_crit", cm.K_crit);
        csv.row("K_star", cm.K_star);
        csv.row("dcm_snb_excluded", cm.snb_excluded ? "true" : "false");
    }

    if (rep.dc) {
        out << fmt::format("DC solution         i_L = {}, v_C = {}\n", s4(rep.dc->i_L), s4(rep.dc->v_C));
        csv.row("dc_i_L", rep.dc->i_L);
        csv.row("dc_v_C", rep.dc->v_C);
    } else {
        out << "DC solution         none (r = 0)\n";
        csv.row("dc", "none");
    }

    CommandResult res;
    const fs::path path = output_path(config, "analyze");
    write_text_file(path, csv.str());
    res.report = out.str();
    res.files.push_back(path);
    return res;
}

CommandResult cmd_steady(const RunConfig& config, double v_r) {
    const ConverterParams& p = config.params;
    std::ostringstream out, csv;
    csv << "kind,duty,i_L,v_C,c1,c0,pole1_re,pole1_im,pole2_re,pole2_im,classification\n";

    std::vector<double> duties;
    if (!std::holds_alternative<CmcOpenLoop>(p.scheme)) duties = averaged::duty_solutions(p, v_r);
    out << fmt::format("v_r = {}: {} averaged operating point(s)\n", s4(v_r), duties.size());
    for (double d : duties) {
        const averaged::AveragedPoint pt = averaged::averaged_point(p, d);
        csv << "averaged," << format_number(d) << ',' << format_number(pt.i_L) << ',' << format_number(pt.v_C);
        out << fmt::format("  D = {}  i_L = {}  v_C = {}", s4(d), s4(pt.i_L), s4(pt.v_C));
        if (pt.coeffs) {
            csv << ',' << format_number(pt.coeffs->c1) << ',' << format_number(pt.coeffs->c0);
            for (const auto& s : *pt.poles) csv << ',' << format_number(s.real()) << ',' << format_number(s.imag());
            csv << ',' << averaged::to_string(*pt.classification) << '\n';
            out << fmt::format("  poles {}, {}  ({})", complex4((*pt.poles)[0]), complex4((*pt.poles)[1]),
                               averaged::to_string(*pt.classification));
        } else {
            csv << ",,,,,,,\n";
        }
        out << '\n';
    }
    if (p.r > 0.0) {
        const auto dc = averaged::dc_solution(p);
        csv << "dc," << format_number(1.0) << ',' << format_number(dc.i_L) << ',' << format_number(dc.v_C)
            << ",,,,,,,\n";
        out << fmt::format("  DC: i_L = {}, v_C = {}\n", s4(dc.i_L), s4(dc.v_C));
    }

    const SwitchedModel model = build_model(p);
    const OrbitOptions oo = orbit_options(config);
    const CycleMap map(model, oo.samples_per_cycle);
    const DutyCurve curve = duty_curve(map, config.sweep.duty_curve_points);
    std::vector<Orbit> orbits;
    for (double d : duty_roots(map, curve, v_r)) {
        const DutyOrbit seed = periodic_state_at_duty(map, d);
        Orbit o = find_periodic_orbit(map, v_r, OrbitSeed{seed.x, {d}}, 1, oo);
        if (o.converged && o.stability.classification != OrbitClass::Degenerate) orbits.push_back(std::move(o));
    }
    if (auto dc = dc_orbit(map, v_r)) orbits.push_back(std::move(*dc));
    out << fmt::format("switched model: {} periodic orbit(s)\n", orbits.size());
    for (const Orbit& o : orbits) {
        out << fmt::format("  D = {}  {}  max|lambda| = {}\n", s4(o.duties[0]), to_string(o.stability.classification),
                           s4(o.max_abs_multiplier()));
    }

    CommandResult res;
    const fs::path steady_path = output_path(config, "steady");
    write_text_file(steady_path, csv.str());
    const fs::path orbit_path = output_path(config, "orbits");
    write_orbits_csv(orbit_path, orbits, model.state_labels);
    res.report = out.str();
    res.files = {steady_path, orbit_path};
    return res;
}

CommandResult cmd_simulate(const RunConfig& config, double v_r, const std::vector<double>& x0, int cycles) {
    if (cycles < 1) throw ValidationError("simulate.cycles", "must be >= 1");
    const SwitchedModel model = build_model(config.params);
    Eigen::VectorXd x;
    if (x0.empty()) {
        x = default_initial_state(model, v_r, config.simulate.kick);
    } else {
        if (static_cast<int>(x0.size()) != model.n) {
            throw ValidationError("simulate.x0", "expected " + std::to_string(model.n) + " values");
        }
        x = Eigen::Map<const Eigen::VectorXd>(x0.data(), model.n);
    }

    SimulationOptions so;
    so.samples_per_cycle = config.solver.samples_per_cycle;
    so.output_points_per_cycle = config.simulate.output_points;
    const Trajectory traj = simulate_cycles(model, x, v_r, cycles, so);

    const int window = std::min(config.simulate.saturation_window, cycles);
    const bool dc = detect_dc_saturation(traj, window);
    const auto period = terminal_duty_period(traj, std::min(20, std::max(1, cycles / 2)), 4, 1e-4);

    std::ostringstream out;
    out << fmt::format("v_r = {}, {} cycles\n", s4(v_r), cycles);
    out << fmt::format("terminal duty       {}\n", s4(traj.cycle_duties.back()));
    if (period) {
        std::string pattern;
        for (int j = *period; j >= 1; --j) {
            pattern += (pattern.empty() ? "" : ", ") + s4(traj.cycle_duties[traj.cycle_duties.size() - j]);
        }
        out << fmt::format("duty pattern        period {} ({})\n", *period, pattern);
    } else {
        out << "duty pattern        not periodic (period <= 4)\n";
    }
    out << fmt::format("DC saturation       {}\n", dc ? "true" : "false");
    const Eigen::VectorXd& xf = traj.clock_states.back();
    out << "final state        ";
    for (Eigen::Index i = 0; i < xf.size(); ++i) out << fmt::format(" {} = {}", model.state_labels[i], s4(xf(i)));
    out << '\n';

    CommandResult res;
    const fs::path path = output_path(config, "trajectory");
    write_trajectory_csv(path, traj);
    res.report = out.str();
    res.files.push_back(path);
    return res;
}

CommandResult cmd_sweep(const RunConfig& config, unsigned jobs) {
    if (!config.sweep.from) throw ValidationError("sweep.from", "required");
    if (!config.sweep.to) throw ValidationError("sweep.to", "required");
    if (!(*config.sweep.from < *config.sweep.to)) throw ValidationError("sweep.to", "must exceed sweep.from");

    const SwitchedModel model = build_model(config.params);
    SweepOptions so;
    so.orbit = orbit_options(config);
    so.branch_jump = config.sweep.branch_jump;
    so.duty_curve_points = config.sweep.duty_curve_points;
    so.track_period_two = config.sweep.track_period_two;
    so.jobs = jobs;
    const BifurcationDiagram d = sweep(model, *config.sweep.from, *config.sweep.to, config.sweep.points, so);

    std::ostringstream out;
    out << fmt::format("sweep v_r in [{}, {}], {} points\n", s4(*config.sweep.from), s4(*config.sweep.to),
                       config.sweep.points);
    for (const Branch& b : d.branches) {
        int stable = 0;
        for (const auto& p : b.points) stable += p.orbit.is_stable();
        out << fmt::format("  branch {} ({}, period {}): {} points, v_r {} .. {}, {} stable\n", b.id, b.origin,
                           b.period_mult, b.points.size(), s4(b.points.front().v_r), s4(b.points.back().v_r), stable);
    }
    if (d.critical_points.empty()) out << "no critical points\n";
    for (const CriticalPoint& c : d.critical_points) {
        out << fmt::format("  {:<9} v_r = {}  D = {}\n", to_string(c.kind), s4(c.v_r), s4(c.duty));
    }

    export_diagram(d, config.output.dir, config.output.run_id);
    CommandResult res;
    res.report = out.str();
    res.files = {output_path(config, "branches"), output_path(config, "critical")};
    return res;
}

CommandResult cmd_poles(const RunConfig& config) {
    const ConverterParams& p = config.params;
    if (!std::holds_alternative<Pvmc>(p.scheme)) {
        throw ValidationError("scheme", "poles requires the pvmc scheme");
    }
    const PolesSettings& ps = config.poles;
    std::ostringstream csv, out;
    csv << "duty,v_r,c0,c1,pole1_re,pole1_im,pole2_re,pole2_im,classification\n";
    for (int i = 0; i < ps.points; ++i) {
        const double d = ps.d_from + (ps.d_to - ps.d_from) * i / (ps.points - 1);
        const averaged::AveragedPoint pt = averaged::averaged_point(p, d);
        csv << format_number(d) << ',' << format_number(averaged::vr_of_duty(p, d)) << ','
            << format_number(pt.coeffs->c0) << ',' << format_number(pt.coeffs->c1);
        for (const auto& s : *pt.poles) csv << ',' << format_number(s.real()) << ',' << format_number(s.imag());
        csv << ',' << averaged::to_string(*pt.classification) << '\n';
    }

    out << fmt::format("duty grid [{}, {}], {} points\n", s4(ps.d_from), s4(ps.d_to), ps.points);
    try {
        const double ds = averaged::snb_duty(p);
        if (ds >= ps.d_from && ds <= ps.d_to) {
            out << fmt::format("c0 changes sign at D = {}\n", s4(ds));
        } else {
            out << "c0 has no sign change in range\n";
        }
    } catch (const NoBifurcationError&) {
        out << "c0 > 0 on the whole range (no SNB)\n";
    }
    const auto dh = averaged::hopf_duty(p);
    if (dh && *dh >= ps.d_from && *dh <= ps.d_to) {
        out << fmt::format("c1 changes sign at D = {}\n", s4(*dh));
    } else {
        out << "c1 has no sign change in range\n";
    }

    CommandResult res;
    const fs::path path = output_path(config, "poles");
    write_text_file(path, csv.str());
    res.report = out.str();
    res.files.push_back(path);
    return res;
}

int exit_code_for(const std::exception& e) {
    if (dynamic_cast<const ParseError*>(&e)) return 2;
    if (dynamic_cast<const ValidationError*>(&e)) return 3;
    if (dynamic_cast<const ConvergenceError*>(&e)) return 4;
    if (dynamic_cast<const IoError*>(&e)) return 5;
    return 1;
}

}  // namespace boostfold::cli
