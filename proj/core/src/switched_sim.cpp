#include "boostfold/switched_sim.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "boostfold/averaged.hpp"
#include "boostfold/csv.hpp"
#include "boostfold/errors.hpp"

namespace boostfold {

namespace {
constexpr int kMaxRefineIterations = 200;
constexpr double kTimeTol = 1e-15;
}  // namespace

CycleMap::CycleMap(SwitchedModel model, int samples_per_cycle)
    : model_(std::move(model)),
      samples_(samples_per_cycle),
      s1_(model_.A1, model_.B1),
      s2_(model_.A2, model_.B2) {
    if (samples_ < 1) throw DomainError("samples_per_cycle must be >= 1");
    sample_step_ = s1_.transition(model_.T / samples_);
    full_s1_ = s1_.transition(model_.T);
    full_s2_ = s2_.transition(model_.T);
}

double CycleMap::comparator(const Eigen::VectorXd& x, double v_r, double t) const {
    return model_.control_output(x, v_r) - model_.ramp.within_cycle(t);
}

std::optional<CycleMap::Crossing> CycleMap::find_crossing(const Eigen::VectorXd& x_start, const Eigen::Vector2d& u,
                                                           double v_r) const {
    const double T = model_.T;
    const double dt = T / samples_;

    Eigen::VectorXd xa = x_start;
    double ta = 0.0;
    for (int k = 1; k <= samples_; ++k) {
        const double tb = k == samples_ ? T : k * dt;
        const Eigen::VectorXd xb = sample_step_.apply(xa, u);
        const double gb = comparator(xb, v_r, tb);
        if (gb <= 0.0) {
            // Safeguarded Newton on g(t) = y(t) - h(t) inside [ta, tb], g(ta) > 0 >= g(tb).
            double lo = ta;
            double hi = tb;
            double t = 0.5 * (lo + hi);
            Eigen::VectorXd xt;
            for (int it = 0; it < kMaxRefineIterations; ++it) {
                xt = s1_.advance(xa, u, t - ta);
                const double g = comparator(xt, v_r, t);
                if (g == 0.0) break;
                if (g > 0.0) {
                    lo = t;
                } else {
                    hi = t;
                }
                const Eigen::VectorXd dx = model_.A1 * xt + model_.B1 * u;
                const double dg = model_.C_row.dot(dx) - model_.ramp.slope();
                double next = dg != 0.0 ? t - g / dg : 0.5 * (lo + hi);
                if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
                const bool done = std::abs(next - t) <= kTimeTol * T || hi - lo <= kTimeTol * T;
                t = next;
                if (done) {
                    xt = s1_.advance(xa, u, t - ta);
                    break;
                }
            }
            return Crossing{t, xt};
        }
        xa = xb;
        ta = tb;
    }
    return std::nullopt;
}

std::optional<double> CycleMap::switching_instant(const Eigen::VectorXd& x_start, double v_r) const {
    if (comparator(x_start, v_r, 0.0) <= 0.0) return 0.0;
    const auto c = find_crossing(x_start, model_.input(v_r), v_r);
    if (!c) return std::nullopt;
    return c->t;
}

CycleOutcome CycleMap::cycle(const Eigen::VectorXd& x, double v_r) const {
    const Eigen::Vector2d u = model_.input(v_r);
    CycleOutcome out;
    if (comparator(x, v_r, 0.0) <= 0.0) {
        out.saturated_low = true;
        out.duty = 0.0;
        out.t_switch = 0.0;
        out.x_switch = x;
        out.x_end = full_s2_.apply(x, u);
        return out;
    }
    const auto c = find_crossing(x, u, v_r);
    if (!c) {
        out.saturated_high = true;
        out.duty = 1.0;
        out.t_switch = model_.T;
        out.x_end = full_s1_.apply(x, u);
        out.x_switch = out.x_end;
        return out;
    }
    out.t_switch = c->t;
    out.duty = c->t / model_.T;
    out.x_switch = c->x;
    out.x_end = s2_.advance(c->x, u, model_.T - c->t);
    return out;
}

Eigen::VectorXd CycleMap::advance(Stage stage, const Eigen::VectorXd& x, double v_r, double dt) const {
    return propagator(stage).advance(x, model_.input(v_r), dt);
}

std::optional<double> switching_instant(const SwitchedModel& model, const Eigen::VectorXd& x_start, double v_r) {
    return CycleMap(model).switching_instant(x_start, v_r);
}

Trajectory simulate_cycles(const SwitchedModel& model, const Eigen::VectorXd& x0, double v_r, int n_cycles,
                           const SimulationOptions& options) {
    if (n_cycles < 1) throw DomainError("simulate_cycles: n_cycles must be >= 1");
    if (x0.size() != model.n) throw DomainError("simulate_cycles: initial state has wrong dimension");

    const CycleMap map(model, options.samples_per_cycle);
    const double T = model.T;
    const int extra = options.output_points_per_cycle;

    Trajectory traj;
    traj.state_labels = model.state_labels;
    if (model.params.r > 0.0) traj.dc_target = Eigen::Vector2d(model.params.v_s / model.params.r, 0.0);
    traj.cycle_duties.reserve(n_cycles);
    traj.clock_states.reserve(n_cycles + 1);

    auto record = [&](double t_abs, double t_local, const Eigen::VectorXd& x, Stage stage, int k, double duty) {
        traj.samples.push_back(
            TrajectorySample{t_abs, x, model.control_output(x, v_r), model.ramp.within_cycle(t_local), stage, k, duty});
    };

    Eigen::VectorXd x = x0;
    for (int k = 0; k < n_cycles; ++k) {
        const double t0 = k * T;
        traj.clock_states.push_back(x);
        const CycleOutcome c = map.cycle(x, v_r);
        traj.cycle_duties.push_back(c.duty);
        traj.saturated_high.push_back(c.saturated_high);
        traj.saturated_low.push_back(c.saturated_low);

        record(t0, 0.0, x, c.saturated_low ? Stage::S2 : Stage::S1, k, c.duty);
        bool switch_recorded = c.saturated_low || c.saturated_high;
        for (int j = 1; j < extra; ++j) {
            const double tl = T * j / extra;
            if (!switch_recorded && tl >= c.t_switch) {
                if (tl > c.t_switch) record(t0 + c.t_switch, c.t_switch, c.x_switch, Stage::S2, k, c.duty);
                switch_recorded = true;
            }
            if (tl < c.t_switch || c.saturated_high) {
                record(t0 + tl, tl, map.advance(Stage::S1, x, v_r, tl), Stage::S1, k, c.duty);
            } else {
                record(t0 + tl, tl, map.advance(Stage::S2, c.x_switch, v_r, tl - c.t_switch), Stage::S2, k, c.duty);
            }
        }
        if (!switch_recorded) record(t0 + c.t_switch, c.t_switch, c.x_switch, Stage::S2, k, c.duty);
        x = c.x_end;
    }
    traj.clock_states.push_back(x);
    record(n_cycles * T, 0.0, x, Stage::S1, n_cycles, std::numeric_limits<double>::quiet_NaN());
    return traj;
}

bool detect_dc_saturation(const Trajectory& traj, int window) {
    const int n = static_cast<int>(traj.cycle_duties.size());
    if (window < 1 || window > n) throw DomainError("detect_dc_saturation: window must lie in [1, cycle count]");
    if (!traj.dc_target) return false;
    for (int k = n - window; k < n; ++k) {
        if (!traj.saturated_high[k]) return false;
    }
    auto dist = [&](int k) { return (traj.clock_states[k].head<2>() - *traj.dc_target).norm(); };
    double prev = dist(n - window);
    for (int k = n - window + 1; k <= n; ++k) {
        const double d = dist(k);
        if (d > prev) return false;
        prev = d;
    }
    return true;
}

std::optional<int> terminal_duty_period(const Trajectory& traj, int window, int max_period, double tol) {
    const auto& d = traj.cycle_duties;
    const int n = static_cast<int>(d.size());
    if (n < window + max_period) return std::nullopt;
    for (int p = 1; p <= max_period; ++p) {
        bool ok = true;
        for (int k = n - window; k < n && ok; ++k) ok = std::abs(d[k] - d[k - p]) <= tol;
        if (ok) return p;
    }
    return std::nullopt;
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj) {
    os << "t";
    for (const auto& l : traj.state_labels) os << ',' << l;
    os << ",y,h,stage,cycle_index,duty\n";
    for (const auto& s : traj.samples) {
        os << format_number(s.t);
        for (Eigen::Index i = 0; i < s.x.size(); ++i) os << ',' << format_number(s.x(i));
        os << ',' << format_number(s.y) << ',' << format_number(s.h) << ',' << static_cast<int>(s.stage) << ','
           << s.cycle << ',' << format_number(s.duty) << '\n';
    }
}

void write_trajectory_csv(const std::filesystem::path& path, const Trajectory& traj) {
    std::ostringstream os;
    write_trajectory_csv(os, traj);
    write_text_file(path, os.str());
}

Eigen::VectorXd default_initial_state(const SwitchedModel& model, double v_r, double kick) {
    const auto& p = model.params;
    std::vector<double> duties;
    if (!std::holds_alternative<CmcOpenLoop>(p.scheme)) duties = averaged::duty_solutions(p, v_r);
    if (duties.empty()) return Eigen::VectorXd::Zero(model.n);
    const double d = duties.front();
    const auto ss = averaged::steady_state(p, d);
    return compose_state(model, ss.i_L, ss.v_C, d, v_r) * (1.0 + kick);
}

}  // namespace boostfold
