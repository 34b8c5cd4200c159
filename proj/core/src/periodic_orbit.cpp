#include "boostfold/periodic_orbit.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include "boostfold/csv.hpp"
#include "boostfold/errors.hpp"

namespace boostfold {

namespace {

constexpr double kAdmissibleDutyTol = 1e-6;

bool is_real(const std::complex<double>& z) { return std::abs(z.imag()) <= 1e-9 * std::max(1.0, std::abs(z)); }

// Residual of the augmented shooting problem, normalized:
//   g_j  = (y(x_sw,j) - V_h tau_j) / y_scale   for each cycle
//   r_x  = (x_k - x_0) / state_scale
Eigen::VectorXd shooting_residual(const CycleMap& map, double v_r, const Eigen::VectorXd& z, int k) {
    const SwitchedModel& m = map.model();
    const int n = m.n;
    const double T = m.T;
    const Eigen::Vector2d u = m.input(v_r);
    Eigen::VectorXd F(n + k);
    Eigen::VectorXd x = z.head(n);
    for (int j = 0; j < k; ++j) {
        const double tau = z(n + j);
        const Eigen::VectorXd xs = map.propagator(Stage::S1).advance(x, u, tau * T);
        F(j) = (m.control_output(xs, v_r) - m.ramp.V_h * tau) / m.y_scale;
        x = map.propagator(Stage::S2).advance(xs, u, (1.0 - tau) * T);
    }
    F.tail(n) = (x - z.head(n)).cwiseQuotient(m.state_scale);
    return F;
}

bool duties_in_open_interval(const Eigen::VectorXd& z, int n, int k) {
    for (int j = 0; j < k; ++j) {
        const double tau = z(n + j);
        if (!(tau > 0.0 && tau < 1.0)) return false;
    }
    return true;
}

bool grazes(const std::vector<double>& duties, double tol) {
    return std::any_of(duties.begin(), duties.end(), [tol](double d) { return d < tol || d > 1.0 - tol; });
}

void finish_stability(const CycleMap& map, Orbit& orbit, double grazing_tol) {
    if (grazes(orbit.duties, grazing_tol)) {
        orbit.stability.classification = OrbitClass::Degenerate;
        orbit.multipliers.clear();
        return;
    }
    orbit.monodromy = map_jacobian(map, orbit.v_r, orbit.x_star, orbit.period_mult);
    orbit.multipliers = sorted_eigenvalues(orbit.monodromy);
    orbit.stability = classify_stability(orbit.multipliers);
}

}  // namespace

const char* to_string(OrbitClass c) {
    switch (c) {
        case OrbitClass::Stable: return "stable";
        case OrbitClass::Unstable: return "unstable";
        case OrbitClass::SaturatedDc: return "saturated_dc";
        case OrbitClass::Degenerate: return "degenerate";
    }
    return "?";
}

const char* to_string(BifurcationTag t) {
    switch (t) {
        case BifurcationTag::None: return "none";
        case BifurcationTag::SnbProximal: return "snb_proximal";
        case BifurcationTag::PdbProximal: return "pdb_proximal";
        case BifurcationTag::NeimarkProximal: return "neimark_proximal";
    }
    return "?";
}

StabilityInfo classify_stability(const std::vector<std::complex<double>>& multipliers, double margin, double delta) {
    StabilityInfo info;
    bool all_inside = true;
    for (const auto& l : multipliers) {
        const double a = std::abs(l);
        if (a > 1.0) ++info.unstable_count;
        if (!(a < 1.0 - margin)) all_inside = false;
    }
    info.classification = all_inside ? OrbitClass::Stable : OrbitClass::Unstable;

    for (const auto& l : multipliers) {
        if (is_real(l) && std::abs(l.real() - 1.0) <= delta) {
            info.tag = BifurcationTag::SnbProximal;
            return info;
        }
    }
    for (const auto& l : multipliers) {
        if (is_real(l) && std::abs(l.real() + 1.0) <= delta) {
            info.tag = BifurcationTag::PdbProximal;
            return info;
        }
    }
    for (const auto& l : multipliers) {
        if (!is_real(l) && std::abs(std::abs(l) - 1.0) <= delta) {
            info.tag = BifurcationTag::NeimarkProximal;
            return info;
        }
    }
    return info;
}

double Orbit::max_abs_multiplier() const {
    double m = 0.0;
    for (const auto& l : multipliers) m = std::max(m, std::abs(l));
    return m;
}

Eigen::VectorXd stroboscopic_map(const CycleMap& map, double v_r, const Eigen::VectorXd& x) {
    return map.cycle(x, v_r).x_end;
}

Eigen::VectorXd stroboscopic_map(const SwitchedModel& model, double v_r, const Eigen::VectorXd& x) {
    return stroboscopic_map(CycleMap(model), v_r, x);
}

Eigen::VectorXd iterate_map(const CycleMap& map, double v_r, const Eigen::VectorXd& x, int k,
                            std::vector<double>* duties) {
    Eigen::VectorXd y = x;
    for (int j = 0; j < k; ++j) {
        const CycleOutcome c = map.cycle(y, v_r);
        if (duties) duties->push_back(c.duty);
        y = c.x_end;
    }
    return y;
}

DutyOrbit periodic_state_at_duty(const CycleMap& map, double duty) {
    if (!(duty > 0.0 && duty < 1.0)) throw DomainError("periodic_state_at_duty: duty must lie in (0, 1)");
    const SwitchedModel& m = map.model();
    const int n = m.n;
    const Transition t1 = map.propagator(Stage::S1).transition(duty * m.T);
    const Transition t2 = map.propagator(Stage::S2).transition((1.0 - duty) * m.T);
    const Eigen::MatrixXd M = t2.Phi * t1.Gamma + t2.Gamma;
    const double v_s = m.params.v_s;

    Eigen::MatrixXd K = Eigen::MatrixXd::Zero(n + 1, n + 1);
    Eigen::VectorXd rhs(n + 1);
    K.topLeftCorner(n, n) = Eigen::MatrixXd::Identity(n, n) - t2.Phi * t1.Phi;
    K.topRightCorner(n, 1) = -M.col(1);
    rhs.head(n) = M.col(0) * v_s;

    const Eigen::RowVectorXd CG = m.C_row * t1.Gamma;
    K.bottomLeftCorner(1, n) = m.C_row * t1.Phi;
    K(n, n) = CG(1) + m.D_row(1);
    rhs(n) = m.ramp.V_h * duty - (CG(0) + m.D_row(0)) * v_s;

    const Eigen::FullPivLU<Eigen::MatrixXd> lu(K);
    if (!lu.isInvertible()) throw DomainError("periodic_state_at_duty: singular system");
    const Eigen::VectorXd sol = lu.solve(rhs);
    return DutyOrbit{sol.head(n), sol(n)};
}

Orbit find_periodic_orbit(const CycleMap& map, double v_r, const OrbitSeed& seed, int period_mult,
                          const OrbitOptions& options) {
    const SwitchedModel& m = map.model();
    const int n = m.n;
    const int k = period_mult;
    if (k < 1) throw DomainError("find_periodic_orbit: period_mult must be >= 1");
    if (seed.x.size() != n || !seed.x.allFinite()) throw DomainError("find_periodic_orbit: seed state must be finite");

    Orbit orbit;
    orbit.period_mult = k;
    orbit.v_r = v_r;

    std::vector<double> tau0 = seed.duties;
    if (tau0.empty()) {
        std::vector<double> d;
        iterate_map(map, v_r, seed.x, k, &d);
        if (std::all_of(d.begin(), d.end(), [](double v) { return v >= 1.0; })) {
            if (auto dc = dc_orbit(map, v_r)) return *dc;
        }
        tau0 = d;
    }
    if (static_cast<int>(tau0.size()) != k) throw DomainError("find_periodic_orbit: need one duty per cycle");

    Eigen::VectorXd z(n + k);
    z.head(n) = seed.x;
    for (int j = 0; j < k; ++j) z(n + j) = std::clamp(tau0[j], 0.01, 0.99);

    Eigen::VectorXd F = shooting_residual(map, v_r, z, k);
    double fnorm = F.norm();
    orbit.residual_history.push_back(fnorm);

    Eigen::VectorXd steps(n + k);
    steps.head(n) = m.state_scale * options.newton_fd_step;
    steps.tail(k).setConstant(options.newton_fd_step);

    int it = 0;
    while (fnorm > options.newton_tol && it < options.max_iterations) {
        ++it;
        Eigen::MatrixXd J(n + k, n + k);
        for (int j = 0; j < n + k; ++j) {
            Eigen::VectorXd zp = z, zm = z;
            zp(j) += steps(j);
            zm(j) -= steps(j);
            J.col(j) = (shooting_residual(map, v_r, zp, k) - shooting_residual(map, v_r, zm, k)) / (2.0 * steps(j));
        }
        const Eigen::PartialPivLU<Eigen::MatrixXd> lu(J);
        const Eigen::VectorXd dz = -lu.solve(F);
        if (!dz.allFinite()) {
            orbit.failure = "singular Newton Jacobian";
            break;
        }

        double lambda = 1.0;
        Eigen::VectorXd z_try = z + dz;
        Eigen::VectorXd F_try;
        bool accepted = false;
        for (int h = 0; h <= options.max_halvings; ++h) {
            z_try = z + lambda * dz;
            if (duties_in_open_interval(z_try, n, k)) {
                F_try = shooting_residual(map, v_r, z_try, k);
                if (F_try.norm() < fnorm) {
                    accepted = true;
                    break;
                }
            }
            lambda *= 0.5;
        }
        if (!accepted) {
            if (!duties_in_open_interval(z_try, n, k)) {
                orbit.failure = "switching fraction left (0, 1)";
                break;
            }
            F_try = shooting_residual(map, v_r, z_try, k);
        }
        z = z_try;
        F = F_try;
        fnorm = F.norm();
        orbit.residual_history.push_back(fnorm);
    }
    orbit.iterations = it;
    orbit.x_star = z.head(n);
    orbit.duties.assign(z.data() + n, z.data() + n + k);

    if (fnorm > options.newton_tol || !z.allFinite()) {
        if (orbit.failure.empty()) orbit.failure = "no convergence";
        orbit.residual = fnorm;
        orbit.stability.classification = OrbitClass::Degenerate;
        return orbit;
    }

    std::vector<double> actual;
    const Eigen::VectorXd xk = iterate_map(map, v_r, orbit.x_star, k, &actual);
    orbit.residual = m.normalized_norm(xk - orbit.x_star);
    for (int j = 0; j < k; ++j) {
        if (std::abs(actual[j] - orbit.duties[j]) > kAdmissibleDutyTol) {
            orbit.failure = "not admissible: comparator trips at a different instant";
            orbit.stability.classification = OrbitClass::Degenerate;
            return orbit;
        }
    }
    orbit.converged = true;
    finish_stability(map, orbit, options.grazing_tol);
    return orbit;
}

Orbit find_periodic_orbit(const SwitchedModel& model, double v_r, const Eigen::VectorXd& x_guess, int period_mult,
                          const OrbitOptions& options) {
    const CycleMap map(model, options.samples_per_cycle);
    return find_periodic_orbit(map, v_r, OrbitSeed{x_guess, {}}, period_mult, options);
}

Eigen::MatrixXd map_jacobian(const CycleMap& map, double v_r, const Eigen::VectorXd& x, int k, double step_scale) {
    const Eigen::Index n = x.size();
    const double h = step_scale * std::max(1e-6, 1e-6 * x.norm());
    Eigen::MatrixXd J(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        Eigen::VectorXd xp = x, xm = x;
        xp(j) += h;
        xm(j) -= h;
        J.col(j) = (iterate_map(map, v_r, xp, k) - iterate_map(map, v_r, xm, k)) / (2.0 * h);
    }
    return J;
}

std::vector<std::complex<double>> sorted_eigenvalues(const Eigen::MatrixXd& M) {
    const Eigen::EigenSolver<Eigen::MatrixXd> es(M, false);
    const Eigen::VectorXcd ev = es.eigenvalues();
    std::vector<std::complex<double>> out(ev.data(), ev.data() + ev.size());
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
        const double ma = std::abs(a), mb = std::abs(b);
        if (ma != mb) return ma > mb;
        if (a.real() != b.real()) return a.real() > b.real();
        return a.imag() > b.imag();
    });
    return out;
}

std::vector<std::complex<double>> floquet_multipliers(const CycleMap& map, const Orbit& orbit, double step_scale,
                                                      double grazing_tol) {
    if (grazes(orbit.duties, grazing_tol)) {
        throw GrazingError("switching instant within grazing tolerance of a clock edge");
    }
    return sorted_eigenvalues(map_jacobian(map, orbit.v_r, orbit.x_star, orbit.period_mult, step_scale));
}

std::vector<std::complex<double>> floquet_multipliers(const SwitchedModel& model, const Orbit& orbit,
                                                      double step_scale) {
    return floquet_multipliers(CycleMap(model), orbit, step_scale);
}

std::optional<Orbit> dc_orbit(const CycleMap& map, double v_r) {
    const SwitchedModel& m = map.model();
    const auto x = dc_fixed_point(m, v_r);
    if (!x || !predicts_dc_saturation(m, v_r)) return std::nullopt;
    Orbit o;
    o.v_r = v_r;
    o.x_star = *x;
    o.duties = {1.0};
    o.monodromy = map.propagator(Stage::S1).transition(m.T).Phi;
    o.multipliers = sorted_eigenvalues(o.monodromy);
    o.residual = m.normalized_norm(stroboscopic_map(map, v_r, *x) - *x);
    o.stability = classify_stability(o.multipliers);
    o.stability.classification = OrbitClass::SaturatedDc;
    o.converged = true;
    return o;
}

Orbit orbit_at_duty(const CycleMap& map, double duty, const OrbitOptions& options) {
    const DutyOrbit d = periodic_state_at_duty(map, duty);
    Orbit o;
    o.v_r = d.v_r;
    o.x_star = d.x;
    o.duties = {duty};
    const CycleOutcome c = map.cycle(d.x, d.v_r);
    o.residual = map.model().normalized_norm(c.x_end - d.x);
    if (std::abs(c.duty - duty) > kAdmissibleDutyTol) {
        o.failure = "not admissible: comparator trips at a different instant";
        o.stability.classification = OrbitClass::Degenerate;
        return o;
    }
    o.converged = true;
    finish_stability(map, o, options.grazing_tol);
    return o;
}

void write_orbits_csv(std::ostream& os, const std::vector<Orbit>& orbits, const std::vector<std::string>& labels) {
    os << "period,v_r,classification,unstable_count,tag,residual";
    for (const auto& l : labels) os << ',' << l;
    os << ",duties";
    for (std::size_t i = 1; i <= labels.size(); ++i) os << ",lambda" << i << "_re,lambda" << i << "_im";
    os << '\n';
    for (const auto& o : orbits) {
        os << o.period_mult << ',' << format_number(o.v_r) << ',' << to_string(o.stability.classification) << ','
           << o.stability.unstable_count << ',' << to_string(o.stability.tag) << ',' << format_number(o.residual);
        for (Eigen::Index i = 0; i < o.x_star.size(); ++i) os << ',' << format_number(o.x_star(i));
        os << ',';
        for (std::size_t j = 0; j < o.duties.size(); ++j) os << (j ? ";" : "") << format_number(o.duties[j]);
        for (std::size_t i = 0; i < labels.size(); ++i) {
            if (i < o.multipliers.size()) {
                os << ',' << format_number(o.multipliers[i].real()) << ',' << format_number(o.multipliers[i].imag());
            } else {
                os << ",,";
            }
        }
        os << '\n';
    }
}

void write_orbits_csv(const std::filesystem::path& path, const std::vector<Orbit>& orbits,
                      const std::vector<std::string>& labels) {
    std::ostringstream os;
    write_orbits_csv(os, orbits, labels);
    write_text_file(path, os.str());
}

}  // namespace boostfold
