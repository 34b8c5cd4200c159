#include "boostfold/averaged.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include <Eigen/LU>

#include "boostfold/errors.hpp"

namespace boostfold::averaged {

namespace {

constexpr int kDutyGridPoints = 2000;
constexpr double kDutyGridMax = 0.999;
constexpr double kDutyTol = 1e-12;

const Pvmc& require_pvmc(const ConverterParams& p, const char* op) {
    const auto* s = std::get_if<Pvmc>(&p.scheme);
    if (!s) throw DomainError(std::string(op) + " requires the pvmc scheme");
    return *s;
}

void require_duty(double duty, bool allow_one = false) {
    if (!(duty >= 0.0) || duty > 1.0 || (!allow_one && duty == 1.0)) {
        throw DomainError("duty ratio out of range: " + std::to_string(duty));
    }
}

double denominator(const ConverterParams& p, double duty) {
    const double u = 1.0 - duty;
    return p.eta() + u * u;
}

// Maximizer of f on [lo, hi] by golden-section search, assuming unimodality there.
double golden_max(const std::function<double(double)>& f, double lo, double hi, double tol) {
    const double g = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = lo;
    double b = hi;
    double c = b - g * (b - a);
    double d = a + g * (b - a);
    double fc = f(c);
    double fd = f(d);
    while (b - a > tol) {
        if (fc > fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    return 0.5 * (a + b);
}

}  // namespace

AveragedSystem averaged_system(const ConverterParams& p, double duty) {
    const double D = duty;
    Eigen::Matrix2d A1, A2, B;
    A1 << -p.r / p.L, 0.0, 0.0, -1.0 / (p.R * p.C);
    A2 << -p.r / p.L, -1.0 / p.L, 1.0 / p.C, -1.0 / (p.R * p.C);
    B << 1.0 / p.L, 0.0, 0.0, 0.0;
    return AveragedSystem{D * A1 + (1.0 - D) * A2, B};
}

SteadyState steady_state(const ConverterParams& p, double duty) {
    require_duty(duty, true);
    const double den = denominator(p, duty);
    if (!(den > 0.0)) throw DomainError("steady_state: degenerate at D = 1 with r = 0");
    return SteadyState{p.v_s / (p.R * den), p.v_s * (1.0 - duty) / den};
}

double peak_current(const ConverterParams& p, double duty) {
    const SteadyState x = steady_state(p, duty);
    const double ripple = (p.v_s - p.r * x.i_L) * duty * p.period() / p.L;
    return x.i_L + 0.5 * ripple;
}

double vr_of_duty(const ConverterParams& p, double duty) {
    require_duty(duty);
    const SteadyState x = steady_state(p, duty);
    if (const auto* s = std::get_if<Pvmc>(&p.scheme)) {
        return duty * p.V_h / s->k_p + x.v_C;
    }
    if (std::holds_alternative<VmcType3>(p.scheme)) {
        return x.v_C;
    }
    if (const auto* s = std::get_if<CmcClosedLoop>(&p.scheme)) {
        return (peak_current(p, duty) + p.V_h * duty) / s->k_p + x.v_C;
    }
    throw DomainError("vr_of_duty: open-loop current mode has no voltage reference");
}

std::vector<double> duty_solutions(const ConverterParams& p, double v_r) {
    auto f = [&](double d) { return vr_of_duty(p, d) - v_r; };

    std::vector<double> roots;
    double d_prev = 0.0;
    double f_prev = f(d_prev);
    if (f_prev == 0.0 && d_prev > 0.0) roots.push_back(d_prev);
    for (int i = 1; i <= kDutyGridPoints; ++i) {
        const double d = kDutyGridMax * i / kDutyGridPoints;
        const double fd = f(d);
        if (fd == 0.0) {
            roots.push_back(d);
        } else if (f_prev != 0.0 && (f_prev < 0.0) != (fd < 0.0)) {
            double a = d_prev;
            double b = d;
            double fa = f_prev;
            while (b - a > kDutyTol) {
                const double m = 0.5 * (a + b);
                const double fm = f(m);
                if (fm == 0.0) {
                    a = b = m;
                    break;
                }
                if ((fm < 0.0) == (fa < 0.0)) {
                    a = m;
                    fa = fm;
                } else {
                    b = m;
                }
            }
            roots.push_back(0.5 * (a + b));
        }
        d_prev = d;
        f_prev = fd;
    }
    std::sort(roots.begin(), roots.end());
    return roots;
}

Coefficients characteristic_coeffs(const ConverterParams& p, double duty) {
    require_pvmc(p, "characteristic_coeffs");
    require_duty(duty);
    const double kappa = *p.kappa();
    const double eta = p.eta();
    const double u2 = (1.0 - duty) * (1.0 - duty);
    const double i_L = steady_state(p, duty).i_L;
    Coefficients c;
    c.c1 = p.r / p.L + 1.0 / (p.R * p.C) - kappa * i_L / p.C;
    c.c0 = (eta + u2 + kappa * p.R * i_L * (u2 - eta)) / (p.L * p.C);
    return c;
}

const char* to_string(PoleClass c) {
    switch (c) {
        case PoleClass::Stable: return "stable";
        case PoleClass::TwoUnstable: return "two_unstable";
        case PoleClass::OneUnstable: return "one_unstable";
        case PoleClass::Critical: return "critical";
    }
    return "unknown";
}

PoleClass classify(const Coefficients& c) {
    if (c.c0 < 0.0) return PoleClass::OneUnstable;
    if (c.c0 == 0.0 || c.c1 == 0.0) return PoleClass::Critical;
    return c.c1 > 0.0 ? PoleClass::Stable : PoleClass::TwoUnstable;
}

std::array<std::complex<double>, 2> quadratic_roots(const Coefficients& c) {
    const double disc = c.c1 * c.c1 - 4.0 * c.c0;
    if (disc < 0.0) {
        const double re = -0.5 * c.c1;
        const double im = 0.5 * std::sqrt(-disc);
        return {std::complex<double>(re, im), std::complex<double>(re, -im)};
    }
    // Avoid cancellation: q = -(c1 + sign(c1) sqrt(disc))/2, roots q and c0/q.
    const double sq = std::sqrt(disc);
    const double q = -0.5 * (c.c1 + std::copysign(sq, c.c1));
    double r1 = q;
    double r2 = q != 0.0 ? c.c0 / q : 0.0;
    if (r2 > r1) std::swap(r1, r2);
    return {std::complex<double>(r1, 0.0), std::complex<double>(r2, 0.0)};
}

std::array<std::complex<double>, 2> averaged_poles(const ConverterParams& p, double duty) {
    return quadratic_roots(characteristic_coeffs(p, duty));
}

AveragedPoint averaged_point(const ConverterParams& p, double duty) {
    const SteadyState x = steady_state(p, duty);
    AveragedPoint pt;
    pt.duty = duty;
    pt.i_L = x.i_L;
    pt.v_C = x.v_C;
    if (std::holds_alternative<Pvmc>(p.scheme) && duty < 1.0) {
        pt.coeffs = characteristic_coeffs(p, duty);
        pt.poles = quadratic_roots(*pt.coeffs);
        pt.classification = classify(*pt.coeffs);
    }
    return pt;
}

double snb_duty_large_gain(const ConverterParams& p) {
    if (!(p.r > 0.0)) throw NoBifurcationError("no saddle-node bifurcation when r = 0");
    return 1.0 - std::sqrt(p.eta());
}

double snb_duty(const ConverterParams& p) {
    if (!(p.r > 0.0)) throw NoBifurcationError("no saddle-node bifurcation when r = 0");
    if (std::holds_alternative<CmcOpenLoop>(p.scheme)) {
        throw NoBifurcationError("open-loop current mode: peak current is monotone in D, no saddle-node");
    }
    if (std::holds_alternative<VmcType3>(p.scheme)) {
        return snb_duty_large_gain(p);
    }
    if (std::holds_alternative<CmcClosedLoop>(p.scheme)) {
        auto f = [&](double d) { return vr_of_duty(p, d); };
        int best = 0;
        double best_v = -std::numeric_limits<double>::infinity();
        for (int i = 0; i <= kDutyGridPoints; ++i) {
            const double v = f(kDutyGridMax * i / kDutyGridPoints);
            if (v > best_v) {
                best_v = v;
                best = i;
            }
        }
        const double lo = kDutyGridMax * std::max(best - 1, 0) / kDutyGridPoints;
        const double hi = kDutyGridMax * std::min(best + 1, kDutyGridPoints) / kDutyGridPoints;
        return golden_max(f, lo, hi, 1e-10);
    }

    // PVMC: c0 = 0 <=> w^2 + (2 eta + kappa v_s) w + eta^2 - kappa v_s eta = 0 with w = (1-D)^2.
    const double eta = p.eta();
    const double kv = *p.kappa() * p.v_s;
    const double half_b = eta + 0.5 * kv;
    const double root_disc = std::sqrt(kv * (2.0 * eta + 0.25 * kv));
    const double w = (kv * eta - eta * eta) / (half_b + root_disc);
    if (!(w > 0.0) || !(w < 1.0)) {
        throw NoBifurcationError("c0 has no zero for D in (0, 1)");
    }
    return 1.0 - std::sqrt(w);
}

double snb_reference(const ConverterParams& p) {
    if (std::holds_alternative<Pvmc>(p.scheme)) {
        snb_duty(p);  // domain checks
        const double se = std::sqrt(p.eta());
        return p.v_s / (2.0 * se) + (1.0 - se) / *p.kappa();
    }
    if (std::holds_alternative<VmcType3>(p.scheme)) {
        snb_duty(p);
        return p.v_s / (2.0 * std::sqrt(p.eta()));
    }
    return vr_of_duty(p, snb_duty(p));
}

double hopf_exclusion_threshold(const ConverterParams& p) {
    return (1.0 + p.eta()) * (p.r * p.R * p.C / p.L + 1.0) / p.v_s;
}

std::optional<double> hopf_duty(const ConverterParams& p) {
    require_pvmc(p, "hopf_duty");
    const double radicand = *p.kappa() * p.v_s / (p.r * p.R * p.C / p.L + 1.0) - p.eta();
    if (!(radicand > 0.0) || radicand > 1.0) return std::nullopt;
    return 1.0 - std::sqrt(radicand);
}

HopfOrdering hopf_precedes_snb(const ConverterParams& p) {
    require_pvmc(p, "hopf_precedes_snb");
    HopfOrdering h;
    h.threshold = 2.0 * p.eta() * (p.r * p.R * p.C / p.L + 1.0) / p.v_s;
    h.sufficient_condition = p.r > 0.0 && *p.kappa() > h.threshold;
    if (!(p.r > 0.0)) return h;
    const auto d_h = hopf_duty(p);
    double d_s = 0.0;
    try {
        d_s = snb_duty(p);
    } catch (const NoBifurcationError&) {
        return h;
    }
    h.precedes = d_h.has_value() && *d_h < d_s;
    return h;
}

CriticalModeCheck critical_mode_check(const ConverterParams& p, double duty) {
    if (!(duty > 0.0) || !(duty < 1.0)) throw DomainError("critical_mode_check: duty must lie in (0, 1)");
    const double T = p.period();
    const double u = 1.0 - duty;
    CriticalModeCheck c;
    c.K = 2.0 * p.L / (p.R * T);
    c.K_crit = duty * u * u;
    c.K_star = p.r > 0.0 ? 2.0 * p.L / (p.r * T) * u * u : std::numeric_limits<double>::infinity();
    c.snb_excluded = c.K_star > c.K_crit;
    return c;
}

std::complex<double> control_to_output_tf(const ConverterParams& p, double duty, std::complex<double> s) {
    using cd = std::complex<double>;
    require_duty(duty);
    const AveragedSystem sys = averaged_system(p, duty);
    const AveragedSystem s1 = averaged_system(p, 1.0);
    const AveragedSystem s2 = averaged_system(p, 0.0);
    const SteadyState x = steady_state(p, duty);
    const Eigen::Vector2d X(x.i_L, x.v_C);
    const Eigen::Vector2d f = (s1.A - s2.A) * X;

    const Eigen::Matrix2cd M = s * Eigen::Matrix2cd::Identity() - sys.A.cast<cd>();
    const cd det = M.determinant();
    const double scale = std::max({std::norm(s), sys.A.squaredNorm(), 1.0});
    if (std::abs(det) <= 1e-13 * scale) {
        throw SingularResolventError("control_to_output_tf: s is a pole of the averaged system");
    }
    const Eigen::Vector2cd v = M.partialPivLu().solve(f.cast<cd>());
    return v(1);
}

SteadyState dc_solution(const ConverterParams& p) {
    if (!(p.r > 0.0)) throw DomainError("dc_solution: requires r > 0 (i_L = v_s/r would be infinite)");
    return SteadyState{p.v_s / p.r, 0.0};
}

CriticalReport critical_report(const ConverterParams& p) {
    p.validate();
    CriticalReport rep;
    rep.eta = p.eta();
    rep.kappa = p.kappa();
    try {
        rep.D_S = snb_duty(p);
        rep.v_r_star = snb_reference(p);
        rep.v_r_at_snb_duty = vr_of_duty(p, *rep.D_S);
        rep.critical_mode = critical_mode_check(p, *rep.D_S);
    } catch (const NoBifurcationError&) {
    }
    if (std::holds_alternative<Pvmc>(p.scheme)) {
        rep.D_H = hopf_duty(p);
        if (rep.D_H) rep.v_r_hopf = vr_of_duty(p, *rep.D_H);
        rep.hopf_exclusion_threshold = hopf_exclusion_threshold(p);
        rep.ordering = hopf_precedes_snb(p);
    }
    if (p.r > 0.0) rep.dc = dc_solution(p);
    return rep;
}

}  // namespace boostfold::averaged
