#pragma once

// State-space-averaged analysis of the boost converter:
//
//   A = D A1 + (1 - D) A2,  B = D B1 + (1 - D) B2,  X = -A^{-1} B u
//
// The averaged quantities ignore the capacitor ESR.

#include <array>
#include <complex>
#include <optional>
#include <vector>

#include <Eigen/Core>

#include "boostfold/converter.hpp"

namespace boostfold::averaged {

struct SteadyState {
    double i_L = 0.0;
    double v_C = 0.0;
};

struct AveragedSystem {
    Eigen::Matrix2d A;
    Eigen::Matrix2d B;
};

/// Averaged power-stage matrices at duty D (ESR dropped).
AveragedSystem averaged_system(const ConverterParams& params, double duty);

/// I_L = v_s / (R (eta + (1-D)^2)), V_C = v_s (1-D) / (eta + (1-D)^2).
SteadyState steady_state(const ConverterParams& params, double duty);

/// Peak inductor current I_L + dI_L/2 with ripple dI_L = (v_s - r I_L) D T / L.
double peak_current(const ConverterParams& params, double duty);

/// Reference that holds duty D in steady state:
///   PVMC:        D/kappa + V_C(D)
///   type-III:    V_C(D)            (integrator forces v_o = v_r)
///   CMC closed:  (I_peak(D) + V_h D)/k_p + V_C(D)
/// Throws DomainError for open-loop CMC, whose reference is a current.
double vr_of_duty(const ConverterParams& params, double duty);

/// All duties in (0, 1) with vr_of_duty(D) = v_r, ascending.
std::vector<double> duty_solutions(const ConverterParams& params, double v_r);

struct Coefficients {
    double c1 = 0.0;
    double c0 = 0.0;
};

/// Coefficients of s^2 + c1 s + c0 for the PVMC loop.
Coefficients characteristic_coeffs(const ConverterParams& params, double duty);

enum class PoleClass {
    Stable,        ///< c1 > 0, c0 > 0
    TwoUnstable,   ///< c1 < 0, c0 > 0
    OneUnstable,   ///< c0 < 0
    Critical,      ///< on a boundary (c0 = 0, or c1 = 0 with c0 > 0)
};

const char* to_string(PoleClass c);

/// Routh-Hurwitz classification from the coefficients alone.
PoleClass classify(const Coefficients& c);

/// Exact roots of s^2 + c1 s + c0, larger real part first.
std::array<std::complex<double>, 2> quadratic_roots(const Coefficients& c);

std::array<std::complex<double>, 2> averaged_poles(const ConverterParams& params, double duty);

struct AveragedPoint {
    double duty = 0.0;
    double i_L = 0.0;
    double v_C = 0.0;
    std::optional<Coefficients> coeffs;  ///< PVMC only
    std::optional<std::array<std::complex<double>, 2>> poles;
    std::optional<PoleClass> classification;
};

AveragedPoint averaged_point(const ConverterParams& params, double duty);

/// Saddle-node duty. PVMC: exact zero of c0(D); type-III: 1 - sqrt(eta);
/// closed-loop CMC: maximizer of vr_of_duty. Throws NoBifurcationError for r = 0
/// and for open-loop CMC.
double snb_duty(const ConverterParams& params);

/// 1 - sqrt(eta), the high-gain limit shared by every closed voltage loop.
double snb_duty_large_gain(const ConverterParams& params);

/// PVMC: v_s/(2 sqrt(eta)) + (1 - sqrt(eta))/kappa; type-III: v_s/(2 sqrt(eta));
/// closed-loop CMC: vr_of_duty(snb_duty).
double snb_reference(const ConverterParams& params);

/// Duty where c1 crosses zero, absent when no crossing lies in [0, 1).
std::optional<double> hopf_duty(const ConverterParams& params);

/// kappa above which D_H < 0 and no Hopf crossing exists: (1 + eta)(rRC/L + 1)/v_s.
double hopf_exclusion_threshold(const ConverterParams& params);

struct HopfOrdering {
    bool precedes = false;            ///< D_H exists and D_H < D_S
    bool sufficient_condition = false;///< kappa > 2 eta (rRC/L + 1)/v_s
    double threshold = 0.0;           ///< right-hand side of the sufficient condition
};

HopfOrdering hopf_precedes_snb(const ConverterParams& params);

struct CriticalModeCheck {
    double K = 0.0;          ///< 2L/(RT)
    double K_crit = 0.0;     ///< D (1-D)^2
    double K_star = 0.0;     ///< (2L/(rT)) (1-D)^2, +inf for r = 0
    bool snb_excluded = false;///< K_star > K_crit
};

CriticalModeCheck critical_mode_check(const ConverterParams& params, double duty);

/// G_vd(s) = E (sI - A)^{-1} (A1 - A2) X with E = [0 1].
std::complex<double> control_to_output_tf(const ConverterParams& params, double duty, std::complex<double> s);

/// The D = 1 operating point (v_s/r, 0). Throws DomainError when r = 0.
SteadyState dc_solution(const ConverterParams& params);

struct CriticalReport {
    double eta = 0.0;
    std::optional<double> kappa;
    std::optional<double> D_S;
    std::optional<double> v_r_star;
    std::optional<double> v_r_at_snb_duty;  ///< vr_of_duty(D_S), exact for every scheme
    std::optional<double> D_H;
    std::optional<double> v_r_hopf;
    std::optional<double> hopf_exclusion_threshold;
    std::optional<HopfOrdering> ordering;
    std::optional<CriticalModeCheck> critical_mode;
    std::optional<SteadyState> dc;
};

CriticalReport critical_report(const ConverterParams& params);

}  // namespace boostfold::averaged
