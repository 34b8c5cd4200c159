#pragma once

// Boost converter parameters and the exact two-stage switched model
//
//   stage S1 (switch on):  x' = A1 x + B1 u
//   stage S2 (switch off): x' = A2 x + B2 u
//   u = (v_s, v_r),  y = C x + D u
//
// Every clock cycle starts in S1; the comparator moves the system to S2 at
// the first instant where y(t) falls to the ramp h(t) = V_h * t / T, and the
// stage latches until the next clock edge.

#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <Eigen/Core>

namespace boostfold {

/// Proportional voltage-mode control, y = k_p (v_r - v_C).
struct Pvmc {
    double k_p = 0.0;
};

/// Voltage-mode control with a type-III compensator,
/// y = v_r + G_c(s) (v_r - v_o), G_c(s) = K_c (1 + s/z1)(1 + s/z2) / (s (1 + s/p1)(1 + s/p2)).
/// Corner frequencies in rad/s.
struct VmcType3 {
    double K_c = 0.0;
    double z1 = 0.0;
    double z2 = 0.0;
    double p1 = 0.0;
    double p2 = 0.0;
};

/// Peak current-mode control with the reference v_r read directly as the current command i_c.
struct CmcOpenLoop {};

/// Peak current-mode control with i_c = k_p (v_r - v_C).
struct CmcClosedLoop {
    double k_p = 0.0;
};

using ControlScheme = std::variant<Pvmc, VmcType3, CmcOpenLoop, CmcClosedLoop>;

std::string_view scheme_name(const ControlScheme& scheme);

bool is_voltage_mode(const ControlScheme& scheme);

struct ConverterParams {
    double v_s = 0.0;  ///< source voltage [V]
    double L = 0.0;    ///< inductance [H]
    double C = 0.0;    ///< output capacitance [F]
    double R = 0.0;    ///< load resistance [Ohm]
    double r = 0.0;    ///< parasitic inductor resistance [Ohm]
    double R_c = 0.0;  ///< capacitor ESR [Ohm]
    double V_h = 0.0;  ///< ramp amplitude [V], or [A] for current-mode compensation ramps
    double f_s = 0.0;  ///< switching frequency [Hz]
    ControlScheme scheme = Pvmc{};

    double eta() const { return r / R; }
    double period() const { return 1.0 / f_s; }

    /// k_p / V_h for proportional schemes with a nonzero ramp.
    std::optional<double> kappa() const;

    /// Proportional gain of PVMC or closed-loop CMC.
    std::optional<double> proportional_gain() const;

    /// Throws ValidationError naming the first offending field.
    void validate() const;
};

/// Rising sawtooth, 0 at every clock edge and V_h just before the next one.
struct RampSpec {
    double V_h = 0.0;
    double T = 0.0;

    /// Ramp value at time t measured from the start of the current cycle, t in [0, T].
    double within_cycle(double t) const { return V_h * t / T; }
    double at(double t) const;
    double slope() const { return V_h / T; }
};

enum class Stage { S1 = 1, S2 = 2 };

struct SwitchedModel {
    ConverterParams params;
    int n = 0;
    Eigen::MatrixXd A1, A2;
    Eigen::MatrixXd B1, B2;
    Eigen::RowVectorXd C_row;
    Eigen::RowVector2d D_row = Eigen::RowVector2d::Zero();
    Eigen::RowVectorXd E1, E2, E;
    double T = 0.0;
    RampSpec ramp;
    std::vector<std::string> state_labels;
    /// Per-coordinate magnitudes used to normalize mixed-unit residuals.
    Eigen::VectorXd state_scale;
    /// Typical magnitude of y, used to normalize comparator residuals.
    double y_scale = 1.0;

    Eigen::Vector2d input(double v_r) const { return {params.v_s, v_r}; }
    const Eigen::MatrixXd& A(Stage s) const { return s == Stage::S1 ? A1 : A2; }
    const Eigen::MatrixXd& B(Stage s) const { return s == Stage::S1 ? B1 : B2; }
    const Eigen::RowVectorXd& output_row(Stage s) const { return s == Stage::S1 ? E1 : E2; }

    /// Comparator input y = C x + D u.
    double control_output(const Eigen::VectorXd& x, double v_r) const {
        return C_row.dot(x) + D_row.dot(input(v_r));
    }

    /// Euclidean norm of dx after dividing each coordinate by state_scale.
    double normalized_norm(const Eigen::VectorXd& dx) const {
        return dx.cwiseQuotient(state_scale).norm();
    }

    bool has_compensator() const { return n > 2; }
};

SwitchedModel build_pvmc_model(const ConverterParams& params);
SwitchedModel build_type3_model(const ConverterParams& params);
SwitchedModel build_cmc_model(const ConverterParams& params);

/// Dispatches on params.scheme.
SwitchedModel build_model(const ConverterParams& params);

/// Full model state from a power-stage operating point (i_L, v_C) at duty D.
/// Compensator states, when present, are placed on their DC values so that
/// y = V_h * D at the switching instant.
Eigen::VectorXd compose_state(const SwitchedModel& model, double i_L, double v_C, double duty, double v_r);

/// True when, at the stuck-on operating point (i_L, v_C) = (v_s/r, 0), the comparator
/// input stays above the ramp for the whole cycle so the duty ratio saturates at 1.
bool predicts_dc_saturation(const SwitchedModel& model, double v_r);

/// The D = 1 equilibrium of the full state when one exists (requires r > 0 and no integrator).
std::optional<Eigen::VectorXd> dc_fixed_point(const SwitchedModel& model, double v_r);

}  // namespace boostfold
