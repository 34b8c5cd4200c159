#include "boostfold/converter.hpp"

#include <cmath>
#include <limits>

#include <Eigen/LU>

#include "boostfold/compensator.hpp"
#include "boostfold/errors.hpp"

namespace boostfold {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void require_positive(double value, const char* key) {
    if (!(value > 0.0) || !std::isfinite(value)) {
        throw ValidationError(key, "must be finite and > 0");
    }
}

void require_nonnegative(double value, const char* key) {
    if (!(value >= 0.0) || !std::isfinite(value)) {
        throw ValidationError(key, "must be finite and >= 0");
    }
}

struct PowerStage {
    Eigen::Matrix2d A1, A2;
    Eigen::Matrix<double, 2, 2> B;
    Eigen::RowVector2d E1, E2;
};

// Inductor branch with series r; output node carries the load R and the
// capacitor with series ESR R_c. Capacitor voltage is the state, v_o = v_C + R_c i_C.
PowerStage power_stage(const ConverterParams& p) {
    const double a = p.R / (p.R + p.R_c);
    const double tau_inv = 1.0 / (p.C * (p.R + p.R_c));

    PowerStage ps;
    ps.A1 << -p.r / p.L, 0.0,
             0.0, -tau_inv;
    ps.A2 << -(p.r + a * p.R_c) / p.L, -a / p.L,
             a / p.C, -tau_inv;
    ps.B << 1.0 / p.L, 0.0,
            0.0, 0.0;
    ps.E1 << 0.0, a;
    ps.E2 << a * p.R_c, a;
    return ps;
}

double current_scale(const ConverterParams& p) { return p.v_s / p.R / (p.eta() + 0.01); }

SwitchedModel base_model(const ConverterParams& p, int n) {
    SwitchedModel m;
    m.params = p;
    m.n = n;
    m.T = p.period();
    m.ramp = RampSpec{p.V_h, m.T};
    m.A1 = Eigen::MatrixXd::Zero(n, n);
    m.A2 = Eigen::MatrixXd::Zero(n, n);
    m.B1 = Eigen::MatrixXd::Zero(n, 2);
    m.B2 = Eigen::MatrixXd::Zero(n, 2);
    m.C_row = Eigen::RowVectorXd::Zero(n);
    m.E1 = Eigen::RowVectorXd::Zero(n);
    m.E2 = Eigen::RowVectorXd::Zero(n);

    const PowerStage ps = power_stage(p);
    m.A1.topLeftCorner<2, 2>() = ps.A1;
    m.A2.topLeftCorner<2, 2>() = ps.A2;
    m.B1.topRows<2>() = ps.B;
    m.B2.topRows<2>() = ps.B;
    m.E1.head<2>() = ps.E1;
    m.E2.head<2>() = ps.E2;

    m.state_labels = {"i_L", "v_C"};
    m.state_scale = Eigen::VectorXd::Constant(n, p.v_s);
    m.state_scale(0) = current_scale(p);
    return m;
}

void finish(SwitchedModel& m) { m.E = (m.E1 + m.E2) / 2.0; }

}  // namespace

std::string_view scheme_name(const ControlScheme& scheme) {
    return std::visit(overloaded{
                          [](const Pvmc&) { return std::string_view{"pvmc"}; },
                          [](const VmcType3&) { return std::string_view{"vmc_type3"}; },
                          [](const CmcOpenLoop&) { return std::string_view{"cmc_open"}; },
                          [](const CmcClosedLoop&) { return std::string_view{"cmc_closed"}; },
                      },
                      scheme);
}

bool is_voltage_mode(const ControlScheme& scheme) {
    return std::holds_alternative<Pvmc>(scheme) || std::holds_alternative<VmcType3>(scheme);
}

std::optional<double> ConverterParams::proportional_gain() const {
    if (const auto* s = std::get_if<Pvmc>(&scheme)) return s->k_p;
    if (const auto* s = std::get_if<CmcClosedLoop>(&scheme)) return s->k_p;
    return std::nullopt;
}

std::optional<double> ConverterParams::kappa() const {
    const auto k_p = proportional_gain();
    if (!k_p || !(V_h > 0.0)) return std::nullopt;
    return *k_p / V_h;
}

void ConverterParams::validate() const {
    require_positive(v_s, "v_s");
    require_positive(L, "L");
    require_positive(C, "C");
    require_positive(R, "R");
    require_nonnegative(r, "r");
    require_nonnegative(R_c, "R_c");
    require_nonnegative(V_h, "V_h");
    require_positive(f_s, "f_s");

    std::visit(overloaded{
                   [&](const Pvmc& s) {
                       require_positive(s.k_p, "k_p");
                       require_positive(V_h, "V_h");
                   },
                   [&](const VmcType3& s) {
                       require_positive(s.K_c, "K_c");
                       require_positive(s.z1, "z1");
                       require_positive(s.z2, "z2");
                       require_positive(s.p1, "p1");
                       require_positive(s.p2, "p2");
                       require_positive(V_h, "V_h");
                   },
                   [](const CmcOpenLoop&) {},
                   [](const CmcClosedLoop& s) { require_positive(s.k_p, "k_p"); },
               },
               scheme);
}

double RampSpec::at(double t) const {
    double local = std::fmod(t, T);
    if (local < 0.0) local += T;
    return within_cycle(local);
}

SwitchedModel build_pvmc_model(const ConverterParams& params) {
    params.validate();
    const auto* pvmc = std::get_if<Pvmc>(&params.scheme);
    if (!pvmc) throw DomainError("build_pvmc_model: scheme is " + std::string(scheme_name(params.scheme)));

    SwitchedModel m = base_model(params, 2);
    m.C_row << 0.0, -pvmc->k_p;
    m.D_row << 0.0, pvmc->k_p;
    m.y_scale = params.V_h;
    finish(m);
    return m;
}

SwitchedModel build_type3_model(const ConverterParams& params) {
    params.validate();
    const auto* comp = std::get_if<VmcType3>(&params.scheme);
    if (!comp) throw DomainError("build_type3_model: scheme is " + std::string(scheme_name(params.scheme)));

    const StateSpace gc = realize_type3(*comp);
    SwitchedModel m = base_model(params, 5);

    // Compensator input e = v_r - v_o with v_o = E_i x in each stage.
    for (Stage s : {Stage::S1, Stage::S2}) {
        Eigen::MatrixXd& A = s == Stage::S1 ? m.A1 : m.A2;
        Eigen::MatrixXd& B = s == Stage::S1 ? m.B1 : m.B2;
        const Eigen::RowVectorXd& Eo = s == Stage::S1 ? m.E1 : m.E2;
        A.bottomRightCorner<3, 3>() = gc.A;
        A.bottomLeftCorner(3, 2) = -gc.B * Eo.head<2>();
        B.block<3, 1>(2, 1) = gc.B;
    }
    m.C_row.tail<3>() = gc.C;
    m.D_row << 0.0, 1.0;
    m.y_scale = params.V_h;
    m.state_labels = {"i_L", "v_C", "x_int", "x_lag1", "x_lag2"};
    finish(m);
    return m;
}

SwitchedModel build_cmc_model(const ConverterParams& params) {
    params.validate();
    SwitchedModel m = base_model(params, 2);
    if (std::holds_alternative<CmcOpenLoop>(params.scheme)) {
        m.C_row << -1.0, 0.0;
        m.D_row << 0.0, 1.0;
    } else if (const auto* cl = std::get_if<CmcClosedLoop>(&params.scheme)) {
        m.C_row << -1.0, -cl->k_p;
        m.D_row << 0.0, cl->k_p;
    } else {
        throw DomainError("build_cmc_model: scheme is " + std::string(scheme_name(params.scheme)));
    }
    m.y_scale = m.state_scale(0);
    finish(m);
    return m;
}

SwitchedModel build_model(const ConverterParams& params) {
    return std::visit(overloaded{
                          [&](const Pvmc&) { return build_pvmc_model(params); },
                          [&](const VmcType3&) { return build_type3_model(params); },
                          [&](const CmcOpenLoop&) { return build_cmc_model(params); },
                          [&](const CmcClosedLoop&) { return build_cmc_model(params); },
                      },
                      params.scheme);
}

Eigen::VectorXd compose_state(const SwitchedModel& model, double i_L, double v_C, double duty, double v_r) {
    Eigen::VectorXd x = Eigen::VectorXd::Zero(model.n);
    x(0) = i_L;
    x(1) = v_C;
    if (model.has_compensator()) {
        // y = v_r + x_c at DC for the low-pass cascade.
        x.tail(model.n - 2).setConstant(model.params.V_h * duty - v_r);
    }
    return x;
}

std::optional<Eigen::VectorXd> dc_fixed_point(const SwitchedModel& model, double v_r) {
    if (!(model.params.r > 0.0) || model.has_compensator()) return std::nullopt;
    const Eigen::VectorXd x = -model.A1.partialPivLu().solve(model.B1 * model.input(v_r));
    return x;
}

bool predicts_dc_saturation(const SwitchedModel& model, double v_r) {
    if (!(model.params.r > 0.0)) return false;
    if (model.has_compensator()) {
        // Integrator input stays positive while v_o = 0, so y grows without bound.
        return v_r > 0.0;
    }
    const auto x = dc_fixed_point(model, v_r);
    return model.control_output(*x, v_r) > model.ramp.V_h;
}

}  // namespace boostfold
