#include "boostfold_cli/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include <boostfold/errors.hpp>

namespace boostfold::cli {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

double to_double(std::string_view v, std::size_t line) {
    double out = 0.0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || ptr != v.data() + v.size()) {
        throw ParseError(line, "expected a number, got '" + std::string(v) + "'");
    }
    return out;
}

int to_int(std::string_view v, std::size_t line) {
    int out = 0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || ptr != v.data() + v.size()) {
        throw ParseError(line, "expected an integer, got '" + std::string(v) + "'");
    }
    return out;
}

bool to_bool(std::string_view v, std::size_t line) {
    if (v == "true" || v == "yes" || v == "1") return true;
    if (v == "false" || v == "no" || v == "0") return false;
    throw ParseError(line, "expected true or false, got '" + std::string(v) + "'");
}

std::vector<double> to_list(std::string_view v, std::size_t line) {
    std::vector<double> out;
    while (!v.empty()) {
        const auto comma = v.find(',');
        out.push_back(to_double(trim(v.substr(0, comma)), line));
        if (comma == std::string_view::npos) break;
        v.remove_prefix(comma + 1);
    }
    return out;
}

struct Raw {
    std::string value;
    std::size_t line;
};

using Handler = std::function<void(RunConfig&, std::string_view, std::size_t)>;

const std::map<std::string, Handler, std::less<>>& handlers() {
    static const std::map<std::string, Handler, std::less<>> h = {
        {"converter.v_s", [](RunConfig& c, std::string_view v, std::size_t l) { c.params.v_s = to_double(v, l); }},
        {"converter.V_h", [](RunConfig& c, std::string_view v, std::size_t l) { c.params.V_h = to_double(v, l); }},
        {"converter.f_s", [](RunConfig& c, std::string_view v, std::size_t l) { c.params.f_s = to_double(v, l); }},
        {"converter.L", [](RunConfig& c, std::string_view v, std::size_t l) { c.params.L = to_double(v, l); }},
        {"converter.C", [](RunConfig& c, std::string_view v, std::size_t l) { c.params.C = to_double(v, l); }},
        {"converter.R", [](RunConfig& c, std::string_view v, std::size_t l) { c.params.R = to_double(v, l); }},
        {"converter.r", [](RunConfig& c, std::string_view v, std::size_t l) { c.params.r = to_double(v, l); }},
        {"converter.R_c", [](RunConfig& c, std::string_view v, std::size_t l) { c.params.R_c = to_double(v, l); }},
        {"sweep.from", [](RunConfig& c, std::string_view v, std::size_t l) { c.sweep.from = to_double(v, l); }},
        {"sweep.to", [](RunConfig& c, std::string_view v, std::size_t l) { c.sweep.to = to_double(v, l); }},
        {"sweep.points", [](RunConfig& c, std::string_view v, std::size_t l) { c.sweep.points = to_int(v, l); }},
        {"sweep.track_period_two",
         [](RunConfig& c, std::string_view v, std::size_t l) { c.sweep.track_period_two = to_bool(v, l); }},
        {"sweep.duty_curve_points",
         [](RunConfig& c, std::string_view v, std::size_t l) { c.sweep.duty_curve_points = to_int(v, l); }},
        {"sweep.branch_jump",
         [](RunConfig& c, std::string_view v, std::size_t l) { c.sweep.branch_jump = to_double(v, l); }},
        {"simulate.v_r", [](RunConfig& c, std::string_view v, std::size_t l) { c.simulate.v_r = to_double(v, l); }},
        {"simulate.cycles", [](RunConfig& c, std::string_view v, std::size_t l) { c.simulate.cycles = to_int(v, l); }},
        {"simulate.x0", [](RunConfig& c, std::string_view v, std::size_t l) { c.simulate.x0 = to_list(v, l); }},
        {"simulate.kick", [](RunConfig& c, std::string_view v, std::size_t l) { c.simulate.kick = to_double(v, l); }},
        {"simulate.output_points",
         [](RunConfig& c, std::string_view v, std::size_t l) { c.simulate.output_points = to_int(v, l); }},
        {"simulate.saturation_window",
         [](RunConfig& c, std::string_view v, std::size_t l) { c.simulate.saturation_window = to_int(v, l); }},
        {"steady.v_r", [](RunConfig& c, std::string_view v, std::size_t l) { c.steady.v_r = to_double(v, l); }},
        {"poles.d_from", [](RunConfig& c, std::string_view v, std::size_t l) { c.poles.d_from = to_double(v, l); }},
        {"poles.d_to", [](RunConfig& c, std::string_view v, std::size_t l) { c.poles.d_to = to_double(v, l); }},
        {"poles.points", [](RunConfig& c, std::string_view v, std::size_t l) { c.poles.points = to_int(v, l); }},
        {"solver.newton_tol",
         [](RunConfig& c, std::string_view v, std::size_t l) { c.solver.newton_tol = to_double(v, l); }},
        {"solver.max_iterations",
         [](RunConfig& c, std::string_view v, std::size_t l) { c.solver.max_iterations = to_int(v, l); }},
        {"solver.samples_per_cycle",
         [](RunConfig& c, std::string_view v, std::size_t l) { c.solver.samples_per_cycle = to_int(v, l); }},
        {"solver.grazing_tol",
         [](RunConfig& c, std::string_view v, std::size_t l) { c.solver.grazing_tol = to_double(v, l); }},
        {"output.dir", [](RunConfig& c, std::string_view v, std::size_t) { c.output.dir = std::string(v); }},
        {"output.run_id", [](RunConfig& c, std::string_view v, std::size_t) { c.output.run_id = std::string(v); }},
    };
    return h;
}

const std::set<std::string, std::less<>> kControlKeys = {"scheme", "k_p", "K_c", "z1", "z2", "p1", "p2"};

double control_value(const std::map<std::string, Raw, std::less<>>& control, const std::string& key) {
    const auto it = control.find(key);
    if (it == control.end()) throw ValidationError(key, "required by the selected scheme");
    return to_double(it->second.value, it->second.line);
}

ControlScheme build_scheme(const std::map<std::string, Raw, std::less<>>& control) {
    const auto it = control.find("scheme");
    if (it == control.end()) throw ValidationError("scheme", "required");
    const std::string& s = it->second.value;
    std::set<std::string> allowed = {"scheme"};
    ControlScheme scheme;
    if (s == "pvmc") {
        scheme = Pvmc{control_value(control, "k_p")};
        allowed.insert("k_p");
    } else if (s == "vmc_type3") {
        scheme = VmcType3{control_value(control, "K_c"), control_value(control, "z1"), control_value(control, "z2"),
                          control_value(control, "p1"), control_value(control, "p2")};
        allowed.insert({"K_c", "z1", "z2", "p1", "p2"});
    } else if (s == "cmc_open") {
        scheme = CmcOpenLoop{};
    } else if (s == "cmc_closed") {
        scheme = CmcClosedLoop{control_value(control, "k_p")};
        allowed.insert("k_p");
    } else {
        throw ValidationError("scheme", "unknown scheme '" + s + "' (pvmc, vmc_type3, cmc_open, cmc_closed)");
    }
    for (const auto& [key, raw] : control) {
        if (!allowed.count(key)) throw ValidationError(key, "not used by scheme " + s);
    }
    return scheme;
}

void require_positive(double v, const char* key) {
    if (!(v > 0.0) || !std::isfinite(v)) throw ValidationError(key, "must be finite and > 0");
}

void require_at_least(int v, int lo, const char* key) {
    if (v < lo) throw ValidationError(key, "must be >= " + std::to_string(lo));
}

}  // namespace

RunConfig parse_config(std::string_view text) {
    RunConfig cfg;
    std::string section;
    std::set<std::string, std::less<>> seen;
    std::map<std::string, Raw, std::less<>> control;

    std::size_t line_no = 0;
    while (!text.empty()) {
        ++line_no;
        const auto nl = text.find('\n');
        std::string_view line = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);

        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;

        if (line.front() == '[') {
            if (line.back() != ']') throw ParseError(line_no, "unterminated section header");
            section = std::string(trim(line.substr(1, line.size() - 2)));
            static const std::set<std::string> sections = {"converter", "control", "sweep", "simulate",
                                                           "steady",    "poles",   "solver", "output"};
            if (!sections.count(section)) throw ParseError(line_no, "unknown section [" + section + "]");
            continue;
        }

        const auto eq = line.find('=');
        if (eq == std::string_view::npos) throw ParseError(line_no, "expected 'key = value'");
        const std::string key(trim(line.substr(0, eq)));
        const std::string_view value = trim(line.substr(eq + 1));
        if (key.empty()) throw ParseError(line_no, "missing key");
        if (value.empty()) throw ParseError(line_no, "missing value for '" + key + "'");
        if (section.empty()) throw ParseError(line_no, "key '" + key + "' outside of any section");

        const std::string full = section + "." + key;
        if (!seen.insert(full).second) throw ParseError(line_no, "duplicate key '" + full + "'");

        if (section == "control") {
            if (!kControlKeys.count(key)) throw ParseError(line_no, "unknown key '" + full + "'");
            control[key] = Raw{std::string(value), line_no};
            continue;
        }
        const auto h = handlers().find(full);
        if (h == handlers().end()) throw ParseError(line_no, "unknown key '" + full + "'");
        h->second(cfg, value, line_no);
    }

    for (const char* key : {"v_s", "L", "C", "R", "f_s"}) {
        if (!seen.count(std::string("converter.") + key)) throw ValidationError(key, "required");
    }
    cfg.params.scheme = build_scheme(control);
    cfg.params.validate();
    validate(cfg);
    return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

void validate(const RunConfig& c) {
    if (c.sweep.from && c.sweep.to && !(*c.sweep.from < *c.sweep.to)) {
        throw ValidationError("sweep.to", "must exceed sweep.from");
    }
    require_at_least(c.sweep.points, 2, "sweep.points");
    require_at_least(c.sweep.duty_curve_points, 3, "sweep.duty_curve_points");
    require_positive(c.sweep.branch_jump, "sweep.branch_jump");
    require_at_least(c.simulate.cycles, 1, "simulate.cycles");
    if (!(c.simulate.kick >= 0.0)) throw ValidationError("simulate.kick", "must be >= 0");
    require_at_least(c.simulate.output_points, 0, "simulate.output_points");
    require_at_least(c.simulate.saturation_window, 1, "simulate.saturation_window");
    if (!(c.poles.d_from >= 0.0 && c.poles.d_from < c.poles.d_to && c.poles.d_to < 1.0)) {
        throw ValidationError("poles.d_to", "need 0 <= d_from < d_to < 1");
    }
    require_at_least(c.poles.points, 2, "poles.points");
    require_positive(c.solver.newton_tol, "solver.newton_tol");
    require_at_least(c.solver.max_iterations, 1, "solver.max_iterations");
    require_at_least(c.solver.samples_per_cycle, 1, "solver.samples_per_cycle");
    require_positive(c.solver.grazing_tol, "solver.grazing_tol");
    if (c.output.run_id.empty()) throw ValidationError("output.run_id", "must not be empty");
}

}  // namespace boostfold::cli
