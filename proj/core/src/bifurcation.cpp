#include "boostfold/bifurcation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>

#include "boostfold/averaged.hpp"
#include "boostfold/csv.hpp"
#include "boostfold/errors.hpp"

namespace boostfold {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kDutyTol = 1e-11;

template <class Fn>
void parallel_for(int count, unsigned jobs, Fn&& fn) {
    if (jobs == 0) jobs = std::max(1u, std::thread::hardware_concurrency());
    jobs = std::min<unsigned>(jobs, static_cast<unsigned>(std::max(count, 1)));
    if (jobs <= 1) {
        for (int i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    std::exception_ptr error;
    std::mutex error_mutex;
    for (unsigned t = 0; t < jobs; ++t) {
        pool.emplace_back([&] {
            for (int i = next++; i < count; i = next++) {
                try {
                    fn(i);
                } catch (...) {
                    const std::lock_guard lock(error_mutex);
                    if (!error) error = std::current_exception();
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
}

double curve_vr(const CycleMap& map, double duty) {
    try {
        return periodic_state_at_duty(map, duty).v_r;
    } catch (const DomainError&) {
        return kNaN;
    }
}

bool usable(const Orbit& o) {
    return o.converged && o.stability.classification != OrbitClass::Degenerate;
}

bool is_dc(const Orbit& o) { return o.stability.classification == OrbitClass::SaturatedDc; }

double orbit_distance(const CycleMap& map, const Orbit& a, const Orbit& b) {
    const SwitchedModel& m = map.model();
    double d = m.normalized_norm(a.x_star - b.x_star);
    if (a.period_mult > 1) {
        // Compare every phase of a kT orbit.
        Eigen::VectorXd x = b.x_star;
        for (int j = 1; j < b.period_mult; ++j) {
            x = stroboscopic_map(map, b.v_r, x);
            d = std::min(d, m.normalized_norm(a.x_star - x));
        }
    }
    return d;
}

void add_unique(const CycleMap& map, std::vector<Orbit>& set, Orbit o, double tol) {
    if (!usable(o)) return;
    for (const auto& e : set) {
        if (e.period_mult == o.period_mult && orbit_distance(map, e, o) <= tol) return;
    }
    set.push_back(std::move(o));
}

double duty_gap(const Orbit& a, const Orbit& b) {
    if (a.period_mult != b.period_mult) return std::numeric_limits<double>::infinity();
    double best = std::numeric_limits<double>::infinity();
    const int k = a.period_mult;
    for (int shift = 0; shift < k; ++shift) {
        double g = 0.0;
        for (int j = 0; j < k; ++j) g = std::max(g, std::abs(a.duties[j] - b.duties[(j + shift) % k]));
        best = std::min(best, g);
    }
    return best;
}

std::complex<double> crossing_multiplier(const Orbit& a, const Orbit& b) {
    const Orbit& u = a.stability.unstable_count > b.stability.unstable_count ? a : b;
    std::complex<double> best{kNaN, 0.0};
    double best_gap = std::numeric_limits<double>::infinity();
    for (const auto& l : u.multipliers) {
        const double gap = std::abs(std::abs(l) - 1.0);
        if (gap < best_gap) {
            best_gap = gap;
            best = l;
        }
    }
    return best;
}

CriticalKind kind_of(const std::complex<double>& l) {
    if (std::abs(l.imag()) > 1e-9 * std::max(1.0, std::abs(l))) return CriticalKind::Neimark;
    return l.real() < 0.0 ? CriticalKind::Pdb : CriticalKind::Snb;
}

CriticalPoint make_point(CriticalKind kind, const Orbit& o) {
    CriticalPoint cp;
    cp.kind = kind;
    cp.v_r = o.v_r;
    cp.duty = o.duties.empty() ? kNaN : o.duties.front();
    cp.state = o.x_star;
    return cp;
}

// Bisection on the switching fraction between two T-periodic orbits whose unstable counts differ.
std::optional<CriticalPoint> bisect_stability_in_duty(const CycleMap& map, Orbit a, Orbit b,
                                                      const OrbitOptions& options) {
    const int ca = a.stability.unstable_count;
    for (int it = 0; it < 200 && std::abs(a.duties[0] - b.duties[0]) > kDutyTol; ++it) {
        Orbit m = orbit_at_duty(map, 0.5 * (a.duties[0] + b.duties[0]), options);
        if (!usable(m)) return std::nullopt;
        if (m.stability.unstable_count == ca) {
            a = std::move(m);
        } else {
            b = std::move(m);
        }
    }
    const CriticalKind kind = kind_of(crossing_multiplier(a, b));
    Orbit mid = orbit_at_duty(map, 0.5 * (a.duties[0] + b.duties[0]), options);
    if (!mid.converged) mid = a;
    return make_point(kind, mid);
}

// Bisection on v_r with Newton continuation, for kT orbits.
std::optional<CriticalPoint> bisect_stability_in_vr(const CycleMap& map, Orbit a, Orbit b,
                                                    const OrbitOptions& options) {
    const int ca = a.stability.unstable_count;
    for (int it = 0; it < 200 && std::abs(a.v_r - b.v_r) > 1e-4 * std::abs(0.5 * (a.v_r + b.v_r)); ++it) {
        const double vm = 0.5 * (a.v_r + b.v_r);
        Orbit m = find_periodic_orbit(map, vm, OrbitSeed{a.x_star, a.duties}, a.period_mult, options);
        if (!usable(m)) m = find_periodic_orbit(map, vm, OrbitSeed{b.x_star, b.duties}, b.period_mult, options);
        if (!usable(m)) return std::nullopt;
        if (m.stability.unstable_count == ca) {
            a = std::move(m);
        } else {
            b = std::move(m);
        }
    }
    const CriticalKind kind = kind_of(crossing_multiplier(a, b));
    CriticalPoint cp = make_point(kind, a);
    cp.v_r = 0.5 * (a.v_r + b.v_r);
    return cp;
}

std::optional<CriticalPoint> bisect_stability(const CycleMap& map, const Orbit& a, const Orbit& b,
                                              const OrbitOptions& options) {
    if (a.period_mult == 1) return bisect_stability_in_duty(map, a, b, options);
    return bisect_stability_in_vr(map, a, b, options);
}

// Bisection on the switching fraction between an admissible and an inadmissible T-periodic solution.
CriticalPoint bisect_admissibility(const CycleMap& map, double good, double bad, const OrbitOptions& options) {
    Orbit last = orbit_at_duty(map, good, options);
    while (std::abs(good - bad) > kDutyTol) {
        const double mid = 0.5 * (good + bad);
        Orbit m = orbit_at_duty(map, mid, options);
        if (m.converged) {
            good = mid;
            last = std::move(m);
        } else {
            bad = mid;
        }
    }
    return make_point(CriticalKind::Boundary, last);
}

double golden_extremum(const CycleMap& map, double a, double b, bool maximum) {
    const double g = 0.5 * (std::sqrt(5.0) - 1.0);
    const double sign = maximum ? -1.0 : 1.0;
    auto f = [&](double t) { return sign * curve_vr(map, t); };
    double c = b - g * (b - a);
    double d = a + g * (b - a);
    double fc = f(c), fd = f(d);
    while (b - a > 1e-10) {
        if (fc < fd) {
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

std::string describe_origin(const Branch& b, std::optional<double> fold_duty) {
    if (b.period_mult > 1) return "period-2";
    if (is_dc(b.points.front().orbit)) return "dc";
    if (!fold_duty) return "main";
    double mean = 0.0;
    for (const auto& p : b.points) mean += p.orbit.duties[0];
    mean /= static_cast<double>(b.points.size());
    return mean < *fold_duty ? "lower" : "upper";
}

}  // namespace

const char* to_string(CriticalKind k) {
    switch (k) {
        case CriticalKind::Snb: return "snb";
        case CriticalKind::Neimark: return "neimark";
        case CriticalKind::Pdb: return "pdb";
        case CriticalKind::Boundary: return "boundary";
    }
    return "?";
}

DutyCurve duty_curve(const CycleMap& map, int points, double lo, double hi) {
    if (points < 3) throw DomainError("duty_curve: need at least 3 points");
    DutyCurve c;
    c.duty.resize(points);
    c.v_r.resize(points);
    for (int i = 0; i < points; ++i) {
        c.duty[i] = lo + (hi - lo) * i / (points - 1);
        c.v_r[i] = curve_vr(map, c.duty[i]);
    }
    return c;
}

std::vector<CriticalPoint> switched_folds(const CycleMap& map, const DutyCurve& curve, const OrbitOptions& options) {
    std::vector<CriticalPoint> out;
    const auto& v = curve.v_r;
    for (std::size_t i = 1; i + 1 < v.size(); ++i) {
        if (!std::isfinite(v[i - 1]) || !std::isfinite(v[i]) || !std::isfinite(v[i + 1])) continue;
        const bool is_max = v[i] > v[i - 1] && v[i] >= v[i + 1];
        const bool is_min = v[i] < v[i - 1] && v[i] <= v[i + 1];
        if (!is_max && !is_min) continue;
        const double d = golden_extremum(map, curve.duty[i - 1], curve.duty[i + 1], is_max);
        Orbit o = orbit_at_duty(map, d, options);
        if (!o.converged) continue;
        out.push_back(make_point(CriticalKind::Snb, o));
    }
    return out;
}

std::vector<double> duty_roots(const CycleMap& map, const DutyCurve& curve, double v_r) {
    std::vector<double> roots;
    const auto& v = curve.v_r;
    for (std::size_t i = 0; i + 1 < v.size(); ++i) {
        const double fa = v[i] - v_r;
        const double fb = v[i + 1] - v_r;
        if (!std::isfinite(fa) || !std::isfinite(fb)) continue;
        if (fa == 0.0) {
            roots.push_back(curve.duty[i]);
            continue;
        }
        if (fa * fb > 0.0 || fb == 0.0) continue;
        double a = curve.duty[i], b = curve.duty[i + 1];
        double sa = fa;
        for (int it = 0; it < 100 && b - a > 1e-14; ++it) {
            const double m = 0.5 * (a + b);
            const double fm = curve_vr(map, m) - v_r;
            if (!std::isfinite(fm)) break;
            if ((fm > 0.0) == (sa > 0.0)) {
                a = m;
                sa = fm;
            } else {
                b = m;
            }
        }
        roots.push_back(0.5 * (a + b));
    }
    if (std::isfinite(v.back()) && v.back() == v_r) roots.push_back(curve.duty.back());
    return roots;
}

BifurcationDiagram sweep(const SwitchedModel& model, double v_r_min, double v_r_max, int n_points,
                         const SweepOptions& options) {
    if (!(v_r_min < v_r_max)) throw DomainError("sweep: v_r_min must be below v_r_max");
    if (n_points < 2) throw DomainError("sweep: n_points must be >= 2");

    const CycleMap map(model, options.orbit.samples_per_cycle);
    const OrbitOptions& oo = options.orbit;
    const bool averaged_seeds = !std::holds_alternative<CmcOpenLoop>(model.params.scheme);

    BifurcationDiagram diagram;
    diagram.state_labels = model.state_labels;
    diagram.sweep_grid.resize(n_points);
    for (int i = 0; i < n_points; ++i) {
        diagram.sweep_grid[i] = v_r_min + (v_r_max - v_r_min) * i / (n_points - 1);
    }
    const auto& grid = diagram.sweep_grid;

    const DutyCurve curve = duty_curve(map, options.duty_curve_points);
    const std::vector<CriticalPoint> folds = switched_folds(map, curve, oo);
    std::optional<double> fold_duty;
    {
        double best = -std::numeric_limits<double>::infinity();
        for (const auto& f : folds) {
            if (f.v_r > best) {
                best = f.v_r;
                fold_duty = f.duty;
            }
        }
    }

    // Fresh seeds at every grid point: exact duty-curve roots, averaged solutions, DC.
    std::vector<std::vector<Orbit>> found(n_points);
    std::vector<std::vector<double>> roots(n_points);
    parallel_for(n_points, options.jobs, [&](int i) {
        const double v = grid[i];
        roots[i] = duty_roots(map, curve, v);
        std::vector<Orbit>& set = found[i];
        for (double d : roots[i]) {
            const DutyOrbit seed = periodic_state_at_duty(map, d);
            add_unique(map, set, find_periodic_orbit(map, v, OrbitSeed{seed.x, {d}}, 1, oo), options.dedupe_tol);
        }
        if (averaged_seeds) {
            for (double d : averaged::duty_solutions(model.params, v)) {
                const auto ss = averaged::steady_state(model.params, d);
                const Eigen::VectorXd x = compose_state(model, ss.i_L, ss.v_C, d, v);
                add_unique(map, set, find_periodic_orbit(map, v, OrbitSeed{x, {d}}, 1, oo), options.dedupe_tol);
            }
        }
        if (auto dc = dc_orbit(map, v)) add_unique(map, set, std::move(*dc), options.dedupe_tol);
    });

    // Natural continuation in both directions.
    auto continue_from = [&](int from, int to) {
        for (const Orbit& o : std::vector<Orbit>(found[from])) {
            if (is_dc(o) || o.period_mult != 1) continue;
            add_unique(map, found[to], find_periodic_orbit(map, grid[to], OrbitSeed{o.x_star, o.duties}, 1, oo),
                       options.dedupe_tol);
        }
    };
    for (int i = 1; i < n_points; ++i) continue_from(i - 1, i);
    for (int i = n_points - 2; i >= 0; --i) continue_from(i + 1, i);

    if (options.track_period_two) {
        std::vector<Orbit> previous;
        for (int i = 0; i < n_points; ++i) {
            const double v = grid[i];
            std::vector<Orbit> here;
            for (const Orbit& p : previous) {
                add_unique(map, here, find_periodic_orbit(map, v, OrbitSeed{p.x_star, p.duties}, 2, oo),
                           options.dedupe_tol);
            }
            if (here.empty()) {
                for (const Orbit& o : found[i]) {
                    if (o.period_mult != 1 || is_dc(o)) continue;
                    const bool flipped = std::any_of(o.multipliers.begin(), o.multipliers.end(), [](const auto& l) {
                        return std::abs(l.imag()) <= 1e-9 * std::abs(l) && l.real() < -1.0;
                    });
                    if (!flipped) continue;
                    Trajectory t = simulate_cycles(model, o.x_star * (1.0 + 1e-3), v, options.period_two_transient,
                                                   SimulationOptions{oo.samples_per_cycle, 0});
                    const auto p = terminal_duty_period(t, 20, 4, 1e-3);
                    if (!p || *p != 2) continue;
                    const std::size_t n = t.cycle_duties.size();
                    const OrbitSeed seed{t.clock_states[n - 2], {t.cycle_duties[n - 2], t.cycle_duties[n - 1]}};
                    add_unique(map, here, find_periodic_orbit(map, v, seed, 2, oo), options.dedupe_tol);
                }
            }
            std::vector<Orbit> genuine;
            for (auto& o : here) {
                if (std::abs(o.duties[0] - o.duties[1]) > 1e-6) genuine.push_back(std::move(o));
            }
            for (auto& o : genuine) found[i].push_back(o);
            previous = std::move(genuine);
        }
    }

    // Greedy linking into branches by nearest duty.
    std::vector<Branch> branches;
    std::vector<int> open;  // indices of branches whose last point is at the previous grid index
    for (int i = 0; i < n_points; ++i) {
        std::vector<Orbit>& set = found[i];
        std::stable_sort(set.begin(), set.end(), [](const Orbit& a, const Orbit& b) {
            if (a.period_mult != b.period_mult) return a.period_mult < b.period_mult;
            return a.duties[0] < b.duties[0];
        });
        struct Pair {
            double gap;
            int orbit;
            int branch;
        };
        std::vector<Pair> pairs;
        for (int o = 0; o < static_cast<int>(set.size()); ++o) {
            for (int b : open) {
                const Orbit& last = branches[b].points.back().orbit;
                if (is_dc(last) != is_dc(set[o])) continue;
                const double gap = duty_gap(last, set[o]);
                if (gap <= options.branch_jump || (is_dc(last) && is_dc(set[o]))) pairs.push_back({gap, o, b});
            }
        }
        std::stable_sort(pairs.begin(), pairs.end(), [](const Pair& a, const Pair& b) { return a.gap < b.gap; });
        std::vector<int> orbit_branch(set.size(), -1);
        std::vector<bool> taken(branches.size(), false);
        for (const Pair& p : pairs) {
            if (orbit_branch[p.orbit] >= 0 || taken[p.branch]) continue;
            orbit_branch[p.orbit] = p.branch;
            taken[p.branch] = true;
        }
        open.clear();
        for (int o = 0; o < static_cast<int>(set.size()); ++o) {
            int b = orbit_branch[o];
            if (b < 0) {
                b = static_cast<int>(branches.size());
                Branch nb;
                nb.id = b;
                nb.period_mult = set[o].period_mult;
                branches.push_back(std::move(nb));
            }
            branches[b].points.push_back(BranchPoint{grid[i], set[o], i});
            open.push_back(b);
        }
        std::sort(open.begin(), open.end());
    }
    for (auto& b : branches) b.origin = describe_origin(b, fold_duty);
    diagram.branches = branches;

    if (!options.locate) return diagram;

    auto& critical = diagram.critical_points;
    const double step = grid[1] - grid[0];

    for (const Branch& b : branches) {
        if (is_dc(b.points.front().orbit)) continue;
        for (std::size_t j = 0; j + 1 < b.points.size(); ++j) {
            const Orbit& a = b.points[j].orbit;
            const Orbit& c = b.points[j + 1].orbit;
            if (a.stability.unstable_count == c.stability.unstable_count) continue;
            if (auto cp = bisect_stability(map, a, c, oo)) {
                cp->branch_id = b.id;
                critical.push_back(*cp);
            }
        }
    }

    std::vector<bool> fold_used(folds.size(), false);
    for (std::size_t f = 0; f < folds.size(); ++f) {
        const CriticalPoint& fold = folds[f];
        if (fold.v_r < v_r_min || fold.v_r > v_r_max) continue;
        CriticalPoint cp = fold;
        double below = std::numeric_limits<double>::infinity(), above = below;
        for (const Branch& b : branches) {
            if (b.period_mult != 1 || is_dc(b.points.front().orbit)) continue;
            for (const BranchPoint* e : {&b.points.front(), &b.points.back()}) {
                if (std::abs(e->v_r - fold.v_r) > 2.0 * step) continue;
                const double gap = e->orbit.duties[0] - fold.duty;
                if (std::abs(gap) > options.branch_jump) continue;
                if (gap <= 0.0 && -gap < below) {
                    below = -gap;
                    cp.branch_id = b.id;
                } else if (gap > 0.0 && gap < above) {
                    above = gap;
                    cp.other_branch_id = b.id;
                }
            }
        }
        fold_used[f] = true;
        critical.push_back(cp);
    }

    // Branch ends in the interior of the grid that no fold explains.
    for (const Branch& b : branches) {
        if (b.period_mult != 1 || is_dc(b.points.front().orbit)) continue;
        for (int side = 0; side < 2; ++side) {
            const BranchPoint& e = side == 0 ? b.points.front() : b.points.back();
            const int neighbour = side == 0 ? e.grid_index - 1 : e.grid_index + 1;
            if (neighbour < 0 || neighbour >= n_points) continue;
            const double d_end = e.orbit.duties[0];
            const bool near_fold = std::any_of(folds.begin(), folds.end(), [&](const CriticalPoint& f) {
                return std::abs(f.v_r - e.v_r) <= 2.0 * step && std::abs(f.duty - d_end) <= options.branch_jump;
            });
            if (near_fold) continue;
            double target = kNaN;
            for (double d : roots[neighbour]) {
                if (std::abs(d - d_end) <= options.branch_jump &&
                    (!std::isfinite(target) || std::abs(d - d_end) < std::abs(target - d_end))) {
                    target = d;
                }
            }
            if (!std::isfinite(target)) continue;
            if (orbit_at_duty(map, target, oo).converged) continue;
            CriticalPoint cp = bisect_admissibility(map, d_end, target, oo);
            cp.branch_id = b.id;
            critical.push_back(cp);
        }
    }

    std::stable_sort(critical.begin(), critical.end(), [](const CriticalPoint& a, const CriticalPoint& b) {
        if (a.v_r != b.v_r) return a.v_r < b.v_r;
        return static_cast<int>(a.kind) < static_cast<int>(b.kind);
    });
    return diagram;
}

CriticalPoint locate_bifurcation(const SwitchedModel& model, const Branch& branch, CriticalKind kind,
                                 const SweepOptions& options) {
    const CycleMap map(model, options.orbit.samples_per_cycle);
    for (std::size_t j = 0; j + 1 < branch.points.size(); ++j) {
        const Orbit& a = branch.points[j].orbit;
        const Orbit& c = branch.points[j + 1].orbit;
        if (!usable(a) || !usable(c) || is_dc(a)) continue;
        if (a.stability.unstable_count == c.stability.unstable_count) continue;
        const auto cp = bisect_stability(map, a, c, options.orbit);
        if (cp && cp->kind == kind) {
            CriticalPoint out = *cp;
            out.branch_id = branch.id;
            return out;
        }
    }
    if (kind == CriticalKind::Snb && branch.period_mult == 1 && !branch.points.empty() &&
        !is_dc(branch.points.front().orbit)) {
        double lo = 1.0, hi = 0.0;
        for (const auto& p : branch.points) {
            lo = std::min(lo, p.orbit.duties[0]);
            hi = std::max(hi, p.orbit.duties[0]);
        }
        lo = std::max(0.002, lo - options.branch_jump);
        hi = std::min(0.998, hi + options.branch_jump);
        const DutyCurve curve = duty_curve(map, options.duty_curve_points, lo, hi);
        const auto folds = switched_folds(map, curve, options.orbit);
        const CriticalPoint* best = nullptr;
        for (const auto& f : folds) {
            const double end_gap = std::min(std::abs(f.v_r - branch.points.front().v_r),
                                            std::abs(f.v_r - branch.points.back().v_r));
            if (!best || end_gap < std::min(std::abs(best->v_r - branch.points.front().v_r),
                                            std::abs(best->v_r - branch.points.back().v_r))) {
                best = &f;
            }
        }
        if (best) {
            CriticalPoint out = *best;
            out.branch_id = branch.id;
            return out;
        }
    }
    throw NoBracketError(std::string("no ") + to_string(kind) + " crossing on branch " + std::to_string(branch.id));
}

void write_branches_csv(std::ostream& os, const BifurcationDiagram& diagram) {
    const auto& labels = diagram.state_labels;
    os << "branch_id,origin,period,v_r,duty,duty_2";
    for (const auto& l : labels) os << ',' << l;
    os << ",classification,unstable_count,max_abs";
    for (std::size_t i = 1; i <= labels.size(); ++i) os << ",lambda" << i << "_re,lambda" << i << "_im";
    os << '\n';
    for (const Branch& b : diagram.branches) {
        for (const BranchPoint& p : b.points) {
            const Orbit& o = p.orbit;
            os << b.id << ',' << b.origin << ',' << b.period_mult << ',' << format_number(p.v_r) << ','
               << format_number(o.duties[0]) << ',' << (o.duties.size() > 1 ? format_number(o.duties[1]) : "");
            for (Eigen::Index i = 0; i < o.x_star.size(); ++i) os << ',' << format_number(o.x_star(i));
            os << ',' << to_string(o.stability.classification) << ',' << o.stability.unstable_count << ','
               << format_number(o.max_abs_multiplier());
            for (std::size_t i = 0; i < labels.size(); ++i) {
                if (i < o.multipliers.size()) {
                    os << ',' << format_number(o.multipliers[i].real()) << ','
                       << format_number(o.multipliers[i].imag());
                } else {
                    os << ",,";
                }
            }
            os << '\n';
        }
    }
}

void write_critical_csv(std::ostream& os, const BifurcationDiagram& diagram) {
    os << "kind,v_r,duty,branch_id,other_branch_id";
    for (const auto& l : diagram.state_labels) os << ',' << l;
    os << '\n';
    for (const CriticalPoint& c : diagram.critical_points) {
        os << to_string(c.kind) << ',' << format_number(c.v_r) << ',' << format_number(c.duty) << ',' << c.branch_id
           << ',' << c.other_branch_id;
        for (Eigen::Index i = 0; i < c.state.size(); ++i) os << ',' << format_number(c.state(i));
        os << '\n';
    }
}

void export_diagram(const BifurcationDiagram& diagram, const std::filesystem::path& dir, const std::string& run_id) {
    std::ostringstream branches, critical;
    write_branches_csv(branches, diagram);
    write_critical_csv(critical, diagram);
    write_text_file(dir / (run_id + "_branches.csv"), branches.str());
    write_text_file(dir / (run_id + "_critical.csv"), critical.str());
}

}  // namespace boostfold
