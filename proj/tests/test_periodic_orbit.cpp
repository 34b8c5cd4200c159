#include <gtest/gtest.h>

#include <sstream>

#include <boostfold/averaged.hpp>
#include <boostfold/bifurcation.hpp>
#include <boostfold/errors.hpp>
#include <boostfold/periodic_orbit.hpp>

#include "test_support.hpp"

using namespace boostfold;
using namespace testing_support;

namespace {

Orbit from_averaged(const ConverterParams& p, double v_r, double duty_hint) {
    const SwitchedModel m = build_model(p);
    double best = -1;
    for (double d : averaged::duty_solutions(p, v_r)) {
        if (best < 0 || std::abs(d - duty_hint) < std::abs(best - duty_hint)) best = d;
    }
    const auto ss = averaged::steady_state(p, best);
    const CycleMap map(m);
    return find_periodic_orbit(map, v_r, OrbitSeed{compose_state(m, ss.i_L, ss.v_C, best, v_r), {best}});
}

double min_real_multiplier(const Orbit& o) {
    double m = 1e300;
    for (const auto& l : o.multipliers) {
        if (std::abs(l.imag()) < 1e-9) m = std::min(m, l.real());
    }
    return m;
}

}  // namespace

TEST(ClassifyStability, Definitions) {
    using C = std::complex<double>;
    const auto a = classify_stability({C(0.5), C(0.3)});
    EXPECT_EQ(a.classification, OrbitClass::Stable);
    EXPECT_EQ(a.tag, BifurcationTag::None);

    const auto b = classify_stability({C(1.001), C(0.4)});
    EXPECT_EQ(b.classification, OrbitClass::Unstable);
    EXPECT_EQ(b.unstable_count, 1);
    EXPECT_EQ(b.tag, BifurcationTag::SnbProximal);

    const auto c = classify_stability({std::polar(0.98, 0.7), std::polar(0.98, -0.7)});
    EXPECT_EQ(c.classification, OrbitClass::Stable);
    EXPECT_EQ(c.tag, BifurcationTag::NeimarkProximal);

    const auto d = classify_stability({C(-1.01), C(0.2)});
    EXPECT_EQ(d.classification, OrbitClass::Unstable);
    EXPECT_EQ(d.tag, BifurcationTag::PdbProximal);

    EXPECT_EQ(classify_stability({C(0.95)}, 0.1).classification, OrbitClass::Unstable);
}

TEST(StroboscopicMap, FixedPointAndSimulationAgree) {
    const SwitchedModel m = build_model(example1());
    const Orbit o = from_averaged(example1(), 7.0, 0.74);
    ASSERT_TRUE(o.converged) << o.failure;
    const CycleMap map(m);
    EXPECT_LE(m.normalized_norm(stroboscopic_map(map, 7.0, o.x_star) - o.x_star), 1e-10);

    const Eigen::Vector2d x(5.0, 6.0);
    EXPECT_EQ(stroboscopic_map(map, 7.0, x), simulate_cycles(m, x, 7.0, 1).clock_states.back());
}

TEST(StroboscopicMap, LinearAwayFromGrazing) {
    const SwitchedModel m = build_model(example1());
    const Orbit o = from_averaged(example1(), 4.0, 0.4);
    const CycleMap map(m);
    const Eigen::VectorXd base = stroboscopic_map(map, 4.0, o.x_star);
    const Eigen::Vector2d delta(1e-5, -2e-5);
    const Eigen::VectorXd full = stroboscopic_map(map, 4.0, o.x_star + delta) - base;
    const Eigen::VectorXd half = stroboscopic_map(map, 4.0, o.x_star + delta / 2) - base;
    EXPECT_LT((full - 2.0 * half).norm(), 1e-3 * full.norm());
}

TEST(FindOrbit, Example1LowerFromAveragedSeed) {
    const Orbit o = from_averaged(example1(), 7.0, 0.74);
    ASSERT_TRUE(o.converged) << o.failure;
    EXPECT_NEAR(o.duties[0], 0.74, 0.01);
    EXPECT_EQ(o.stability.classification, OrbitClass::Unstable);
    EXPECT_LE(o.residual, 1e-10);
    EXPECT_EQ(o.multipliers.size(), 2u);
}

TEST(FindOrbit, Example1UpperIsSaddle) {
    const Orbit o = from_averaged(example1(), 7.0, 0.81);
    ASSERT_TRUE(o.converged) << o.failure;
    EXPECT_NEAR(o.duties[0], 0.81, 0.01);
    ASSERT_EQ(o.multipliers.size(), 2u);
    EXPECT_EQ(o.multipliers[0].imag(), 0.0);
    EXPECT_GT(o.multipliers[0].real(), 1.0);
    EXPECT_LT(std::abs(o.multipliers[1]), 1.0);
    EXPECT_EQ(o.stability.unstable_count, 1);
    // Saddle character matches the averaged poles: one positive, one negative real pole.
    const auto s = averaged::averaged_poles(example1(), o.duties[0]);
    EXPECT_GT(s[0].real(), 0.0);
    EXPECT_LT(s[1].real(), 0.0);
}

TEST(FindOrbit, Example2CoexistingOrbits) {
    const Orbit hi = from_averaged(example2(), 30.3, 0.87);
    ASSERT_TRUE(hi.converged) << hi.failure;
    EXPECT_NEAR(hi.duties[0], 0.87, 0.005);
    EXPECT_EQ(hi.stability.classification, OrbitClass::Unstable);
    EXPECT_EQ(hi.multipliers.size(), 5u);

    const Orbit lo = from_averaged(example2(), 30.3, 0.80);
    ASSERT_TRUE(lo.converged) << lo.failure;
    EXPECT_NEAR(lo.duties[0], 0.80, 0.005);
    EXPECT_EQ(lo.stability.classification, OrbitClass::Stable);
    for (const auto& l : lo.multipliers) EXPECT_LT(std::abs(l), 1.0);
}

TEST(FindOrbit, Example3PeriodTwo) {
    const SwitchedModel m = build_model(example3());
    const Trajectory t = simulate_cycles(m, default_initial_state(m, 8.4), 8.4, 3000);
    const Orbit o = find_periodic_orbit(m, 8.4, t.clock_states.back(), 2);
    ASSERT_TRUE(o.converged) << o.failure;
    ASSERT_EQ(o.duties.size(), 2u);
    EXPECT_GT(std::abs(o.duties[0] - o.duties[1]), 0.1);
    EXPECT_LE(o.residual, 1e-10);
    EXPECT_EQ(o.stability.classification, OrbitClass::Stable);
}

TEST(FindOrbit, SaturatedSeedGivesDcOrbit) {
    const Orbit o = find_periodic_orbit(build_model(example1()), 5.5, Eigen::Vector2d(29.0, 0.1));
    EXPECT_EQ(o.stability.classification, OrbitClass::SaturatedDc);
    EXPECT_NEAR(o.x_star(0), 30.0, 1e-9);
    EXPECT_NEAR(o.x_star(1), 0.0, 1e-9);
    for (const auto& l : o.multipliers) EXPECT_LT(std::abs(l), 1.0);
}

TEST(FindOrbit, ReportsNonConvergence) {
    OrbitOptions opt;
    opt.max_iterations = 3;
    opt.newton_tol = 1e-300;
    const Orbit o = find_periodic_orbit(CycleMap(build_model(example1())), 4.0, OrbitSeed{Eigen::Vector2d(1.0, 1.0), {0.4}}, 1, opt);
    EXPECT_FALSE(o.converged);
    EXPECT_FALSE(o.failure.empty());
    EXPECT_EQ(o.x_star.size(), 2);
}

TEST(FindOrbit, RejectsNonFiniteSeed) {
    EXPECT_THROW(find_periodic_orbit(build_model(example1()), 4.0, Eigen::Vector2d(NAN, 1.0)), DomainError);
}

TEST(FindOrbit, QuadraticConvergence) {
    for (const auto& [p, v_r, d] : {std::tuple{example1(), 4.0, 0.4}, std::tuple{example2(), 30.3, 0.8},
                                    std::tuple{example3(), 7.0, 0.45}}) {
        const SwitchedModel m = build_model(p);
        const auto ss = averaged::steady_state(p, d);
        const Eigen::VectorXd seed = compose_state(m, ss.i_L, ss.v_C, d, v_r) * 1.01;
        const Orbit o = find_periodic_orbit(CycleMap(m), v_r, OrbitSeed{seed, {d}});
        ASSERT_TRUE(o.converged) << o.failure;
        const auto& h = o.residual_history;
        bool quadratic = false;
        for (std::size_t k = 0; k + 1 < h.size(); ++k) {
            if (h[k] < 1e-2 && h[k] > 1e-9 && h[k + 1] <= 10.0 * h[k] * h[k]) quadratic = true;
        }
        EXPECT_TRUE(quadratic) << scheme_name(p.scheme);
    }
}

TEST(FindOrbit, DutyConsistentWithAveragedRelation) {
    const ConverterParams p = example1();
    for (double v_r : {3.5, 4.5, 5.5, 6.5}) {
        const Orbit o = from_averaged(p, v_r, 0.3);
        ASSERT_TRUE(o.converged);
        EXPECT_NEAR(averaged::vr_of_duty(p, o.duties[0]), v_r, 0.01 * v_r);
    }
}

TEST(Floquet, StepHalvingStable) {
    for (const auto& [p, v_r, d] : {std::tuple{example1(), 4.5, 0.4}, std::tuple{example2(), 30.3, 0.8},
                                    std::tuple{example3(), 7.0, 0.45}, std::tuple{example1(), 7.0, 0.81}}) {
        const Orbit o = from_averaged(p, v_r, d);
        ASSERT_TRUE(o.converged);
        const CycleMap map(build_model(p));
        const auto a = floquet_multipliers(map, o, 1.0);
        const auto b = floquet_multipliers(map, o, 0.5);
        ASSERT_EQ(a.size(), b.size());
        for (std::size_t i = 0; i < a.size(); ++i) {
            EXPECT_LE(std::abs(a[i] - b[i]), 1e-4 * std::abs(a[i])) << scheme_name(p.scheme) << " " << i;
        }
    }
}

TEST(Floquet, AveragedCorrespondenceAtHighFrequency) {
    const ConverterParams p = example1(6e6);
    const CycleMap map(build_model(p));
    for (double d : {0.3, 0.45, 0.6}) {
        const Orbit o = orbit_at_duty(map, d);
        ASSERT_TRUE(o.converged);
        const auto s = averaged::averaged_poles(p, d);
        std::vector<std::complex<double>> want = {std::exp(s[0] * map.model().T), std::exp(s[1] * map.model().T)};
        std::sort(want.begin(), want.end(), [](auto a, auto b) { return std::abs(a) > std::abs(b); });
        for (int i = 0; i < 2; ++i) {
            // Pair by magnitude, compare up to conjugation.
            const double err = std::min(std::abs(o.multipliers[i] - want[i]), std::abs(o.multipliers[i] - std::conj(want[i])));
            EXPECT_LE(err, 0.05 * std::abs(want[i])) << "D = " << d;
        }
    }
}

TEST(Floquet, PeriodDoublingNearExample3) {
    const ConverterParams p = example3();
    const Orbit before = from_averaged(p, 8.0, 0.5);
    const Orbit after = from_averaged(p, 8.5, 0.5);
    ASSERT_TRUE(before.converged);
    ASSERT_TRUE(after.converged);
    EXPECT_GT(min_real_multiplier(before), -1.0);
    EXPECT_LT(min_real_multiplier(after), -1.0);
}

TEST(Floquet, GrazingSignalled) {
    const CycleMap map(build_model(example1()));
    Orbit o = from_averaged(example1(), 4.0, 0.4);
    o.duties = {1e-7};
    EXPECT_THROW(floquet_multipliers(map, o), GrazingError);
}

TEST(DcOrbit, ExistsOnlyWhenComparatorNeverTrips) {
    const CycleMap map(build_model(example1()));
    const auto dc = dc_orbit(map, 5.0);
    ASSERT_TRUE(dc);
    EXPECT_EQ(dc->stability.classification, OrbitClass::SaturatedDc);
    EXPECT_LE(dc->residual, 1e-12);
    EXPECT_FALSE(dc_orbit(map, 0.4));
    EXPECT_FALSE(dc_orbit(CycleMap(build_model(example1(600e3, 0.0))), 5.0));
}

TEST(OrbitCsv, Layout) {
    const Orbit o = from_averaged(example1(), 7.0, 0.74);
    std::ostringstream os;
    write_orbits_csv(os, {o, o}, {"i_L", "v_C"});
    const std::string s = os.str();
    EXPECT_EQ(s.substr(0, s.find('\n')),
              "period,v_r,classification,unstable_count,tag,residual,i_L,v_C,duties,lambda1_re,lambda1_im,lambda2_re,"
              "lambda2_im");
    EXPECT_EQ(std::count(s.begin(), s.end(), '\n'), 3);
}
