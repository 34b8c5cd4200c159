#include <benchmark/benchmark.h>

#include <boostfold/bifurcation.hpp>
#include <boostfold/periodic_orbit.hpp>
#include <boostfold/propagator.hpp>
#include <boostfold/switched_sim.hpp>

using namespace boostfold;

namespace {

ConverterParams example1() {
    ConverterParams p;
    p.v_s = 3.0;
    p.V_h = 1.0;
    p.f_s = 600e3;
    p.L = 1e-6;
    p.C = 100e-6;
    p.R = 2.0;
    p.r = 0.1;
    p.scheme = Pvmc{2.0};
    return p;
}

ConverterParams example2() {
    ConverterParams p;
    p.v_s = 10.0;
    p.V_h = 2.0;
    p.f_s = 300e3;
    p.L = 46.6e-6;
    p.C = 3e-3;
    p.R = 23.0;
    p.R_c = 0.018;
    p.r = 0.6;
    p.scheme = VmcType3{35.59, 556.0, 549.0, 25510.0, 19495.0};
    return p;
}

void BM_StageAdvance(benchmark::State& state) {
    const SwitchedModel m = build_model(state.range(0) == 2 ? example1() : example2());
    const StagePropagator prop(m.A(Stage::S1), m.B(Stage::S1));
    Eigen::VectorXd x = Eigen::VectorXd::Ones(m.n);
    const Eigen::Vector2d u = m.input(1.0);
    double dt = 0.0;
    for (auto _ : state) {
        dt = dt > m.T ? 1e-9 : dt + 1e-9;
        benchmark::DoNotOptimize(prop.advance(x, u, dt));
    }
}
BENCHMARK(BM_StageAdvance)->Arg(2)->Arg(5);

void BM_StroboscopicMap(benchmark::State& state) {
    const SwitchedModel m = build_model(example1());
    const CycleMap map(m);
    const Eigen::VectorXd x = periodic_state_at_duty(map, 0.4).x;
    for (auto _ : state) benchmark::DoNotOptimize(stroboscopic_map(map, 4.0, x));
}
BENCHMARK(BM_StroboscopicMap);

void BM_FindOrbit(benchmark::State& state) {
    const SwitchedModel m = build_model(example2());
    const CycleMap map(m);
    const DutyOrbit seed = periodic_state_at_duty(map, 0.8);
    for (auto _ : state) benchmark::DoNotOptimize(find_periodic_orbit(map, seed.v_r + 0.1, OrbitSeed{seed.x, {0.8}}));
}
BENCHMARK(BM_FindOrbit)->Unit(benchmark::kMicrosecond);

void BM_Sweep(benchmark::State& state) {
    const SwitchedModel m = build_model(example1());
    SweepOptions o;
    o.jobs = 1;
    for (auto _ : state) benchmark::DoNotOptimize(sweep(m, 3.0, 8.0, static_cast<int>(state.range(0)), o));
}
BENCHMARK(BM_Sweep)->Arg(26)->Arg(101)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
