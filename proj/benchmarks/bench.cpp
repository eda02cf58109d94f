#include <benchmark/benchmark.h>

#include <filesystem>

#include <brunesynth/foster.hpp>
#include <brunesynth/io.hpp>
#include <brunesynth/quant.hpp>
#include <brunesynth/response.hpp>

using namespace brunesynth;

namespace {

const std::filesystem::path kData = BRUNESYNTH_BENCH_DATA_DIR;

const PoleResidueModel& table1() {
    static const auto m = io::load_model(kData / "table1.json");
    return m;
}

const BruneCircuit& table2() {
    static const auto c = io::load_circuit(kData / "table2.json");
    return c;
}

JunctionParams junction(double L_J) {
    JunctionParams jp;
    jp.L_J = L_J;
    return jp;
}

void BM_ToRational(benchmark::State& st) {
    for (auto _ : st) benchmark::DoNotOptimize(to_rational(table1()));
}
BENCHMARK(BM_ToRational)->Unit(benchmark::kMillisecond);

void BM_CheckPr(benchmark::State& st) {
    for (auto _ : st) benchmark::DoNotOptimize(check_pr(table1()));
}
BENCHMARK(BM_CheckPr)->Unit(benchmark::kMillisecond);

void BM_SynthesizeTable1(benchmark::State& st) {
    for (auto _ : st) benchmark::DoNotOptimize(synthesize(table1()));
}
BENCHMARK(BM_SynthesizeTable1)->Unit(benchmark::kMillisecond)->Iterations(3);

void BM_BuildFoster(benchmark::State& st) {
    for (auto _ : st) benchmark::DoNotOptimize(build_foster(table1()));
}
BENCHMARK(BM_BuildFoster);

void BM_LadderDouble(benchmark::State& st) {
    const cdouble s(0, 42.0);
    for (auto _ : st) benchmark::DoNotOptimize(ladder_impedance(table2(), s));
}
BENCHMARK(BM_LadderDouble);

void BM_LadderExtended(benchmark::State& st) {
    const auto c = to_ext(table2());
    const Complex s(Real(0), Real(42));
    for (auto _ : st) benchmark::DoNotOptimize(ladder_impedance(c, s));
}
BENCHMARK(BM_LadderExtended);

void BM_EvaluateModel(benchmark::State& st) {
    const cdouble s(0, 42.0);
    for (auto _ : st) benchmark::DoNotOptimize(evaluate(table1(), s));
}
BENCHMARK(BM_EvaluateModel);

void BM_QubitPoleModel(benchmark::State& st) {
    const auto z = make_impedance(table1());
    for (auto _ : st) benchmark::DoNotOptimize(find_qubit_pole(z, 4.5, 6.7));
}
BENCHMARK(BM_QubitPoleModel);

void BM_SweepBrune(benchmark::State& st) {
    const auto z = make_impedance(table2());
    SweepOptions opt;
    opt.anchor_LJ = 4.5;
    for (auto _ : st) benchmark::DoNotOptimize(sweep_LJ(z, default_lj_grid(), opt));
}
BENCHMARK(BM_SweepBrune)->Unit(benchmark::kMillisecond);

void BM_BuildSystem(benchmark::State& st) {
    for (auto _ : st) benchmark::DoNotOptimize(build_system(table2(), junction(4.5)));
}
BENCHMARK(BM_BuildSystem);

void BM_ModesAndRates(benchmark::State& st) {
    const auto sys = build_system(table2(), junction(4.5));
    for (auto _ : st) benchmark::DoNotOptimize(relaxation_rates(sys));
}
BENCHMARK(BM_ModesAndRates);

void BM_TransformationOracle(benchmark::State& st) {
    BruneCircuit c = table2();
    c.stages.resize(4);  // regular stages only
    auto jp = junction(4.5);
    jp.C_J = 1e-6;
    for (auto _ : st) benchmark::DoNotOptimize(build_system_via_transformations(c, jp, 1e-6));
}
BENCHMARK(BM_TransformationOracle);

}  // namespace

BENCHMARK_MAIN();
