// Microbenchmarks for the hot paths: gate application, exact hybrid energy,
// and measurement-plan construction.
#include <benchmark/benchmark.h>

#include "svqnhe/ansatz.hpp"
#include "svqnhe/driver.hpp"
#include "svqnhe/estimator.hpp"
#include "svqnhe/neural.hpp"
#include "svqnhe/pauli.hpp"
#include "svqnhe/qsim.hpp"

namespace {

using namespace svqnhe;

void BM_apply_h_layer(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    Statevector psi = Statevector::zero(n);
    for (auto _ : state) {
        for (int q = 0; q < n; ++q) apply_gate(psi, GateKind::H, q);
        benchmark::DoNotOptimize(psi.amps.data());
    }
    state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_apply_h_layer)->Arg(6)->Arg(10)->Arg(12);

void BM_apply_rzz_chain(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    Statevector psi = Statevector::zero(n);
    for (int q = 0; q < n; ++q) apply_gate(psi, GateKind::H, q);
    for (auto _ : state) {
        for (int q = 0; q + 1 < n; ++q) apply_gate(psi, GateKind::Rzz, q, q + 1, 0.37);
        benchmark::DoNotOptimize(psi.amps.data());
    }
    state.SetItemsProcessed(state.iterations() * (n - 1));
}
BENCHMARK(BM_apply_rzz_chain)->Arg(6)->Arg(10)->Arg(12);

void BM_hybrid_energy_exact(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const Hamiltonian h = build_j1j2_1d(n, 1.0, 0.6);
    SignAnsatz ansatz = build_sign_ansatz(n, chain_edges(n), 1);
    randomize_parameters(ansatz.circuit, 7);
    const Statevector psi = ansatz.circuit.simulate();
    const AmplitudeModel model = AmplitudeModel::create(n, {n, n}, OutputMode::NonNegative, 3);
    for (auto _ : state) {
        benchmark::DoNotOptimize(hybrid_energy_exact(psi, model, h).value);
    }
}
BENCHMARK(BM_hybrid_energy_exact)->Arg(6)->Arg(10);

void BM_build_measurement_plan(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const Hamiltonian h = build_j1j2_1d(n, 1.0, 0.6);
    const SignAnsatz ansatz = build_sign_ansatz(n, chain_edges(n), 1);
    const std::vector<WParamInfo> w = ansatz.w_params(1);
    for (auto _ : state) {
        benchmark::DoNotOptimize(build_measurement_plan(h, w).circuit_count());
    }
}
BENCHMARK(BM_build_measurement_plan)->Arg(6)->Arg(10)->Arg(12);

}  // namespace

BENCHMARK_MAIN();
