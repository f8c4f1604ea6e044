#include <benchmark/benchmark.h>

#include "qfilt/amplify.hpp"
#include "qfilt/filter.hpp"
#include "qfilt/hamiltonians.hpp"
#include "qfilt/jordan.hpp"
#include "qfilt/operators.hpp"
#include "qfilt/rng.hpp"
#include "qfilt/switch_circuit.hpp"

namespace {

using namespace qfilt;

void BM_MomentumOverlapGrid(benchmark::State& state) {
  const int k = static_cast<int>(state.range(0));
  for (auto _ : state) {
    Complex acc{0.0, 0.0};
    for (int i = 0; i < 10000; ++i) acc += momentum_overlap(i / 10000.0, 0.37, k);
    benchmark::DoNotOptimize(acc);
  }
  state.SetItemsProcessed(state.iterations() * 10000);
}
BENCHMARK(BM_MomentumOverlapGrid)->Arg(4)->Arg(8);

void BM_FilteredState(benchmark::State& state) {
  const HermitianOperator h = build_random_two_local(3, 5);
  const auto normalized = normalize_spectrum(h);
  const FilterSpec spec = select_filter_params(0.25, 3, 0.5);
  const PhaseEstimation engine(normalized.first, spec.k, spec.eta);
  RngStream rng(11);
  const StateVector psi = random_state(RegisterLayout{3, 0, 0, 0, kDefaultQubitCap}, rng);
  for (auto _ : state) {
    StateVector out = engine.filtered_state(psi.amp, 0.4);
    benchmark::DoNotOptimize(out.amp.data());
  }
}
BENCHMARK(BM_FilteredState);

void BM_PreparePipeline(benchmark::State& state) {
  const HermitianOperator h = build_random_two_local(3, 5);
  std::uint64_t seed = 0;
  for (auto _ : state) {
    PreparationResult res = prepare_filtered_state(h, 0.3, 0.25, ++seed);
    benchmark::DoNotOptimize(res.report.q);
  }
}
BENCHMARK(BM_PreparePipeline);

void BM_JordanDecompose(benchmark::State& state) {
  const int dim = static_cast<int>(state.range(0));
  RngStream rng(3);
  const Projector q = random_projector(dim, dim / 3, rng);
  const Projector r = random_projector(dim, dim / 2, rng);
  for (auto _ : state) {
    JordanDecomposition d = jordan_decompose(q, r);
    benchmark::DoNotOptimize(d.blocks.data());
  }
}
BENCHMARK(BM_JordanDecompose)->Arg(16)->Arg(64);

void BM_GFilterEnumeration(benchmark::State& state) {
  const int k = static_cast<int>(state.range(0));
  for (auto _ : state) {
    double g = g_filter(0.45, 0.5, k);
    benchmark::DoNotOptimize(g);
  }
}
BENCHMARK(BM_GFilterEnumeration)->Arg(13)->Arg(17)->Arg(21);

void BM_SwitchForward(benchmark::State& state) {
  const int k = static_cast<int>(state.range(0));
  RngStream rng(9);
  const Projector q = random_projector(4, 2, rng);
  const Projector r = random_projector(4, 2, rng);
  const SwitchCircuit circuit(q.matrix, r.matrix, 2, 0, k);
  const StateVector input = random_state(circuit.layout(), rng);
  for (auto _ : state) {
    StateVector s = input;
    circuit.apply_forward(s);
    benchmark::DoNotOptimize(s.amp.data());
  }
}
BENCHMARK(BM_SwitchForward)->Arg(5)->Arg(9);

}  // namespace

BENCHMARK_MAIN();
