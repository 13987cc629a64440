#include <benchmark/benchmark.h>

#include "xplat/estimators.hpp"
#include "xplat/kernel.hpp"
#include "xplat/platform.hpp"

using namespace xplat;

namespace {

void BM_GhzStatevector(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  Circuit c(n);
  c.h(0);
  for (int q = 0; q + 1 < n; ++q) c.cnot(q, q + 1);
  for (auto _ : state) benchmark::DoNotOptimize(run_circuit(c, QuantumState::zero(n)));
}
BENCHMARK(BM_GhzStatevector)->DenseRange(5, 11, 2);

void BM_DistancePairSum(benchmark::State& state) {
  const int bits = static_cast<int>(state.range(0));
  Rng rng(1);
  std::vector<double> p(std::size_t{1} << bits), q(p.size());
  for (auto& v : p) v = rng.uniform();
  for (auto& v : q) v = rng.uniform();
  for (auto _ : state) benchmark::DoNotOptimize(distance_pair_sum(p, q, bits));
}
BENCHMARK(BM_DistancePairSum)->DenseRange(4, 12, 4);

void BM_SampleTwoQubitClifford(benchmark::State& state) {
  Rng rng(2);
  sample_k_clifford(2, rng);
  for (auto _ : state) benchmark::DoNotOptimize(sample_k_clifford(2, rng));
}
BENCHMARK(BM_SampleTwoQubitClifford);

void BM_CollectRecords(benchmark::State& state) {
  const CutCircuit g = ghz_cut_plan(static_cast<int>(state.range(0)));
  const MeasurementScheme scheme = MeasurementScheme::local(shared_ensemble(g.plan.output_sizes(), 10, 3));
  const auto configs = enumerate_global_configs(g.plan, cut_config_table());
  const auto jobs = plan_jobs(required_settings(g.plan, configs), scheme, 1000);
  const PlatformProgram program{g.plan, g.circuits, {}, {}};
  for (auto _ : state) benchmark::DoNotOptimize(collect_records(program, scheme, 1, jobs, 42));
}
BENCHMARK(BM_CollectRecords)->Arg(5)->Arg(9)->Unit(benchmark::kMillisecond);

void BM_MultiCutEstimate(benchmark::State& state) {
  const CutCircuit g = ghz_cut_plan(static_cast<int>(state.range(0)));
  const CutConfigTable table = cut_config_table();
  const UnitaryEnsemble ens = shared_ensemble(g.plan.output_sizes(), 10, 3);
  const MeasurementScheme scheme = MeasurementScheme::local(ens);
  const auto configs = enumerate_global_configs(g.plan, table);
  const auto jobs = plan_jobs(required_settings(g.plan, configs), scheme, 1000);
  const PlatformProgram program{g.plan, g.circuits, {}, {}};
  const RecordSet p = collect_records(program, scheme, 1, jobs, 42), q = collect_records(program, scheme, 2, jobs, 42);
  for (auto _ : state) benchmark::DoNotOptimize(multi_cut_estimate(p, q, g.plan, table, ens, configs, configs));
}
BENCHMARK(BM_MultiCutEstimate)->Arg(5)->Arg(9)->Unit(benchmark::kMillisecond);

void BM_SvrTrain(benchmark::State& state) {
  const PhaseDataset data = build_phase_dataset(phase_h_grid(), IsingSpec{}, nullptr);
  const KernelMatrix k = exact_kernel(data.ground_states);
  for (auto _ : state) benchmark::DoNotOptimize(svr_train(k.values, data.y));
}
BENCHMARK(BM_SvrTrain)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
