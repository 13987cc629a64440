#include <doctest.h>

#include <cmath>
#include <numeric>

#include "helpers.hpp"
#include "xplat/oracles.hpp"

using namespace xplat;

namespace {

RecordSet single_record(std::uint32_t platform, OutcomeTable table) {
  RecordSet r(platform);
  r.insert(RecordKey{platform, 0, 0, 0, ""}, std::move(table));
  return r;
}

RecordSet relabel(const RecordSet& records, std::uint32_t platform) {
  RecordSet out(platform);
  for (const auto& [key, table] : records.records()) {
    RecordKey k = key;
    k.platform = platform;
    out.insert(k, table);
  }
  return out;
}

PartCircuits zero_circuits(const CutPlan& plan) {
  PartCircuits out;
  for (int j = 0; j < plan.num_parts(); ++j) out.emplace_back(static_cast<int>(plan.part(j).global_qubits.size()));
  return out;
}

}  // namespace

TEST_SUITE("fidelity-estimators") {

TEST_CASE("hamming distance") {
  CHECK(hamming_distance("101", "101") == 0);
  CHECK(hamming_distance("00", "11") == 2);
  CHECK(hamming_distance("0110", "1110") == 1);
  CHECK(hamming_distance(std::uint64_t{0b0110}, std::uint64_t{0b1110}) == 1);
  CHECK_THROWS_AS(hamming_distance("01", "011"), DimensionError);
}

TEST_CASE("distance kernel matches the direct double sum") {
  Rng rng(2);
  std::vector<double> p(8), q(8);
  for (auto& v : p) v = rng.uniform();
  for (auto& v : q) v = rng.uniform();
  double direct = 0.0;
  for (std::uint64_t s = 0; s < 8; ++s)
    for (std::uint64_t t = 0; t < 8; ++t) direct += std::pow(-2.0, -hamming_distance(s, t)) * p[s] * q[t];
  CHECK(distance_pair_sum(p, q, 3) == doctest::Approx(direct).epsilon(1e-13));
}

TEST_CASE("aggregate_repetitions") {
  const std::vector<double> v{1.0, 2.0, 3.0, 4.0};
  const EstimateReport r = aggregate_repetitions(v, {});
  CHECK(r.value == doctest::Approx(2.5));
  CHECK(r.std_error == doctest::Approx(std::sqrt(5.0 / 3.0) / 2.0));
  CHECK(r.repetitions == 4);
  const EstimateReport back = EstimateReport::from_json(r.to_json());
  CHECK(back.value == r.value);
  CHECK(back.std_error == r.std_error);
}

TEST_CASE("distance estimator plug-in values") {
  const UnitaryEnsemble ens = shared_ensemble({1}, 1, 0);
  const auto p = single_record(1, make_exact_table(1, {1.0, 0.0}));
  const auto q = single_record(2, make_exact_table(1, {1.0, 0.0}));
  CHECK(distance_cp_estimate(p, q, ens, 1).value == doctest::Approx(2.0));
  const auto ph = single_record(1, make_exact_table(1, {0.5, 0.5}));
  const auto qh = single_record(2, make_exact_table(1, {0.5, 0.5}));
  CHECK(distance_cp_estimate(ph, qh, ens, 1).value == doctest::Approx(0.5));
  CHECK_THROWS_AS(distance_cp_estimate(p, q, shared_ensemble({1, 1}, 1, 0), 1), EstimationError);
}

TEST_CASE("distance estimator expectation over the local ensemble") {
  Rng rng(31);
  const CutPlan plan = chain_plan({3});
  const UnitaryEnsemble ens = test::exhaustive(plan);
  const auto configs = enumerate_global_configs(plan, cut_config_table());
  for (int trial = 0; trial < 3; ++trial) {
    const auto a = random_part_circuits(plan, 3, rng), b = random_part_circuits(plan, 3, rng);
    const auto p = test::exact_records(plan, a, 1, ens, configs), q = test::exact_records(plan, b, 2, ens, configs);
    const double overlap = overlap_trace(uncut_state(plan, a), uncut_state(plan, b));
    CHECK(distance_cp_estimate(p, q, ens, 3).value == doctest::Approx(overlap).epsilon(1e-10));
  }
}

TEST_CASE("collision estimator") {
  const auto p = single_record(1, make_count_table(1, {1, 0}));
  CHECK(collision_cp_estimate(p, single_record(2, make_count_table(1, {1, 0})), 1, 1).value == doctest::Approx(2.0));
  CHECK(collision_cp_estimate(p, single_record(2, make_count_table(1, {0, 1})), 1, 1).value == doctest::Approx(-1.0));

  const CutPlan plan = chain_plan({1});
  const PartCircuits id{Circuit(1)};
  const MeasurementScheme scheme = MeasurementScheme::global(mub_unitaries(1));
  const std::vector<CircuitSetting> settings{CircuitSetting{0, 0, ""}};
  const auto jobs = plan_jobs(settings, scheme, 0);
  const PlatformProgram program{plan, id, {}, {}};
  const auto rp = collect_records(program, scheme, 1, jobs, 0), rq = collect_records(program, scheme, 2, jobs, 0);
  CHECK(collision_cp_estimate(rp, rq, 3, 1).value == doctest::Approx(1.0).epsilon(1e-12));
  CHECK_THROWS_AS(collision_cp_estimate(rp, rq, 3, 5), EstimationError);
}

TEST_CASE("parallel single-cut estimator") {
  const CutConfigTable table = cut_config_table();
  CHECK(table.coefficient(3) * table.coefficient(3) == doctest::Approx(4.0));
  const CutCircuit g = ghz_cut_plan(5);
  const UnitaryEnsemble ens = test::exhaustive(g.plan);
  const auto configs = enumerate_global_configs(g.plan, table);
  const auto p = test::exact_records(g.plan, g.circuits, 1, ens, configs);
  const auto q = test::exact_records(g.plan, g.circuits, 2, ens, configs);
  const auto z = test::exact_records(g.plan, zero_circuits(g.plan), 2, ens, configs);

  const double same = parallel_single_cut_estimate(p, q, g.plan, table, ens).value;
  CHECK(same == doctest::Approx(1.0).epsilon(1e-10));
  const double cross = parallel_single_cut_estimate(p, z, g.plan, table, ens).value;
  CHECK(cross == doctest::Approx(0.5).epsilon(1e-10));
  const double swapped = parallel_single_cut_estimate(relabel(z, 1), relabel(p, 2), g.plan, table, ens).value;
  CHECK(std::abs(swapped - cross) < 1e-12);
  CHECK(std::abs(multi_cut_estimate(p, z, g.plan, table, ens, configs, configs).value - cross) < 1e-12);

  RecordSet partial(2);
  for (const auto& [key, t] : z.records())
    if (key.part == 0) partial.insert(key, t);
  CHECK_THROWS_AS(parallel_single_cut_estimate(p, partial, g.plan, table, ens), Error);
}

TEST_CASE("multi-cut estimator") {
  const CutConfigTable table = cut_config_table();
  CHECK(std::pow(table.weight_factor(), 2 * 2) == doctest::Approx(625.0));

  const CutCircuit g7 = ghz_chain({3, 3, 3});
  REQUIRE(g7.plan.n() == 7);
  const UnitaryEnsemble ens = shared_ensemble(g7.plan.output_sizes(), 4, 13);
  const auto configs = enumerate_global_configs(g7.plan, table);
  CHECK(configs.size() == 16);
  double weight_sum = 0.0;
  for (const auto& c : configs) weight_sum += c.weight;
  CHECK(weight_sum == doctest::Approx(1.0).epsilon(1e-12));

  // Oracle first, then the estimator on exact records of a random ensemble.
  CHECK(exact_estimator_expectation(chain_plan({2, 2, 3}), ghz_chain({2, 2, 3}).circuits, ghz_chain({2, 2, 3}).circuits,
                                    OracleEstimator::kDistance) == doctest::Approx(1.0).epsilon(1e-9));
  const auto ex = test::exhaustive(g7.plan);
  const auto p = test::exact_records(g7.plan, g7.circuits, 1, ex, configs);
  const auto q = test::exact_records(g7.plan, g7.circuits, 2, ex, configs);
  CHECK(multi_cut_estimate(p, q, g7.plan, table, ex, configs, configs).value == doctest::Approx(1.0).epsilon(1e-9));

  Rng rng(4);
  const auto sampled = sample_global_configs(g7.plan, table, 5, rng);
  CHECK(sampled.size() == 5);
  for (const auto& c : sampled) CHECK(std::abs(c.weight) == doctest::Approx(25.0 / 5.0));

  RecordSet missing(2);
  for (const auto& [key, t] : q.records())
    if (key.config != 0) missing.insert(key, t);
  CHECK_THROWS_AS(multi_cut_estimate(p, missing, g7.plan, table, ex, configs, configs), Error);
}

TEST_CASE("L-round sampled configurations average to the enumerated value") {
  const CutCircuit g = ghz_cut_plan(5);
  const CutConfigTable table = cut_config_table();
  const UnitaryEnsemble ens = test::exhaustive(g.plan);
  const auto all = enumerate_global_configs(g.plan, table);
  const auto p = test::exact_records(g.plan, g.circuits, 1, ens, all);
  const auto z = test::exact_records(g.plan, zero_circuits(g.plan), 2, ens, all);
  Rng rng(8);
  std::vector<double> values;
  for (int rep = 0; rep < 400; ++rep) {
    const auto cp = sample_global_configs(g.plan, table, 4, rng), cq = sample_global_configs(g.plan, table, 4, rng);
    values.push_back(multi_cut_estimate(p, z, g.plan, table, ens, cp, cq).value);
  }
  const EstimateReport r = aggregate_repetitions(values, {});
  CHECK(std::abs(r.value - 0.5) < 3.0 * r.std_error);
}

TEST_CASE("purity estimator") {
  const CutCircuit g = ghz_cut_plan(5);
  const CutConfigTable table = cut_config_table();
  const UnitaryEnsemble ens = test::exhaustive(g.plan);
  const auto configs = enumerate_global_configs(g.plan, table);
  const auto p = test::exact_records(g.plan, g.circuits, 1, ens, configs);
  Rng split(1);
  CHECK(purity_estimate(p, g.plan, table, ens, configs, split).value == doctest::Approx(1.0).epsilon(1e-10));

  // Full depolarization after every gate leaves I/2.
  const CutPlan one = chain_plan({1});
  const UnitaryEnsemble ens1 = test::exhaustive(one);
  const MeasurementScheme scheme = MeasurementScheme::local(ens1);
  const auto configs1 = enumerate_global_configs(one, table);
  const PlatformProgram noisy{one, {Circuit(1).h(0)}, {}, GateNoise{1.0}};
  const auto mixed = collect_records(noisy, scheme, 1, plan_jobs(required_settings(one, configs1), scheme, 0), 0);
  CHECK(purity_estimate(mixed, one, table, ens1, configs1, split).value == doctest::Approx(0.5).epsilon(1e-10));

  const auto shots = collect_records(noisy, scheme, 1, plan_jobs(required_settings(one, configs1), scheme, 1), 0);
  CHECK_THROWS_AS(purity_estimate(shots, one, table, ens1, configs1, split), EstimationError);
}

TEST_CASE("cross-platform fidelity") {
  const auto est = [](double v, double se = 0.0) { return EstimateReport{v, se, {}, 1}; };
  CHECK(cross_platform_fidelity(est(1), est(1), est(1)).value == doctest::Approx(1.0));
  CHECK(cross_platform_fidelity(est(0.5), est(1), est(0.5)).value == doctest::Approx(0.7071).epsilon(1e-4));
  CHECK_THROWS_AS(cross_platform_fidelity(est(0.3), est(0), est(1)), EstimationError);
  const EstimateReport f = cross_platform_fidelity(est(0.9, 0.01), est(1.0, 0.0), est(1.0, 0.0));
  CHECK(f.std_error == doctest::Approx(0.01));
}

TEST_CASE("pure-state fidelity from stabilizers") {
  const CutCircuit g = ghz_cut_plan(5);
  const CutConfigTable table = cut_config_table();
  const StabilizerGroup group = ghz_stabilizers(5);
  const auto configs = enumerate_global_configs(g.plan, table);
  const MeasurementScheme scheme = MeasurementScheme::stabilizer(group);
  const auto jobs = plan_jobs(required_settings(g.plan, configs), scheme, 0);
  std::vector<int> all(32);
  std::iota(all.begin(), all.end(), 0);
  const auto ideal = collect_records(PlatformProgram{g.plan, g.circuits, {}, {}}, scheme, 1, jobs, 0);
  CHECK(pure_state_fidelity_estimate(ideal, g.plan, table, group, all, configs).value == doctest::Approx(1.0).epsilon(1e-10));
  const auto zero = collect_records(PlatformProgram{g.plan, zero_circuits(g.plan), {}, {}}, scheme, 1, jobs, 0);
  CHECK(pure_state_fidelity_estimate(zero, g.plan, table, group, all, configs).value == doctest::Approx(0.5).epsilon(1e-10));
  const std::vector<int> identity_only{0};
  CHECK(pure_state_fidelity_estimate(zero, g.plan, table, group, identity_only, configs).value ==
        doctest::Approx(1.0).epsilon(1e-12));
  const std::vector<int> out_of_range{40};
  CHECK_THROWS_AS(pure_state_fidelity_estimate(zero, g.plan, table, group, out_of_range, configs), Error);
}

TEST_CASE("Pauli tomography from shared records") {
  const CutCircuit g = ghz_cut_plan(5);
  const CutConfigTable table = cut_config_table();
  const auto configs = enumerate_global_configs(g.plan, table);
  const UnitaryEnsemble ens = test::exhaustive(g.plan);
  const MeasurementScheme scheme = MeasurementScheme::local(ens);
  const auto jobs = plan_jobs(required_settings(g.plan, configs), scheme, 2000);
  const auto records = collect_records(PlatformProgram{g.plan, g.circuits, {}, {}}, scheme, 1, jobs, 3);
  const std::vector<PauliString> paulis{PauliString::parse("ZZIII"), PauliString::parse("XXXXX"),
                                        PauliString::parse("IIZIZ")};
  const TomographyResult t = pauli_tomography(records, g.plan, table, ens, configs, paulis, test::ghz(5));
  REQUIRE(t.estimated == 3);
  CHECK(*t.estimates[0] == doctest::Approx(1.0).epsilon(0.15));
  CHECK(*t.estimates[1] == doctest::Approx(1.0).epsilon(0.15));
  CHECK(t.exact[2] == doctest::Approx(1.0));
  CHECK(t.mse < 0.02);

  const auto exact = test::exact_records(g.plan, g.circuits, 1, ens, configs);
  std::vector<PauliString> first64;
  for (std::uint64_t i = 0; i < 64; ++i) first64.push_back(quaternary_pauli(i, 5));
  const TomographyResult e = pauli_tomography(exact, g.plan, table, ens, configs, first64, test::ghz(5));
  CHECK(e.estimated == 64);
  CHECK(e.mse < 1e-20);
}

}  // TEST_SUITE
