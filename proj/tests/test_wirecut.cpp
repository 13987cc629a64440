#include <doctest.h>

#include <cmath>
#include <numeric>
#include <sstream>

#include "helpers.hpp"
#include "xplat/wirecut.hpp"

using namespace xplat;

namespace {

CMatrix single(double a, double b) {
  CMatrix m = CMatrix::Zero(2, 2);
  m(0, 0) = a;
  m(1, 1) = b;
  return m;
}

}  // namespace

TEST_SUITE("wirecut-engine") {

TEST_CASE("phi channels") {
  const auto [phi0, phi1] = phi_channels(1);
  CHECK((phi0.apply(single(1, 0)) - single(2.0 / 3.0, 1.0 / 3.0)).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((phi0.apply(single(0.5, 0.5)) - single(0.5, 0.5)).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((phi1.apply(single(1, 0)) - single(0.5, 0.5)).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(phi0.max_abs_diff(clifford_measure_prepare_average(1)) < 1e-12);
  CHECK_THROWS_AS(phi_channels(3), InvalidArgument);
}

TEST_CASE("identity reconstruction") {
  CHECK(identity_reconstruction_check(1) < 1e-12);
  CHECK(identity_reconstruction_check(2) < 1e-12);
  const auto [phi0, phi1] = phi_channels(2);
  const ChannelMatrix rebuilt = 5.0 * phi0 - 4.0 * phi1;
  Rng rng(1);
  const CMatrix rho = random_pure_state(2, rng).density_matrix();
  CHECK((rebuilt.apply(rho) - rho).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("Bernoulli masses of the cut table") {
  const CutConfigTable t = cut_config_table();
  double z0 = 0.0, z1 = 0.0, signed_sum = 0.0;
  for (int e = 0; e < t.size(); ++e) {
    (t.entries[e].z == 0 ? z0 : z1) += t.entries[e].probability;
    signed_sum += t.coefficient(e);
  }
  CHECK(z1 == doctest::Approx(2.0 / 5.0).epsilon(1e-15));
  CHECK(z0 == doctest::Approx(3.0 / 5.0).epsilon(1e-15));
  CHECK(signed_sum == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("configuration counts") {
  CHECK(enumerate_configurations(chain_plan({2, 2})).size() == 12);
  CHECK(enumerate_configurations(chain_plan({2, 2, 2})).size() == 44);
  CHECK(enumerate_configurations(chain_plan({2, 2, 2, 2})).size() == 76);
  CHECK(enumerate_configurations(chain_plan({3, 2, 2, 2, 3})).size() == 108);
  CHECK(part_configurations(chain_plan({2, 2}), 0).size() == 4);
  CHECK(part_configurations(chain_plan({2, 2}), 1).size() == 8);
  CHECK(part_configurations(chain_plan({2, 2, 2}), 1).size() == 32);
  CutPlan star(5, {PartLayout{{0, 1, 2}}, PartLayout{{1, 3}}, PartLayout{{2, 4}}}, {Cut{0, 1, 1, 0}, Cut{0, 2, 2, 0}});
  CHECK_FALSE(star.is_chain());
  CHECK_THROWS_AS(enumerate_configurations(star), Error);
}

TEST_CASE("part config encoding round-trips") {
  const CutPlan plan = chain_plan({2, 3, 2});
  for (std::uint32_t id = 0; id < 16; ++id) CHECK(encode_part_config(decode_part_config(plan, 1, id)) == id);
}

TEST_CASE("GHZ cut plans") {
  const CutCircuit g5 = ghz_cut_plan(5);
  CHECK(g5.plan.num_parts() == 2);
  CHECK(g5.plan.part(0).global_qubits == std::vector<int>{0, 1, 2});
  CHECK(g5.plan.part(1).global_qubits == std::vector<int>{2, 3, 4});
  const CutCircuit g11 = ghz_cut_plan(11);
  CHECK(g11.plan.part(0).global_qubits.size() == 6);
  CHECK(g11.plan.part(1).global_qubits.size() == 6);
  CHECK(overlap_trace(uncut_state(g5.plan, g5.circuits), test::ghz(5)) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK_THROWS_AS(ghz_cut_plan(4), InvalidArgument);
  CHECK_THROWS_AS(ghz_cut_plan(1), InvalidArgument);
}

TEST_CASE("execute_part") {
  const CutCircuit g5 = ghz_cut_plan(5);
  const CutConfigTable table = cut_config_table();
  const std::vector<Mat2> id3(3, Mat2::Identity());
  // Part 0 under z=0, C=I: outputs are wires 0,1 then the cut bit.
  const OutcomeTable t = execute_part(g5.plan, g5.circuits, 0, 0, "", std::span<const Mat2>(id3.data(), 2), table, {});
  REQUIRE(t.bits == 3);
  double cut_zero = 0.0, cut_one = 0.0;
  for (std::size_t i = 0; i < t.counts.size(); ++i) (i & 1 ? cut_one : cut_zero) += t.counts[i];
  CHECK(cut_zero == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(cut_one == doctest::Approx(0.5).epsilon(1e-12));

  // The maximally mixed marker averages the two basis inputs.
  const auto zero_in = execute_part(g5.plan, g5.circuits, 1, 0, "0", std::span<const Mat2>(id3.data(), 3), table, {});
  const auto one_in = execute_part(g5.plan, g5.circuits, 1, 0, "1", std::span<const Mat2>(id3.data(), 3), table, {});
  const auto mixed = execute_part(g5.plan, g5.circuits, 1, 0, "m", std::span<const Mat2>(id3.data(), 3), table, {});
  for (std::size_t i = 0; i < mixed.counts.size(); ++i)
    CHECK(mixed.counts[i] == doctest::Approx(0.5 * (zero_in.counts[i] + one_in.counts[i])).epsilon(1e-12));

  // An uncut plan reduces to measurement_probabilities.
  const CutPlan uncut = chain_plan({3});
  const PartCircuits c{Circuit(3).h(0).cnot(0, 1).cnot(1, 2)};
  const auto direct = measurement_probabilities(test::ghz(3));
  const auto table3 = execute_part(uncut, c, 0, 0, "", std::span<const Mat2>(id3.data(), 3), table, {});
  for (std::size_t i = 0; i < direct.size(); ++i) CHECK(table3.counts[i] == doctest::Approx(direct[i]));

  CHECK_THROWS_AS(execute_part(g5.plan, g5.circuits, 1, 0, "", std::span<const Mat2>(id3.data(), 3), table, {}),
                  Error);
  ExecOptions sampled;
  sampled.shots = 200;
  Rng rng(3);
  const auto counts = execute_part(g5.plan, g5.circuits, 0, 0, "", std::span<const Mat2>(id3.data(), 2), table, sampled, &rng);
  CHECK(std::accumulate(counts.counts.begin(), counts.counts.end(), 0.0) == 200.0);
}

TEST_CASE("record CSV round trip") {
  RecordSet r(2);
  r.insert(RecordKey{2, 1, 3, 4, "0"}, make_count_table(2, {5, 0, 3, 2}));
  r.insert(RecordKey{2, 0, 1, 0, ""}, make_count_table(1, {7, 3}));
  std::stringstream ss;
  r.write_csv(ss);
  CHECK(ss.str().rfind("platform,part,config,unitary_index,cut_input,outcome,count", 0) == 0);
  const auto back = RecordSet::read_csv(ss);
  REQUIRE(back.count(2) == 1);
  CHECK(back.at(2).records() == r.records());
  CHECK_NOTHROW(r.insert(RecordKey{2, 1, 3, 4, "0"}, make_count_table(2, {5, 0, 3, 2})));
  CHECK_THROWS_AS(r.insert(RecordKey{2, 1, 3, 4, "0"}, make_count_table(2, {4, 1, 3, 2})), Error);
}

}  // TEST_SUITE
