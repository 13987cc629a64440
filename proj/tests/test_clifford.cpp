#include <doctest.h>

#include <cmath>
#include <map>

#include "helpers.hpp"
#include "xplat/clifford.hpp"
#include "xplat/liouville.hpp"
#include "xplat/stabilizer.hpp"

using namespace xplat;

TEST_SUITE("clifford-ensembles") {

TEST_CASE("single-qubit Clifford table") {
  const auto& table = single_qubit_clifford_table();
  REQUIRE(table.size() == 24);
  CHECK(equal_up_to_phase(table[0], Mat2::Identity()));
  for (std::size_t i = 0; i < table.size(); ++i)
    for (std::size_t j = 0; j < i; ++j) CHECK_FALSE(equal_up_to_phase(table[i], table[j]));
  for (const auto& a : table)
    for (const auto& b : table) CHECK_NOTHROW(clifford_label(a * b));

  CMatrix twirl = CMatrix::Zero(2, 2);
  CMatrix zero = CMatrix::Zero(2, 2);
  zero(0, 0) = 1.0;
  for (const auto& c : table) twirl += c.adjoint() * zero * c;
  twirl /= 24.0;
  CHECK((twirl - 0.5 * CMatrix::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("local Clifford twirl is a 2-design") {
  const auto& table = single_qubit_clifford_table();
  // (1/24) sum_C (C x C) rho (C x C)^dagger = a I + b SWAP on symmetric inputs.
  RMatrix avg = RMatrix::Zero(16, 16);
  for (const auto& c : table) {
    CMatrix cc(4, 4);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) cc.block(2 * i, 2 * j, 2, 2) = c(i, j) * c;
    avg += ChannelMatrix::from_unitary(cc).entries();
  }
  avg /= 24.0;
  // Haar twirl: projector onto span{I, SWAP} in Liouville space.
  const auto swap_op = [] {
    CMatrix s = CMatrix::Zero(4, 4);
    s(0, 0) = s(3, 3) = s(1, 2) = s(2, 1) = 1.0;
    return s;
  }();
  const RVector vi = to_liouville(CMatrix::Identity(4, 4)), vs = to_liouville(swap_op);
  RMatrix basis(16, 2);
  basis << vi, vs;
  const RMatrix projector = basis * (basis.transpose() * basis).inverse() * basis.transpose();
  CHECK((avg - projector).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("cut configuration tables") {
  const CutConfigTable plain = cut_config_table();
  REQUIRE(plain.size() == 4);
  const std::vector<double> expected{0.2, 0.2, 0.2, 0.4};
  for (int e = 0; e < 4; ++e) CHECK(plain.entries[e].probability == doctest::Approx(expected[e]).epsilon(1e-14));
  CHECK(plain.entries[3].z == 1);
  CHECK(equal_up_to_phase(plain.entries[3].unitary, Mat2::Identity()));
  CHECK(plain.weight_factor() == doctest::Approx(5.0));
  CHECK(plain.coefficient(3) == doctest::Approx(-2.0));

  const CutConfigTable third = cut_config_table(1, 1.0 / 3.0);
  for (int e = 0; e < 4; ++e) CHECK(third.entries[e].probability == doctest::Approx(expected[e]).epsilon(1e-14));

  const CutConfigTable f03 = cut_config_table(1, 0.3);
  double total = 0.0;
  for (int e = 0; e < 4; ++e) {
    CHECK(f03.entries[e].probability == doctest::Approx(e < 3 ? 0.19608 : 0.41176).epsilon(1e-4));
    total += f03.entries[e].probability;
  }
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(3 * f03.entries[0].probability == doctest::Approx(1.0 / (2.0 - 0.3)).epsilon(1e-12));
  CHECK_THROWS_AS(cut_config_table(1, 0.0), InvalidArgument);
  CHECK_THROWS_AS(cut_config_table(1, 1.0), InvalidArgument);
  CHECK_THROWS_AS(cut_config_table(2), InvalidArgument);
}

TEST_CASE("sample_k_clifford") {
  Rng rng(21);
  std::map<int, int> freq;
  for (int i = 0; i < 24000; ++i) ++freq[clifford_label(sample_k_clifford(1, rng))];
  CHECK(freq.size() == 24);
  for (const auto& [label, count] : freq) CHECK(std::abs(count - 1000) < 200);

  for (int i = 0; i < 20; ++i) CHECK(is_clifford(sample_k_clifford(2, rng)));
  CHECK(two_qubit_clifford_group().size() == 11520);

  Rng a(5), b(5);
  CHECK(equal_up_to_phase(sample_k_clifford(2, a), sample_k_clifford(2, b)));
  CHECK_THROWS_AS(sample_k_clifford(3, rng), InvalidArgument);
}

TEST_CASE("shared ensembles") {
  const auto e = shared_ensemble({2, 3}, 1, 7);
  REQUIRE(e.num_parts() == 2);
  CHECK(e.labels(0, 0).size() == 2);
  CHECK(e.labels(1, 0).size() == 3);
  CHECK(shared_ensemble({2, 3}, 10, 7) == shared_ensemble({2, 3}, 10, 7));
  CHECK_FALSE(shared_ensemble({2, 3}, 10, 7) == shared_ensemble({2, 3}, 10, 8));
  CHECK(shared_ensemble({2, 3}, 10, 7).digest() == shared_ensemble({2, 3}, 10, 7).digest());

  const auto ex = shared_ensemble({2, 3}, 1, 0, EnsembleMode::kExhaustive);
  CHECK(ex.num_settings(0) == 9);
  CHECK(ex.num_settings(1) == 27);
  for (int t = 0; t < 9; ++t)
    for (int label : ex.labels(0, t))
      CHECK((label == identity_label() || label == rx_half_pi_label() || label == ry_half_pi_label()));
  CHECK_THROWS_AS(shared_ensemble({2}, 0, 1), InvalidArgument);
}

TEST_CASE("mutually unbiased bases") {
  for (int n = 1; n <= 3; ++n) {
    const auto& w = mub_unitaries(n);
    const auto d = static_cast<Eigen::Index>(dim_of(n));
    REQUIRE(static_cast<Eigen::Index>(w.size()) == d + 1);
    for (std::size_t a = 0; a < w.size(); ++a)
      for (std::size_t b = 0; b < a; ++b) {
        const CMatrix overlap = w[a] * w[b].adjoint();
        CHECK((overlap.cwiseAbs2().array() - 1.0 / static_cast<double>(d)).abs().maxCoeff() < 1e-10);
      }
  }
  CHECK_THROWS_AS(mub_unitaries(4), InvalidArgument);
}

TEST_CASE("GHZ stabilizer groups") {
  const StabilizerGroup g2 = ghz_stabilizers(2);
  REQUIRE(g2.elements.size() == 4);
  std::vector<std::string> texts;
  for (const auto& e : g2.elements) texts.push_back(e.to_string());
  CHECK(texts == std::vector<std::string>{"+II", "+XX", "+ZZ", "-YY"});

  for (int n = 2; n <= 6; ++n) {
    const StabilizerGroup g = ghz_stabilizers(n);
    CHECK(g.elements.size() == dim_of(n));
    const auto state = test::ghz(n);
    int commuting = 0;
    PauliString z(n);
    z.set_op(0, Pauli::Z);
    for (const auto& e : g.elements) {
      CHECK(pauli_expectation(state, e) == doctest::Approx(1.0).epsilon(1e-10));
      commuting += e.qubitwise_commutes_with(z);
    }
    CHECK(2 * commuting == static_cast<int>(g.elements.size()));
  }
  CHECK_THROWS_AS(ghz_stabilizers(1), InvalidArgument);
}

TEST_CASE("stabilizer settings") {
  const auto zz = stabilizer_setting(PauliString::parse("ZZZ"));
  for (const auto& w : zz) CHECK(equal_up_to_phase(w, Mat2::Identity()));
  const auto x = stabilizer_setting(PauliString::parse("X"));
  CHECK(equal_up_to_phase(x[0], ry_matrix(-M_PI / 2)));
  for (const char* text : {"XYZ", "-YYI", "IXZ"}) {
    const PauliString p = PauliString::parse(text);
    const auto setting = stabilizer_setting(p);
    for (int q = 0; q < p.size(); ++q) {
      const Mat2 back = setting[q].adjoint() * pauli_matrix(Pauli::Z) * setting[q];
      if (p.op(q) != Pauli::I) CHECK((back - pauli_matrix(p.op(q))).cwiseAbs().maxCoeff() < 1e-12);
    }
  }
}

TEST_CASE("quaternary Pauli encoding") {
  CHECK(quaternary_pauli(0, 5).letters() == "IIIII");
  CHECK(quaternary_pauli(1, 5).letters() == "IIIIX");
  CHECK(quaternary_pauli(63, 5).letters() == "IIZZZ");
  CHECK_THROWS_AS(quaternary_pauli(16, 2), InvalidArgument);
}

}  // TEST_SUITE
