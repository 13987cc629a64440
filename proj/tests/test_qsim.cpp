#include <doctest.h>

#include <cmath>
#include <numeric>

#include "helpers.hpp"
#include "xplat/liouville.hpp"
#include "xplat/qsim.hpp"

using namespace xplat;

namespace {

double max_abs(const CMatrix& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace

TEST_SUITE("qsim") {

TEST_CASE("run_circuit gate actions") {
  const double r = 1.0 / std::sqrt(2.0);
  Circuit h(1);
  h.h(0);
  const auto plus = run_circuit(h, QuantumState::zero(1));
  CHECK(std::abs(plus.amplitudes()[0] - cplx(r)) < 1e-12);
  CHECK(std::abs(plus.amplitudes()[1] - cplx(r)) < 1e-12);

  CVector in(4);
  in << r, 0, r, 0;  // (|00> + |10>)/sqrt2
  Circuit cx(2);
  cx.cnot(0, 1);
  const auto bell = run_circuit(cx, QuantumState::pure(in));
  CHECK(std::abs(bell.amplitudes()[0] - cplx(r)) < 1e-12);
  CHECK(std::abs(bell.amplitudes()[3] - cplx(r)) < 1e-12);
  CHECK(std::abs(bell.amplitudes()[2]) < 1e-12);

  const auto g = test::ghz(5);
  CHECK(std::abs(g.amplitudes()[0] - cplx(r)) < 1e-12);
  CHECK(std::abs(g.amplitudes()[31] - cplx(r)) < 1e-12);

  CHECK_THROWS_AS(run_circuit(h, QuantumState::zero(2)), DimensionError);
}

TEST_CASE("representation is preserved and norms are invariant") {
  Rng rng(3);
  Circuit c(4);
  for (int layer = 0; layer < 100; ++layer) {
    const int q = static_cast<int>(rng.below(4));
    switch (rng.below(4)) {
      case 0: c.rx(q, rng.uniform() * 6.0); break;
      case 1: c.ry(q, rng.uniform() * 6.0); break;
      case 2: c.h(q); break;
      default: c.cnot(q, (q + 1) % 4); break;
    }
  }
  const auto psi = run_circuit(c, random_pure_state(4, rng));
  CHECK(psi.is_pure());
  CHECK(psi.amplitudes().norm() == doctest::Approx(1.0).epsilon(1e-10));
  const auto rho = run_circuit(c, QuantumState::zero(4).to_density());
  CHECK_FALSE(rho.is_pure());
  CHECK(std::abs(rho.density_matrix().trace() - cplx(1.0)) < 1e-10);
  CHECK(max_abs(rho.density_matrix() - run_circuit(c, QuantumState::zero(4)).density_matrix()) < 1e-10);
}

TEST_CASE("state validation") {
  CVector bad(2);
  bad << 1.0, 1.0;
  CHECK_THROWS_AS(QuantumState::pure(bad), InvalidArgument);
  CMatrix rho = CMatrix::Identity(2, 2);
  CHECK_THROWS_AS(QuantumState::density(rho), InvalidArgument);
  CHECK_THROWS_AS(QuantumState::zero(kMaxQubits + 1), DimensionError);
  Circuit c(2);
  CHECK_THROWS_AS(c.cnot(0, 0), InvalidArgument);
  CHECK_THROWS_AS(c.h(2), DimensionError);
}

TEST_CASE("measurement_probabilities") {
  const auto zero = QuantumState::zero(1);
  auto p = measurement_probabilities(zero);
  CHECK(p[0] == doctest::Approx(1.0));
  CHECK(p[1] == doctest::Approx(0.0));
  const std::vector<Mat2> h{hadamard_matrix()};
  p = measurement_probabilities(zero, h);
  CHECK(p[0] == doctest::Approx(0.5));
  CHECK(p[1] == doctest::Approx(0.5));
  p = measurement_probabilities(test::ghz(3));
  CHECK(p[0] == doctest::Approx(0.5));
  CHECK(p[7] == doctest::Approx(0.5));
  CHECK(std::accumulate(p.begin(), p.end(), 0.0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK_THROWS_AS(measurement_probabilities(test::ghz(3), h), DimensionError);
}

TEST_CASE("sample_shots") {
  Rng rng(1);
  const std::vector<double> point{1.0, 0.0};
  const auto c = sample_shots(point, 100, rng);
  CHECK(c[0] == 100);
  CHECK(c[1] == 0);

  const std::vector<double> fair{0.5, 0.5};
  Rng a(7, StreamKey{1, 2, 3, 4, StreamPurpose::kShots, 5});
  Rng b(7, StreamKey{1, 2, 3, 4, StreamPurpose::kShots, 5});
  CHECK(sample_shots(fair, 1000, a) == sample_shots(fair, 1000, b));

  const auto big = sample_shots(fair, 10000, rng);
  CHECK(big[0] + big[1] == 10000);
  CHECK(std::abs(static_cast<double>(big[0]) / 10000.0 - 0.5) < 0.05);

  const std::vector<double> unnormalized{0.7, 0.7};
  CHECK_THROWS_AS(sample_shots(unnormalized, 10, rng), InvalidArgument);
  CHECK_THROWS_AS(sample_shots(fair, 0, rng), InvalidArgument);
}

TEST_CASE("rng substreams are independent of call order") {
  const StreamKey k1{1, 0, 0, 0, StreamPurpose::kShots, 0}, k2{2, 0, 0, 0, StreamPurpose::kShots, 0};
  CHECK(derive_seed(42, k1) != derive_seed(42, k2));
  CHECK(derive_seed(42, k1) == derive_seed(42, k1));
  CHECK(derive_seed(42, k1) != derive_seed(43, k1));
  Rng r(42, k1);
  for (int i = 0; i < 1000; ++i) CHECK(r.below(7) < 7);
}

TEST_CASE("pauli_expectation") {
  const auto g = test::ghz(5);
  CHECK(pauli_expectation(g, PauliString::parse("XXXXX")) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(pauli_expectation(g, PauliString::parse("ZIIII")) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(pauli_expectation(g, PauliString::parse("-ZZIII")) == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(pauli_expectation(QuantumState::zero(1), PauliString::parse("Z")) == doctest::Approx(1.0));
  CHECK_THROWS_AS(pauli_expectation(g, PauliString::parse("XX")), DimensionError);
  CHECK_THROWS_AS(PauliString::parse("XQ"), InvalidArgument);
}

TEST_CASE("partial_trace") {
  const auto bell = test::ghz(2);
  const std::vector<int> first{0};
  CHECK(max_abs(partial_trace(bell, first).density_matrix() - 0.5 * CMatrix::Identity(2, 2)) < 1e-12);

  Circuit c(2);
  c.h(1);
  const auto zp = run_circuit(c, QuantumState::zero(2));
  const std::vector<int> second{1};
  CMatrix plus(2, 2);
  plus.setConstant(0.5);
  CHECK(max_abs(partial_trace(zp, second).density_matrix() - plus) < 1e-12);

  const std::vector<int> pair{0, 1};
  CMatrix expected = CMatrix::Zero(4, 4);
  expected(0, 0) = expected(3, 3) = 0.5;
  const auto reduced = partial_trace(test::ghz(3), pair);
  CHECK(max_abs(reduced.density_matrix() - expected) < 1e-12);
  CHECK(std::abs(reduced.density_matrix().trace() - cplx(1.0)) < 1e-10);
  CHECK_THROWS_AS(partial_trace(bell, std::vector<int>{}), InvalidArgument);
}

TEST_CASE("overlap_trace") {
  Rng rng(9);
  const auto a = random_pure_state(3, rng);
  CHECK(overlap_trace(a, a) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(overlap_trace(QuantumState::basis(1, 0), QuantumState::basis(1, 1)) == doctest::Approx(0.0));
  for (int n = 2; n <= 6; ++n) CHECK(overlap_trace(QuantumState::zero(n), test::ghz(n)) == doctest::Approx(0.5));
  CHECK_THROWS_AS(overlap_trace(a, QuantumState::zero(2)), DimensionError);
}

TEST_CASE("Liouville channels agree with density evolution") {
  Rng rng(4);
  for (int k = 1; k <= 2; ++k) {
    const CMatrix u = haar_unitary(static_cast<Eigen::Index>(dim_of(k)), rng);
    const ChannelMatrix ch = ChannelMatrix::from_unitary(u);
    CHECK(ch.trace_preserving());
    const CMatrix rho = random_pure_state(k, rng).density_matrix();
    CHECK(max_abs(ch.apply(rho) - u * rho * u.adjoint()) < 1e-10);
    CHECK(max_abs(from_liouville(to_liouville(rho)) - rho) < 1e-12);
  }
  const ChannelMatrix mp = measure_prepare(1);
  CMatrix plus(2, 2);
  plus.setConstant(0.5);
  CHECK(max_abs(mp.apply(plus) - 0.5 * CMatrix::Identity(2, 2)) < 1e-12);
}

TEST_CASE("exhaustive settings reproduce diagonalizable Pauli expectations") {
  Rng rng(12);
  const auto state = random_pure_state(2, rng);
  // Z basis, then Ry(-pi/2) for X and Rx(pi/2) for Y.
  const std::vector<std::pair<std::string, Mat2>> bases{
      {"Z", Mat2::Identity()}, {"X", ry_matrix(-M_PI / 2)}, {"Y", rx_matrix(M_PI / 2)}};
  for (const auto& [la, ua] : bases) {
    for (const auto& [lb, ub] : bases) {
      const std::vector<Mat2> setting{ua, ub};
      const auto p = measurement_probabilities(state, setting);
      const double parity = p[0] - p[1] - p[2] + p[3];
      CHECK(parity == doctest::Approx(pauli_expectation(state, PauliString::parse(la + lb))).epsilon(1e-10));
    }
  }
}

}  // TEST_SUITE
