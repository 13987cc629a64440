#include "xplat/qsim.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

namespace xplat {

namespace {

void check_qubits(int n) {
  if (n < 1 || n > kMaxQubits)
    throw DimensionError("qubit count " + std::to_string(n) + " outside [1, " +
                         std::to_string(kMaxQubits) + "]");
}

// Bit position (from the least significant end) of qubit q in an n-qubit index.
inline int shift_of(int n, int q) { return n - 1 - q; }

void check_targets(int n, std::span<const int> targets) {
  for (std::size_t i = 0; i < targets.size(); ++i) {
    if (targets[i] < 0 || targets[i] >= n)
      throw DimensionError("gate target " + std::to_string(targets[i]) + " out of range");
    for (std::size_t j = 0; j < i; ++j)
      if (targets[i] == targets[j]) throw InvalidArgument("gate targets must be distinct");
  }
}

}  // namespace

// ---------------------------------------------------------------- QuantumState

int QuantumState::qubits_for_dim(Eigen::Index dim) {
  int n = 0;
  while ((Eigen::Index{1} << n) < dim) ++n;
  if ((Eigen::Index{1} << n) != dim) throw DimensionError("dimension is not a power of two");
  check_qubits(n);
  return n;
}

QuantumState QuantumState::zero(int n) { return basis(n, 0); }

QuantumState QuantumState::basis(int n, std::uint64_t index) {
  check_qubits(n);
  if (index >= dim_of(n)) throw DimensionError("basis index out of range");
  CVector psi = CVector::Zero(static_cast<Eigen::Index>(dim_of(n)));
  psi(static_cast<Eigen::Index>(index)) = 1.0;
  return QuantumState(n, std::move(psi));
}

QuantumState QuantumState::pure(CVector amplitudes) {
  const int n = qubits_for_dim(amplitudes.size());
  if (std::abs(amplitudes.squaredNorm() - 1.0) > kExactTol)
    throw InvalidArgument("pure state is not normalized");
  return QuantumState(n, std::move(amplitudes));
}

QuantumState QuantumState::density(CMatrix rho) {
  if (rho.rows() != rho.cols()) throw DimensionError("density matrix must be square");
  const int n = qubits_for_dim(rho.rows());
  if (std::abs(rho.trace() - cplx(1.0, 0.0)) > kExactTol)
    throw InvalidArgument("density matrix trace differs from 1");
  if ((rho - rho.adjoint()).cwiseAbs().maxCoeff() > kExactTol)
    throw InvalidArgument("density matrix is not Hermitian");
  Eigen::SelfAdjointEigenSolver<CMatrix> es(rho, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -1e-9)
    throw InvalidArgument("density matrix has a negative eigenvalue");
  return QuantumState(n, std::move(rho));
}

const CVector& QuantumState::amplitudes() const {
  if (!is_pure()) throw InvalidArgument("state is mixed; amplitudes unavailable");
  return std::get<CVector>(data_);
}

CVector& QuantumState::mutable_amplitudes() {
  if (!is_pure()) throw InvalidArgument("state is mixed; amplitudes unavailable");
  return std::get<CVector>(data_);
}

CMatrix& QuantumState::mutable_density() {
  if (is_pure()) data_ = density_matrix();
  return std::get<CMatrix>(data_);
}

CMatrix QuantumState::density_matrix() const {
  if (is_pure()) {
    const auto& psi = std::get<CVector>(data_);
    return psi * psi.adjoint();
  }
  return std::get<CMatrix>(data_);
}

double QuantumState::purity() const {
  if (is_pure()) return 1.0;
  const auto& rho = std::get<CMatrix>(data_);
  return (rho.adjoint().cwiseProduct(rho.transpose())).sum().real();
}

// ------------------------------------------------------------------------ Gates

Mat2 rx_matrix(double theta) {
  const double c = std::cos(theta / 2), s = std::sin(theta / 2);
  Mat2 m;
  m << c, cplx(0, -s), cplx(0, -s), c;
  return m;
}

Mat2 ry_matrix(double theta) {
  const double c = std::cos(theta / 2), s = std::sin(theta / 2);
  Mat2 m;
  m << c, -s, s, c;
  return m;
}

Mat2 rz_matrix(double theta) {
  Mat2 m;
  m << std::polar(1.0, -theta / 2), 0, 0, std::polar(1.0, theta / 2);
  return m;
}

Mat2 hadamard_matrix() {
  Mat2 m;
  const double r = 1.0 / std::numbers::sqrt2;
  m << r, r, r, -r;
  return m;
}

CMatrix Gate::matrix() const {
  switch (kind) {
    case GateKind::kH: return hadamard_matrix();
    case GateKind::kX: return pauli_matrix(Pauli::X);
    case GateKind::kY: return pauli_matrix(Pauli::Y);
    case GateKind::kZ: return pauli_matrix(Pauli::Z);
    case GateKind::kS: {
      Mat2 m;
      m << 1, 0, 0, cplx(0, 1);
      return m;
    }
    case GateKind::kSdg: {
      Mat2 m;
      m << 1, 0, 0, cplx(0, -1);
      return m;
    }
    case GateKind::kRx: return rx_matrix(theta);
    case GateKind::kRy: return ry_matrix(theta);
    case GateKind::kRz: return rz_matrix(theta);
    case GateKind::kCnot: {
      CMatrix m = CMatrix::Zero(4, 4);
      m(0, 0) = m(1, 1) = m(2, 3) = m(3, 2) = 1.0;
      return m;
    }
    case GateKind::kCz: {
      CMatrix m = CMatrix::Identity(4, 4);
      m(3, 3) = -1.0;
      return m;
    }
    case GateKind::kUnitary: return custom;
  }
  throw InvalidArgument("unknown gate kind");
}

bool is_unitary(const CMatrix& u, double tol) {
  if (u.rows() != u.cols()) return false;
  return (u.adjoint() * u - CMatrix::Identity(u.rows(), u.cols())).cwiseAbs().maxCoeff() <= tol;
}

// ---------------------------------------------------------------------- Circuit

Circuit::Circuit(int n) : n_(n) { check_qubits(n); }

Circuit& Circuit::add(Gate gate) {
  const int expected = [&] {
    switch (gate.kind) {
      case GateKind::kCnot:
      case GateKind::kCz: return 2;
      case GateKind::kUnitary: return gate.arity();
      default: return 1;
    }
  }();
  if (gate.arity() != expected || expected < 1 || expected > 2)
    throw InvalidArgument("gate has the wrong number of targets");
  check_targets(n_, gate.targets);
  if (gate.kind == GateKind::kUnitary) {
    const Eigen::Index d = Eigen::Index{1} << gate.arity();
    if (gate.custom.rows() != d || gate.custom.cols() != d)
      throw DimensionError("custom gate matrix has the wrong size");
    if (!is_unitary(gate.custom)) throw InvalidArgument("custom gate matrix is not unitary");
  }
  gates_.push_back(std::move(gate));
  return *this;
}

Circuit& Circuit::unitary(std::vector<int> targets, CMatrix u) {
  Gate g = make_gate(GateKind::kUnitary, std::move(targets));
  g.custom = std::move(u);
  return add(std::move(g));
}

Circuit& Circuit::append(const Circuit& other, std::span<const int> wire_map) {
  if (static_cast<int>(wire_map.size()) != other.num_qubits())
    throw DimensionError("wire map size does not match appended circuit");
  for (const Gate& g : other.gates()) {
    Gate mapped = g;
    for (int& t : mapped.targets) t = wire_map[static_cast<std::size_t>(t)];
    add(std::move(mapped));
  }
  return *this;
}

Circuit& Circuit::append(const Circuit& other) {
  std::vector<int> identity(static_cast<std::size_t>(other.num_qubits()));
  std::iota(identity.begin(), identity.end(), 0);
  return append(other, identity);
}

Circuit Circuit::inverse() const {
  Circuit inv(n_);
  for (auto it = gates_.rbegin(); it != gates_.rend(); ++it) {
    Gate g = *it;
    switch (g.kind) {
      case GateKind::kRx:
      case GateKind::kRy:
      case GateKind::kRz: g.theta = -g.theta; break;
      case GateKind::kS: g.kind = GateKind::kSdg; break;
      case GateKind::kSdg: g.kind = GateKind::kS; break;
      case GateKind::kUnitary: g.custom = g.custom.adjoint(); break;
      default: break;
    }
    inv.add(std::move(g));
  }
  return inv;
}

CMatrix Circuit::unitary_matrix() const {
  const auto d = static_cast<Eigen::Index>(dim_of(n_));
  CMatrix u = CMatrix::Identity(d, d);
  for (Eigen::Index c = 0; c < d; ++c) {
    CVector col = u.col(c);
    for (const Gate& g : gates_) apply_matrix(col, n_, g.targets, g.matrix());
    u.col(c) = col;
  }
  return u;
}

// -------------------------------------------------------------- gate kernels

void apply_matrix(CVector& psi, int n, std::span<const int> targets, const CMatrix& u) {
  const int k = static_cast<int>(targets.size());
  const std::uint64_t sub = std::uint64_t{1} << k;
  std::uint64_t mask = 0;
  std::vector<std::uint64_t> offsets(sub, 0);
  for (int j = 0; j < k; ++j) {
    const std::uint64_t bit = std::uint64_t{1} << shift_of(n, targets[static_cast<std::size_t>(j)]);
    mask |= bit;
    for (std::uint64_t a = 0; a < sub; ++a)
      if ((a >> (k - 1 - j)) & 1) offsets[a] |= bit;
  }
  std::vector<cplx> in(sub);
  const std::uint64_t dim = dim_of(n);
  for (std::uint64_t base = 0; base < dim; ++base) {
    if (base & mask) continue;
    for (std::uint64_t a = 0; a < sub; ++a) in[a] = psi(static_cast<Eigen::Index>(base | offsets[a]));
    for (std::uint64_t r = 0; r < sub; ++r) {
      cplx acc = 0.0;
      for (std::uint64_t c = 0; c < sub; ++c)
        acc += u(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) * in[c];
      psi(static_cast<Eigen::Index>(base | offsets[r])) = acc;
    }
  }
}

void apply_matrix(CMatrix& rho, int n, std::span<const int> targets, const CMatrix& u) {
  // (U (U rho)^dagger)^dagger = U rho U^dagger for any rho.
  for (Eigen::Index c = 0; c < rho.cols(); ++c) {
    CVector col = rho.col(c);
    apply_matrix(col, n, targets, u);
    rho.col(c) = col;
  }
  CMatrix a = rho.adjoint();
  for (Eigen::Index c = 0; c < a.cols(); ++c) {
    CVector col = a.col(c);
    apply_matrix(col, n, targets, u);
    a.col(c) = col;
  }
  rho = a.adjoint();
}

namespace {

void depolarize(CMatrix& rho, int n, int q, double p) {
  if (p <= 0.0) return;
  const int target[] = {q};
  CMatrix acc = (1.0 - 0.75 * p) * rho;
  for (Pauli pl : {Pauli::X, Pauli::Y, Pauli::Z}) {
    CMatrix t = rho;
    apply_matrix(t, n, target, pauli_matrix(pl));
    acc += 0.25 * p * t;
  }
  rho = std::move(acc);
}

}  // namespace

QuantumState run_circuit(const Circuit& circuit, const QuantumState& initial, const GateNoise& noise) {
  if (circuit.num_qubits() != initial.num_qubits())
    throw DimensionError("circuit and state have different qubit counts");
  const int n = circuit.num_qubits();
  if (noise.depolarizing > 0.0) {
    CMatrix rho = initial.density_matrix();
    for (const Gate& g : circuit.gates()) {
      apply_matrix(rho, n, g.targets, g.matrix());
      for (int q : g.targets) depolarize(rho, n, q, noise.depolarizing);
    }
    return QuantumState::density(std::move(rho));
  }
  QuantumState out = initial;
  if (out.is_pure()) {
    CVector& psi = out.mutable_amplitudes();
    for (const Gate& g : circuit.gates()) apply_matrix(psi, n, g.targets, g.matrix());
  } else {
    CMatrix& rho = out.mutable_density();
    for (const Gate& g : circuit.gates()) apply_matrix(rho, n, g.targets, g.matrix());
  }
  return out;
}

QuantumState apply_local(const QuantumState& state, std::span<const Mat2> setting) {
  const int n = state.num_qubits();
  if (static_cast<int>(setting.size()) != n)
    throw DimensionError("measurement setting needs one unitary per qubit");
  QuantumState out = state;
  for (int q = 0; q < n; ++q) {
    const Mat2& u = setting[static_cast<std::size_t>(q)];
    if (u.isIdentity(1e-15)) continue;
    const int target[] = {q};
    if (out.is_pure())
      apply_matrix(out.mutable_amplitudes(), n, target, u);
    else
      apply_matrix(out.mutable_density(), n, target, u);
  }
  return out;
}

std::vector<double> measurement_probabilities(const QuantumState& state) {
  std::vector<double> probs(state.dim());
  if (state.is_pure()) {
    const CVector& psi = state.amplitudes();
    for (std::size_t i = 0; i < probs.size(); ++i) probs[i] = std::norm(psi(static_cast<Eigen::Index>(i)));
  } else {
    const CMatrix rho = state.density_matrix();
    for (std::size_t i = 0; i < probs.size(); ++i) {
      const auto ii = static_cast<Eigen::Index>(i);
      probs[i] = std::max(0.0, rho(ii, ii).real());
    }
  }
  return probs;
}

std::vector<double> measurement_probabilities(const QuantumState& state, std::span<const Mat2> setting) {
  return measurement_probabilities(apply_local(state, setting));
}

std::vector<std::uint64_t> sample_shots(std::span<const double> probs, std::uint64_t m, Rng& rng) {
  if (m < 1) throw InvalidArgument("shot count must be positive");
  std::vector<double> cdf(probs.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    if (probs[i] < -1e-12) throw InvalidArgument("probability table has negative entries");
    acc += std::max(0.0, probs[i]);
    cdf[i] = acc;
  }
  if (std::abs(acc - 1.0) > 1e-9) throw InvalidArgument("probability table is not normalized");
  std::vector<std::uint64_t> counts(probs.size(), 0);
  for (std::uint64_t shot = 0; shot < m; ++shot) {
    const double u = rng.uniform() * acc;
    auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    std::size_t idx = static_cast<std::size_t>(it - cdf.begin());
    if (idx >= probs.size()) idx = probs.size() - 1;
    // Never land on a zero-probability outcome at a plateau edge.
    while (probs[idx] <= 0.0 && idx > 0) --idx;
    ++counts[idx];
  }
  return counts;
}

double pauli_expectation(const QuantumState& state, const PauliString& pauli) {
  if (pauli.size() != state.num_qubits()) throw DimensionError("Pauli length differs from qubit count");
  const int sign = pauli.sign();
  // Rotate every non-identity site into Z and read off the parity.
  std::vector<Mat2> setting(static_cast<std::size_t>(state.num_qubits()), Mat2::Identity());
  std::uint64_t mask = 0;
  const int n = state.num_qubits();
  for (int q = 0; q < n; ++q) {
    switch (pauli.op(q)) {
      case Pauli::I: continue;
      case Pauli::X: setting[static_cast<std::size_t>(q)] = hadamard_matrix(); break;
      case Pauli::Y: setting[static_cast<std::size_t>(q)] = rx_matrix(std::numbers::pi / 2); break;
      case Pauli::Z: break;
    }
    mask |= std::uint64_t{1} << shift_of(n, q);
  }
  const auto probs = measurement_probabilities(state, setting);
  double value = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i)
    value += (std::popcount(i & mask) % 2 ? -1.0 : 1.0) * probs[i];
  return sign * value;
}

QuantumState partial_trace(const QuantumState& state, std::span<const int> keep) {
  if (keep.empty()) throw InvalidArgument("partial_trace needs a non-empty keep set");
  const int n = state.num_qubits();
  std::vector<int> kept(keep.begin(), keep.end());
  std::sort(kept.begin(), kept.end());
  check_targets(n, kept);
  std::vector<int> traced;
  for (int q = 0; q < n; ++q)
    if (!std::binary_search(kept.begin(), kept.end(), q)) traced.push_back(q);
  const int nk = static_cast<int>(kept.size());
  const int nt = n - nk;
  auto compose = [&](std::uint64_t ki, std::uint64_t ti) {
    std::uint64_t idx = 0;
    for (int j = 0; j < nk; ++j)
      if ((ki >> (nk - 1 - j)) & 1) idx |= std::uint64_t{1} << shift_of(n, kept[static_cast<std::size_t>(j)]);
    for (int j = 0; j < nt; ++j)
      if ((ti >> (nt - 1 - j)) & 1) idx |= std::uint64_t{1} << shift_of(n, traced[static_cast<std::size_t>(j)]);
    return static_cast<Eigen::Index>(idx);
  };
  const auto dk = static_cast<Eigen::Index>(dim_of(nk));
  const std::uint64_t dt = dim_of(nt);
  CMatrix red = CMatrix::Zero(dk, dk);
  if (state.is_pure()) {
    const CVector& psi = state.amplitudes();
    for (Eigen::Index a = 0; a < dk; ++a)
      for (Eigen::Index b = 0; b < dk; ++b) {
        cplx acc = 0.0;
        for (std::uint64_t t = 0; t < dt; ++t)
          acc += psi(compose(static_cast<std::uint64_t>(a), t)) * std::conj(psi(compose(static_cast<std::uint64_t>(b), t)));
        red(a, b) = acc;
      }
  } else {
    const CMatrix rho = state.density_matrix();
    for (Eigen::Index a = 0; a < dk; ++a)
      for (Eigen::Index b = 0; b < dk; ++b) {
        cplx acc = 0.0;
        for (std::uint64_t t = 0; t < dt; ++t)
          acc += rho(compose(static_cast<std::uint64_t>(a), t), compose(static_cast<std::uint64_t>(b), t));
        red(a, b) = acc;
      }
  }
  return QuantumState::density(std::move(red));
}

double overlap_trace(const QuantumState& a, const QuantumState& b) {
  if (a.num_qubits() != b.num_qubits()) throw DimensionError("overlap of states with different sizes");
  if (a.is_pure() && b.is_pure()) return std::norm(a.amplitudes().dot(b.amplitudes()));
  if (a.is_pure()) {
    const CVector& psi = a.amplitudes();
    return psi.dot(b.density_matrix() * psi).real();
  }
  if (b.is_pure()) return overlap_trace(b, a);
  const CMatrix ra = a.density_matrix(), rb = b.density_matrix();
  return ra.transpose().cwiseProduct(rb).sum().real();
}

QuantumState random_pure_state(int n, Rng& rng) {
  check_qubits(n);
  CVector psi(static_cast<Eigen::Index>(dim_of(n)));
  for (Eigen::Index i = 0; i < psi.size(); ++i) psi(i) = cplx(rng.normal(), rng.normal());
  psi.normalize();
  return QuantumState::pure(std::move(psi));
}

CMatrix haar_unitary(Eigen::Index dim, Rng& rng) {
  CMatrix g(dim, dim);
  for (Eigen::Index r = 0; r < dim; ++r)
    for (Eigen::Index c = 0; c < dim; ++c) g(r, c) = cplx(rng.normal(), rng.normal()) / std::numbers::sqrt2;
  Eigen::HouseholderQR<CMatrix> qr(g);
  CMatrix q = qr.householderQ();
  const CMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index c = 0; c < dim; ++c) {
    const cplx d = r(c, c);
    const cplx phase = std::abs(d) > 0 ? d / std::abs(d) : cplx(1.0, 0.0);
    q.col(c) *= phase;
  }
  return q;
}

std::string bitstring(std::uint64_t index, int bits) {
  std::string s(static_cast<std::size_t>(bits), '0');
  for (int b = 0; b < bits; ++b)
    if ((index >> (bits - 1 - b)) & 1) s[static_cast<std::size_t>(b)] = '1';
  return s;
}

}  // namespace xplat
