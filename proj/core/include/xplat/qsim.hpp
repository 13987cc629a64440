#pragma once

// Dense state-vector / density-matrix simulation for registers of at most
// kMaxQubits qubits.
//
// Ordering convention used everywhere in the library: qubit 0 (written as
// "qubit 1" in reports) is the most significant bit of a basis-state index,
// and bitstrings are printed left to right from qubit 0 to qubit n-1.

#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "xplat/pauli.hpp"
#include "xplat/rng.hpp"
#include "xplat/types.hpp"

namespace xplat {

class QuantumState {
 public:
  static QuantumState zero(int n);
  static QuantumState basis(int n, std::uint64_t index);
  /// Validates normalization (1e-10).
  static QuantumState pure(CVector amplitudes);
  /// Validates trace, Hermiticity and positivity.
  static QuantumState density(CMatrix rho);

  int num_qubits() const { return n_; }
  std::uint64_t dim() const { return dim_of(n_); }
  bool is_pure() const { return std::holds_alternative<CVector>(data_); }

  /// Throws if the state is a density matrix.
  const CVector& amplitudes() const;
  /// Returns the density matrix, forming |psi><psi| for pure states.
  CMatrix density_matrix() const;

  CVector& mutable_amplitudes();
  CMatrix& mutable_density();

  QuantumState to_density() const { return QuantumState::density(density_matrix()); }

  double purity() const;

 private:
  QuantumState(int n, std::variant<CVector, CMatrix> data) : n_(n), data_(std::move(data)) {}
  static int qubits_for_dim(Eigen::Index dim);

  int n_ = 0;
  std::variant<CVector, CMatrix> data_;
};

enum class GateKind { kH, kX, kY, kZ, kS, kSdg, kRx, kRy, kRz, kCnot, kCz, kUnitary };

struct Gate {
  GateKind kind = GateKind::kH;
  std::vector<int> targets;
  double theta = 0.0;
  CMatrix custom;  // only for kUnitary; targets[0] is the most significant bit

  /// 2x2 or 4x4 matrix acting on `targets` in order.
  CMatrix matrix() const;
  int arity() const { return static_cast<int>(targets.size()); }
};

inline Gate make_gate(GateKind kind, std::vector<int> targets, double theta = 0.0) {
  Gate g;
  g.kind = kind;
  g.targets = std::move(targets);
  g.theta = theta;
  return g;
}

Mat2 rx_matrix(double theta);
Mat2 ry_matrix(double theta);
Mat2 rz_matrix(double theta);
Mat2 hadamard_matrix();

class Circuit {
 public:
  Circuit() = default;
  explicit Circuit(int n);

  int num_qubits() const { return n_; }
  const std::vector<Gate>& gates() const { return gates_; }
  std::size_t size() const { return gates_.size(); }

  Circuit& add(Gate gate);
  Circuit& h(int q) { return add(make_gate(GateKind::kH, {q})); }
  Circuit& x(int q) { return add(make_gate(GateKind::kX, {q})); }
  Circuit& y(int q) { return add(make_gate(GateKind::kY, {q})); }
  Circuit& z(int q) { return add(make_gate(GateKind::kZ, {q})); }
  Circuit& s(int q) { return add(make_gate(GateKind::kS, {q})); }
  Circuit& rx(int q, double theta) { return add(make_gate(GateKind::kRx, {q}, theta)); }
  Circuit& ry(int q, double theta) { return add(make_gate(GateKind::kRy, {q}, theta)); }
  Circuit& rz(int q, double theta) { return add(make_gate(GateKind::kRz, {q}, theta)); }
  Circuit& cnot(int control, int target) { return add(make_gate(GateKind::kCnot, {control, target})); }
  Circuit& cz(int a, int b) { return add(make_gate(GateKind::kCz, {a, b})); }
  Circuit& unitary(std::vector<int> targets, CMatrix u);

  /// Appends `other`, relabelling its qubit q as wire_map[q].
  Circuit& append(const Circuit& other, std::span<const int> wire_map);
  Circuit& append(const Circuit& other);

  Circuit inverse() const;
  /// Full 2^n x 2^n unitary; intended for n <= 6 in tests.
  CMatrix unitary_matrix() const;

 private:
  int n_ = 0;
  std::vector<Gate> gates_;
};

/// Optional gate noise for robustness experiments; disabled by default.
struct GateNoise {
  double depolarizing = 0.0;  // single-qubit depolarizing after every gate, per target
};

/// Applies a k-qubit matrix (k = targets.size()) to a state vector in place.
void apply_matrix(CVector& psi, int n, std::span<const int> targets, const CMatrix& u);
/// rho -> U rho U^dagger on the given targets.
void apply_matrix(CMatrix& rho, int n, std::span<const int> targets, const CMatrix& u);

QuantumState run_circuit(const Circuit& circuit, const QuantumState& initial,
                         const GateNoise& noise = {});

/// Applies one single-qubit unitary per qubit.
QuantumState apply_local(const QuantumState& state, std::span<const Mat2> setting);

/// Outcome distribution after applying `setting[q]` to qubit q and measuring
/// in the computational basis. Indexed by basis-state index.
std::vector<double> measurement_probabilities(const QuantumState& state,
                                              std::span<const Mat2> setting);
std::vector<double> measurement_probabilities(const QuantumState& state);

/// Draws m shots; counts[i] is the number of times outcome i was observed.
std::vector<std::uint64_t> sample_shots(std::span<const double> probs, std::uint64_t m, Rng& rng);

double pauli_expectation(const QuantumState& state, const PauliString& pauli);

/// Reduced density matrix on `keep` (0-based, any order; result follows ascending order).
QuantumState partial_trace(const QuantumState& state, std::span<const int> keep);

/// tr(rho sigma).
double overlap_trace(const QuantumState& a, const QuantumState& b);

QuantumState random_pure_state(int n, Rng& rng);
/// Haar-random unitary of dimension dim (QR of a Ginibre matrix with phase fix).
CMatrix haar_unitary(Eigen::Index dim, Rng& rng);
bool is_unitary(const CMatrix& u, double tol = kExactTol);

/// Bitstring of `index` over `bits` bits, most significant first.
std::string bitstring(std::uint64_t index, int bits);

}  // namespace xplat
