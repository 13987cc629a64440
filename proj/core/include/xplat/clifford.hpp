#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "xplat/rng.hpp"
#include "xplat/types.hpp"

namespace xplat {

/// Multiplies by a global phase so the first nonzero entry (row-major) is real positive.
CMatrix normalize_phase(const CMatrix& u);
bool equal_up_to_phase(const CMatrix& a, const CMatrix& b, double tol = 1e-9);

/// The 24 single-qubit Cliffords, phase-normalized, identity first.
const std::vector<Mat2>& single_qubit_clifford_table();
/// Index of u in the 24-element table (up to phase). Throws if u is not Clifford.
int clifford_label(const Mat2& u);
/// The 11520-element two-qubit Clifford group modulo phase, built from H, S and CNOT.
const std::vector<CMatrix>& two_qubit_clifford_group();
/// True if u maps every Pauli to a signed Pauli under conjugation.
bool is_clifford(const CMatrix& u);
/// Uniform draw from the k-qubit Clifford group, k in {1, 2}.
CMatrix sample_k_clifford(int k, Rng& rng);

// Table labels for the three basis rotations used by the cut and by exhaustive ensembles.
int identity_label();
int rx_half_pi_label();
int ry_half_pi_label();

struct CutConfigEntry {
  int z = 0;
  std::string label;
  Mat2 unitary = Mat2::Identity();
  double probability = 0.0;
};

/// Distribution of cut configurations for one k1 = 1 cut. Without f_hat this is
/// the noiseless table; with f_hat it is the calibrated (mitigated) table.
struct CutConfigTable {
  int k1 = 1;
  std::optional<double> f_hat;
  std::vector<CutConfigEntry> entries;

  /// Quasi-probability scale per cut: 2^(k1+1)+1 noiseless, (2 - f)/f calibrated.
  double weight_factor() const;
  /// Signed reconstruction coefficient of entry e: weight_factor * p_e * (-1)^z.
  double coefficient(int e) const;
  int size() const { return static_cast<int>(entries.size()); }
};

CutConfigTable cut_config_table(int k1 = 1, std::optional<double> f_hat = std::nullopt);

enum class EnsembleMode { kRandom, kExhaustive };

std::string to_string(EnsembleMode mode);
EnsembleMode ensemble_mode_from_string(const std::string& text);

struct EnsembleSpec {
  std::vector<int> part_sizes;  // measured output qubits per part
  int num_settings = 1;         // N per part in random mode; ignored when exhaustive
  std::uint64_t seed = 0;
  EnsembleMode mode = EnsembleMode::kRandom;

  bool operator==(const EnsembleSpec&) const = default;
};

/// Local measurement settings shared by both platforms. In random mode each
/// qubit's label is drawn from the 24-element table; in exhaustive mode a part
/// of size k enumerates all 3^k settings over {I, Rx(pi/2), Ry(pi/2)}.
class UnitaryEnsemble {
 public:
  UnitaryEnsemble() = default;
  explicit UnitaryEnsemble(EnsembleSpec spec);

  const EnsembleSpec& spec() const { return spec_; }
  int num_parts() const { return static_cast<int>(labels_.size()); }
  int num_settings(int part) const;
  const std::vector<int>& labels(int part, int t) const;
  std::vector<Mat2> matrices(int part, int t) const;
  /// 16-hex-digit fingerprint of the spec and every label.
  std::string digest() const;

  bool operator==(const UnitaryEnsemble& other) const { return spec_ == other.spec_ && labels_ == other.labels_; }

 private:
  EnsembleSpec spec_;
  std::vector<std::vector<std::vector<int>>> labels_;  // [part][t][qubit]
};

UnitaryEnsemble shared_ensemble(const std::vector<int>& part_sizes, int num_settings, std::uint64_t seed,
                                EnsembleMode mode = EnsembleMode::kRandom);

/// Unitaries W whose computational-basis measurement after W realizes each of
/// the 2^n + 1 mutually unbiased bases (n <= 3). Together they form an exact 2-design.
const std::vector<CMatrix>& mub_unitaries(int n);

enum class GlobalEnsembleKind { kMub, kClifford, kHaar };

std::string to_string(GlobalEnsembleKind kind);

/// N global n-qubit unitaries for the collision estimator.
std::vector<CMatrix> global_ensemble(int n, int num_settings, GlobalEnsembleKind kind, std::uint64_t seed);

}  // namespace xplat
