#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "xplat/rng.hpp"
#include "xplat/types.hpp"

namespace xplat {

/// Independent per-qubit bit-flip readout noise. xi[q] = P(read 1 | 0),
/// eta[q] = P(read 0 | 1), indexed by global qubit.
struct ReadoutNoiseModel {
  std::vector<double> xi;
  std::vector<double> eta;

  static ReadoutNoiseModel uniform(int n, double xi, double eta);
  int num_qubits() const { return static_cast<int>(xi.size()); }
  bool is_noiseless() const;
  /// Throws unless both vectors have equal length and entries lie in [0, 1).
  void validate() const;
  /// 2x2 confusion matrix for qubit q: entry (a, x) = P(read a | true x).
  Eigen::Matrix2d confusion(int q) const;
};

/// Per-qubit inverse confusion matrices. Throws if xi + eta >= 1 on any qubit.
std::vector<Eigen::Matrix2d> readout_inverse(const ReadoutNoiseModel& model);

/// Applies a per-bit 2x2 matrix to a table over `bits` bits. mats[b] acts on
/// bit position b (0 = most significant); nullptr entries are skipped.
std::vector<double> apply_bitwise(std::span<const double> table, std::span<const Eigen::Matrix2d* const> mats);

/// Corrupts an exact distribution. qubits[b] is the global qubit measured at bit position b.
std::vector<double> apply_readout_noise(std::span<const double> probs, const ReadoutNoiseModel& model,
                                        std::span<const int> qubits);
/// Corrupts sampled counts shot by shot.
std::vector<std::uint64_t> apply_readout_noise(std::span<const std::uint64_t> counts, const ReadoutNoiseModel& model,
                                               std::span<const int> qubits, Rng& rng);

/// Flat CSV "qubit,xi,eta" with a header row.
ReadoutNoiseModel load_noise_model(const std::string& path);
void save_noise_model(const ReadoutNoiseModel& model, const std::string& path);

}  // namespace xplat
