#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "xplat/clifford.hpp"
#include "xplat/liouville.hpp"
#include "xplat/qsim.hpp"
#include "xplat/readout.hpp"
#include "xplat/records.hpp"

namespace xplat {

// ---------------------------------------------------------------- channels

/// |I>><<I| + Pi_1 / (2^k + 1).
ChannelMatrix phi0_closed_form(int k1);
/// Average of V^dagger M(V . V^dagger) V over the k-qubit Clifford group.
ChannelMatrix clifford_measure_prepare_average(int k1);
/// (Phi_0, Phi_1). Phi_0 is enumerated and checked against the closed form.
std::pair<ChannelMatrix, ChannelMatrix> phi_channels(int k1);
/// max |(2^k+1) Phi_0 - 2^k Phi_1 - I|.
double identity_reconstruction_check(int k1);

// ---------------------------------------------------------------- plans

struct PartLayout {
  std::vector<int> global_qubits;  // one entry per local wire
};

/// One k1 = 1 wire cut: the source part measures source_wire, the target
/// part re-prepares the same global qubit on target_wire.
struct Cut {
  int source_part = 0;
  int source_wire = 0;
  int target_part = 0;
  int target_wire = 0;
};

class CutPlan {
 public:
  CutPlan() = default;
  CutPlan(int n, std::vector<PartLayout> parts, std::vector<Cut> cuts);

  int n() const { return n_; }
  int num_parts() const { return static_cast<int>(parts_.size()); }
  int num_cuts() const { return static_cast<int>(cuts_.size()); }
  int k1() const { return 1; }

  const PartLayout& part(int j) const { return parts_.at(static_cast<std::size_t>(j)); }
  const std::vector<Cut>& cuts() const { return cuts_; }
  const Cut& cut(int i) const { return cuts_.at(static_cast<std::size_t>(i)); }

  /// Local wires measured at the end, ascending.
  const std::vector<int>& output_wires(int j) const { return outputs_.at(static_cast<std::size_t>(j)); }
  /// Global qubits of the output wires, in output-wire order.
  std::vector<int> output_qubits(int j) const;
  /// Cuts whose source is part j (the part measures these wires).
  const std::vector<int>& measured_cuts(int j) const { return measured_.at(static_cast<std::size_t>(j)); }
  /// Cuts whose target is part j (the part re-prepares these wires).
  const std::vector<int>& prepared_cuts(int j) const { return prepared_.at(static_cast<std::size_t>(j)); }
  const std::vector<int>& topological_order() const { return order_; }
  /// Output-wire counts per part; the ensemble part sizes.
  std::vector<int> output_sizes() const;
  bool is_chain() const;

 private:
  int n_ = 0;
  std::vector<PartLayout> parts_;
  std::vector<Cut> cuts_;
  std::vector<std::vector<int>> outputs_, measured_, prepared_;
  std::vector<int> order_;
};

/// Per-part circuits on local wires.
using PartCircuits = std::vector<Circuit>;

void validate_circuits(const CutPlan& plan, const PartCircuits& circuits);

/// The uncut n-qubit state: part circuits composed on global qubits in topological order.
QuantumState uncut_state(const CutPlan& plan, const PartCircuits& circuits);

/// Chain of parts with the given wire counts; consecutive parts share one qubit.
CutPlan chain_plan(const std::vector<int>& part_sizes);

struct CutCircuit {
  CutPlan plan;
  PartCircuits circuits;
};

/// GHZ-n (odd n >= 3) split at the central qubit into two parts of (n+1)/2 wires.
CutCircuit ghz_cut_plan(int n);
/// GHZ state prepared along a chain plan.
CutCircuit ghz_chain(const std::vector<int>& part_sizes);
/// Random brickwork circuits (Haar two-qubit blocks) on every part of the plan.
PartCircuits random_part_circuits(const CutPlan& plan, int layers, Rng& rng);

// ---------------------------------------------------------------- configurations

/// Cut-table entry per measured cut and per prepared cut of one part.
struct PartConfig {
  std::vector<int> measured;
  std::vector<int> prepared;
  bool operator==(const PartConfig&) const = default;
};

/// Base-4 digits, measured cuts first, most significant first.
std::uint32_t encode_part_config(const PartConfig& config);
PartConfig decode_part_config(const CutPlan& plan, int part, std::uint32_t id);
/// Part configuration induced by one entry per cut of the whole plan.
PartConfig part_config_for(const CutPlan& plan, int part, std::span<const int> cut_entries);

/// One distinct circuit: a part, its configuration and its prepared-cut inputs.
struct CircuitSetting {
  int part = 0;
  std::uint32_t config = 0;
  std::string cut_input;
  bool operator==(const CircuitSetting&) const = default;
};

/// All configurations of one part: 4 entries per measured cut, 4 entries x 2 inputs per prepared cut.
std::vector<CircuitSetting> part_configurations(const CutPlan& plan, int part, int table_size = 4);
/// All circuit settings of a chain plan (4 + 32 (r-2) + 8 for r >= 2). Throws for non-chain plans.
std::vector<CircuitSetting> enumerate_configurations(const CutPlan& plan);

struct ExecOptions {
  std::uint64_t shots = 0;  // 0 = exact probabilities
  const ReadoutNoiseModel* readout = nullptr;
  GateNoise gate_noise;
};

/// Runs one part under a cut configuration and local measurement setting.
/// cut_input has one character per prepared cut: '0', '1', or 'm' for the
/// maximally mixed input (uniform average of the two basis inputs).
OutcomeTable execute_part(const CutPlan& plan, const PartCircuits& circuits, int part, std::uint32_t config,
                          const std::string& cut_input, std::span<const Mat2> setting, const CutConfigTable& table,
                          const ExecOptions& options, Rng* rng = nullptr);

}  // namespace xplat
