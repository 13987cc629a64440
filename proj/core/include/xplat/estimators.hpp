#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "xplat/clifford.hpp"
#include "xplat/records.hpp"
#include "xplat/stabilizer.hpp"
#include "xplat/wirecut.hpp"

namespace xplat {

struct EstimationBudget {
  int N = 1;
  std::uint64_t m = 0;  // 0 = exact probabilities
  int L = 0;            // 0 = enumerated cut configurations
  int T = 0;            // stabilizer samples; 0 when unused
};

struct EstimateReport {
  double value = 0.0;
  double std_error = 0.0;
  EstimationBudget budget;
  int repetitions = 1;

  nlohmann::json to_json() const;
  static EstimateReport from_json(const nlohmann::json& j);
};

/// Mean and std / sqrt(R) over per-repetition values.
EstimateReport aggregate_repetitions(std::span<const double> values, const EstimationBudget& budget);

int hamming_distance(std::string_view x, std::string_view y);
int hamming_distance(std::uint64_t x, std::uint64_t y);

/// y = (x) per-bit [[1, -1/2], [-1/2, 1]] applied to a table over `bits` bits,
/// so that sum_{s,s'} (-2)^{-D(s,s')} p_s q_s' = <K p, q>.
std::vector<double> distance_kernel_apply(std::span<const double> p, int bits);
double distance_pair_sum(std::span<const double> p, std::span<const double> q, int bits);

// ---------------------------------------------------------------- cut configurations

/// One table entry per cut plus its signed quasi-probability weight.
struct GlobalConfig {
  std::vector<int> entries;
  double weight = 0.0;
};

/// Every combination of entries, weighted by prod (weight_factor * p_e * (-1)^z).
std::vector<GlobalConfig> enumerate_global_configs(const CutPlan& plan, const CutConfigTable& table);
/// L sampled rounds, each weighted weight_factor^k2 (-1)^|z| / L.
std::vector<GlobalConfig> sample_global_configs(const CutPlan& plan, const CutConfigTable& table, int rounds, Rng& rng);
/// Distinct part circuits (configuration and both inputs per prepared cut) the configurations touch.
std::vector<CircuitSetting> required_settings(const CutPlan& plan, std::span<const GlobalConfig> configs);

/// Optional readout inversion per platform (applied to output bits only).
struct ReadoutCorrection {
  const ReadoutNoiseModel* p = nullptr;
  const ReadoutNoiseModel* q = nullptr;
};

// ---------------------------------------------------------------- estimators

/// No cuts: 2^n / N sum_t sum_{s,s'} (-2)^{-D} p_s(W_t) q_s'(W_t). Records use
/// part 0, config 0, empty cut input. std_error is the per-setting spread.
EstimateReport distance_cp_estimate(const RecordSet& p, const RecordSet& q, const UnitaryEnsemble& ensemble, int n);

/// Global-unitary records: (d+1)/N sum_t sum_s p_s q_s - 1.
EstimateReport collision_cp_estimate(const RecordSet& p, const RecordSet& q, int num_settings, int n);

/// Two parts joined by one cut; enumerated configurations, Q-A and Q-B
/// setting sums taken independently.
EstimateReport parallel_single_cut_estimate(const RecordSet& p, const RecordSet& q, const CutPlan& plan,
                                            const CutConfigTable& table, const UnitaryEnsemble& ensemble);

/// General estimator: sum_{g,g'} w_g w_g' 2^n sum_{c,c'} prod_parts T_j.
EstimateReport multi_cut_estimate(const RecordSet& p, const RecordSet& q, const CutPlan& plan,
                                  const CutConfigTable& table, const UnitaryEnsemble& ensemble,
                                  std::span<const GlobalConfig> configs_p, std::span<const GlobalConfig> configs_q,
                                  const ReadoutCorrection& correction = {});

/// Splits every record into two disjoint shot halves (exact tables are reused).
std::pair<RecordSet, RecordSet> split_records(const RecordSet& records, Rng& rng);

/// tr(rho^2) from one platform via the overlap estimator on disjoint shot halves.
EstimateReport purity_estimate(const RecordSet& records, const CutPlan& plan, const CutConfigTable& table,
                               const UnitaryEnsemble& ensemble, std::span<const GlobalConfig> configs, Rng& split_rng,
                               const ReadoutNoiseModel* correction = nullptr);

/// overlap / sqrt(purity_p purity_q) with first-order error propagation.
EstimateReport cross_platform_fidelity(const EstimateReport& overlap, const EstimateReport& purity_p,
                                       const EstimateReport& purity_q);

/// Fidelity with a stabilizer state. Records of unitary index t were measured
/// with stabilizer_setting(group.elements[t]); `sampled` lists the drawn indices.
EstimateReport pure_state_fidelity_estimate(const RecordSet& records, const CutPlan& plan, const CutConfigTable& table,
                                            const StabilizerGroup& group, std::span<const int> sampled,
                                            std::span<const GlobalConfig> configs,
                                            const ReadoutNoiseModel* correction = nullptr);

struct TomographyResult {
  std::vector<PauliString> paulis;
  std::vector<std::optional<double>> estimates;
  std::vector<double> exact;
  double mse = 0.0;  // mean over estimated Paulis
  int estimated = 0;
};

/// Pauli expectations reassembled from local-ensemble records. A Pauli is
/// estimated only if every part has a setting diagonalizing it on all its
/// non-identity sites; compatible settings are averaged.
TomographyResult pauli_tomography(const RecordSet& records, const CutPlan& plan, const CutConfigTable& table,
                                  const UnitaryEnsemble& ensemble, std::span<const GlobalConfig> configs,
                                  const std::vector<PauliString>& paulis, const QuantumState& target);

}  // namespace xplat
