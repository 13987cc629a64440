#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <json.hpp>

#include "xplat/estimators.hpp"
#include "xplat/readout.hpp"

namespace xplat {

struct CalibrationReport {
  double f_hat = 0.0;
  int rounds = 0;
  std::vector<double> values;  // per-round (sampled) or per-Clifford (exact) values

  double std_error() const;
  nlohmann::json to_json() const;
};

/// Exact f for one cut qubit with flip probabilities (xi, eta): the average of
/// 2 sum_s P(s | C|0>) |<s|C|0>|^2 - 1 over the 24 Cliffords.
CalibrationReport calibrate_f_exact(double xi, double eta);

/// Sampled calibration: each round prepares C|0> for a Clifford C, reads one
/// noisy shot s and records 2 |<s|C|0>|^2 - 1. Cliffords are drawn in balanced
/// strata (every element rounds/24 times, the remainder without repetition)
/// and shuffled.
CalibrationReport calibrate_f(double xi, double eta, int rounds, Rng& rng);

CalibrationReport calibrate_f_exact(const ReadoutNoiseModel& model, int qubit);
CalibrationReport calibrate_f(const ReadoutNoiseModel& model, int qubit, int rounds, Rng& rng);

/// Overlap estimate with each platform's calibrated cut table (enumerated
/// configurations). Reduces to multi_cut_estimate at f_hat = 1/3.
EstimateReport em_cut_estimate(const RecordSet& p, const RecordSet& q, const CutPlan& plan,
                               const UnitaryEnsemble& ensemble, double f_hat_p, double f_hat_q,
                               const ReadoutCorrection& correction = {});

/// Stabilizer-state fidelity with the calibrated cut table.
EstimateReport em_cut_fidelity_estimate(const RecordSet& records, const CutPlan& plan, double f_hat,
                                        const StabilizerGroup& group, std::span<const int> sampled,
                                        const ReadoutNoiseModel* correction = nullptr);

/// Parity of the bits in `mask` of one table with Lambda^-1 applied per bit.
/// qubits[b] is the global qubit read at bit position b.
double em_readout_parity(const OutcomeTable& table, const ReadoutNoiseModel& model, std::span<const int> qubits,
                         std::uint64_t mask);

/// Stabilizer-state fidelity with output readout inverted through `model`.
EstimateReport em_readout_estimate(const RecordSet& records, const CutPlan& plan, const CutConfigTable& table,
                                   const ReadoutNoiseModel& model, const StabilizerGroup& group,
                                   std::span<const int> sampled);

}  // namespace xplat
