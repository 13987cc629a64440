#pragma once

#include <vector>

#include "xplat/estimators.hpp"
#include "xplat/platform.hpp"

namespace xplat::test {

/// Exact-mode records of one platform under the exhaustive ensemble and enumerated configurations.
inline RecordSet exact_records(const CutPlan& plan, const PartCircuits& circuits, std::uint32_t platform,
                               const UnitaryEnsemble& ensemble, const std::vector<GlobalConfig>& configs,
                               const ReadoutNoiseModel& readout = {}) {
  const MeasurementScheme scheme = MeasurementScheme::local(ensemble);
  const auto jobs = plan_jobs(required_settings(plan, configs), scheme, 0);
  return collect_records(PlatformProgram{plan, circuits, readout, {}}, scheme, platform, jobs, 0);
}

inline UnitaryEnsemble exhaustive(const CutPlan& plan) {
  return shared_ensemble(plan.output_sizes(), 1, 0, EnsembleMode::kExhaustive);
}

inline QuantumState ghz(int n) {
  Circuit c(n);
  c.h(0);
  for (int q = 0; q + 1 < n; ++q) c.cnot(q, q + 1);
  return run_circuit(c, QuantumState::zero(n));
}

}  // namespace xplat::test
