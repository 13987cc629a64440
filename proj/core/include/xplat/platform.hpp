#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "xplat/clifford.hpp"
#include "xplat/records.hpp"
#include "xplat/stabilizer.hpp"
#include "xplat/wirecut.hpp"

namespace xplat {

/// Everything one platform holds privately: its circuits and its noise.
struct PlatformProgram {
  CutPlan plan;
  PartCircuits circuits;
  ReadoutNoiseModel readout;  // empty = noiseless
  GateNoise gate_noise;
};

enum class SchemeKind { kEnsemble, kStabilizer, kGlobal };

/// How the unitary index of a job selects the measurement setting.
struct MeasurementScheme {
  SchemeKind kind = SchemeKind::kEnsemble;
  UnitaryEnsemble ensemble;              // kEnsemble: per-part local settings
  StabilizerGroup group;                 // kStabilizer: stabilizer_setting(elements[t])
  std::vector<CMatrix> global_unitaries;  // kGlobal: one n-qubit unitary per index, uncut plans only

  static MeasurementScheme local(UnitaryEnsemble ensemble);
  static MeasurementScheme stabilizer(StabilizerGroup group);
  static MeasurementScheme global(std::vector<CMatrix> unitaries);

  /// Number of unitary indices available for `part`.
  int num_settings(int part) const;
  /// Per-output-wire rotations of `part` for index t (not for kGlobal).
  std::vector<Mat2> local_setting(const CutPlan& plan, int part, int t) const;
};

struct Job {
  std::uint32_t part = 0;
  std::uint32_t config = 0;
  std::uint32_t unitary = 0;
  std::string cut_input;
  std::uint64_t shots = 0;  // 0 = exact probabilities

  bool operator==(const Job&) const = default;
};

/// Simulates one job. Shots and readout flips are drawn from the substream
/// (platform, part, config, unitary, kShots, hash(cut_input)) of master_seed.
OutcomeTable run_job(const PlatformProgram& program, const MeasurementScheme& scheme, std::uint32_t platform,
                     const Job& job, std::uint64_t master_seed);

/// Jobs for the given circuit settings under every unitary index they need.
/// `unitaries` lists the indices to run (empty = all of the scheme's indices).
std::vector<Job> plan_jobs(const std::vector<CircuitSetting>& settings, const MeasurementScheme& scheme,
                           std::uint64_t shots, const std::vector<int>& unitaries = {});

/// In-process execution of a job list.
RecordSet collect_records(const PlatformProgram& program, const MeasurementScheme& scheme, std::uint32_t platform,
                          const std::vector<Job>& jobs, std::uint64_t master_seed);

std::uint64_t cut_input_hash(const std::string& cut_input);

}  // namespace xplat
