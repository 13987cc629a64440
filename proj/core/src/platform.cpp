#include "xplat/platform.hpp"

#include <set>

#include "xplat/qsim.hpp"

namespace xplat {

MeasurementScheme MeasurementScheme::local(UnitaryEnsemble ensemble) {
  MeasurementScheme s;
  s.kind = SchemeKind::kEnsemble;
  s.ensemble = std::move(ensemble);
  return s;
}

MeasurementScheme MeasurementScheme::stabilizer(StabilizerGroup group) {
  MeasurementScheme s;
  s.kind = SchemeKind::kStabilizer;
  s.group = std::move(group);
  return s;
}

MeasurementScheme MeasurementScheme::global(std::vector<CMatrix> unitaries) {
  if (unitaries.empty()) throw InvalidArgument("global scheme needs at least one unitary");
  MeasurementScheme s;
  s.kind = SchemeKind::kGlobal;
  s.global_unitaries = std::move(unitaries);
  return s;
}

int MeasurementScheme::num_settings(int part) const {
  switch (kind) {
    case SchemeKind::kEnsemble:
      return ensemble.num_settings(part);
    case SchemeKind::kStabilizer:
      return static_cast<int>(group.elements.size());
    case SchemeKind::kGlobal:
      return static_cast<int>(global_unitaries.size());
  }
  return 0;
}

std::vector<Mat2> MeasurementScheme::local_setting(const CutPlan& plan, int part, int t) const {
  if (kind == SchemeKind::kEnsemble) return ensemble.matrices(part, t);
  if (kind == SchemeKind::kStabilizer) {
    if (group.n != plan.n()) throw InvalidArgument("stabilizer group size differs from the plan");
    const auto full = stabilizer_setting(group.elements.at(static_cast<std::size_t>(t)));
    std::vector<Mat2> out;
    for (int q : plan.output_qubits(part)) out.push_back(full.at(static_cast<std::size_t>(q)));
    return out;
  }
  throw InvalidArgument("global unitaries have no per-wire form");
}

std::uint64_t cut_input_hash(const std::string& cut_input) {
  std::uint64_t h = 0x9e3779b97f4a7c15ULL;
  for (char c : cut_input) h = mix64(h ^ static_cast<unsigned char>(c));
  return h;
}

OutcomeTable run_job(const PlatformProgram& program, const MeasurementScheme& scheme, std::uint32_t platform,
                     const Job& job, std::uint64_t master_seed) {
  const CutPlan& plan = program.plan;
  if (job.part >= static_cast<std::uint32_t>(plan.num_parts())) throw InvalidArgument("job part out of range");
  if (job.unitary >= static_cast<std::uint32_t>(scheme.num_settings(static_cast<int>(job.part))))
    throw InvalidArgument("job unitary index out of range");
  Rng rng(master_seed, StreamKey{platform, job.part, job.config, job.unitary, StreamPurpose::kShots,
                                 cut_input_hash(job.cut_input)});
  const ReadoutNoiseModel* readout = program.readout.xi.empty() ? nullptr : &program.readout;

  if (scheme.kind == SchemeKind::kGlobal) {
    if (plan.num_cuts() != 0 || plan.num_parts() != 1) throw InvalidArgument("global unitaries need an uncut plan");
    if (job.config != 0 || !job.cut_input.empty()) throw InvalidArgument("uncut jobs use config 0 and no cut input");
    QuantumState state = run_circuit(program.circuits.at(0), QuantumState::zero(plan.n()), program.gate_noise);
    std::vector<int> wires(static_cast<std::size_t>(plan.n()));
    for (int q = 0; q < plan.n(); ++q) wires[static_cast<std::size_t>(q)] = q;
    const CMatrix& w = scheme.global_unitaries[job.unitary];
    if (state.is_pure())
      apply_matrix(state.mutable_amplitudes(), plan.n(), wires, w);
    else
      apply_matrix(state.mutable_density(), plan.n(), wires, w);
    auto probs = measurement_probabilities(state);
    std::vector<int> order;
    for (int wire : plan.output_wires(0)) order.push_back(plan.part(0).global_qubits[static_cast<std::size_t>(wire)]);
    if (readout) probs = apply_readout_noise(probs, *readout, order);
    if (job.shots == 0) return make_exact_table(plan.n(), std::move(probs));
    return make_count_table(plan.n(), sample_shots(probs, job.shots, rng));
  }

  const auto setting = scheme.local_setting(plan, static_cast<int>(job.part), static_cast<int>(job.unitary));
  ExecOptions options{job.shots, readout, program.gate_noise};
  // The cut table only supplies the per-entry rotations, which every table shares.
  static const CutConfigTable rotations = cut_config_table();
  return execute_part(plan, program.circuits, static_cast<int>(job.part), job.config, job.cut_input, setting, rotations,
                      options, &rng);
}

std::vector<Job> plan_jobs(const std::vector<CircuitSetting>& settings, const MeasurementScheme& scheme,
                           std::uint64_t shots, const std::vector<int>& unitaries) {
  std::vector<Job> jobs;
  for (const CircuitSetting& s : settings) {
    std::vector<int> indices = unitaries;
    if (indices.empty())
      for (int t = 0; t < scheme.num_settings(s.part); ++t) indices.push_back(t);
    std::set<int> seen;
    for (int t : indices)
      if (seen.insert(t).second)
        jobs.push_back(Job{static_cast<std::uint32_t>(s.part), s.config, static_cast<std::uint32_t>(t), s.cut_input, shots});
  }
  return jobs;
}

RecordSet collect_records(const PlatformProgram& program, const MeasurementScheme& scheme, std::uint32_t platform,
                          const std::vector<Job>& jobs, std::uint64_t master_seed) {
  RecordSet records(platform);
  for (const Job& job : jobs)
    records.insert(RecordKey{platform, job.part, job.config, job.unitary, job.cut_input},
                   run_job(program, scheme, platform, job, master_seed));
  return records;
}

}  // namespace xplat
